"""Command-line front end: reproducible experiments with machine-readable outputs.

Subcommands: classify, lyapunov-check, simulate, density, hitprob, exit-time,
vdp2d.  Every run that writes files also writes a manifest (full resolved
configuration, master seed, code version, timestamps, sha256 digests of the
outputs); re-running with the same configuration and seed reproduces the CSV
outputs byte for byte.

Exit codes: 0 ok, 2 usage error, 3 numeric failure, 4 inconclusive verdict
under --strict.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from . import __version__
from .euler import (
    DivergenceError,
    NoiseModel,
    StepSequence,
    make_chain,
    mc_hitting_probability,
    simulate,
)
from .feller import (
    ErgodicKind,
    Nature,
    build_scale_speed,
    classify_boundary,
    classify_powerlaw,
    default_reference,
    ergodic_verdict,
    expected_exit_time,
    green_exit_time,
    hitting_probability,
)
from .lyapunov import (
    LyapunovCandidate,
    check_attractive,
    check_euler_hypotheses,
    check_repulsive,
    check_strongly_repulsive,
    default_grid,
)
from .measures import (
    HistogramObserver,
    ReferenceDensity,
    WeightSequence,
    WeightedHistogram,
    side_l1_distance,
    side_mass,
)
from .model import Interval, InvalidSpecError, builtin_spec, spec_from_json, spec_to_json
from .quadrature import EvaluationError, LimitPolicy, UnsupportedIntegrandError
from .vdp2d import VdpConfig, simulate_vdp

_POLICY_KEYS = ("stages", "stage-ratio", "cauchy-tol", "divergence-threshold",
                "exponent-band", "quad-tol")

SCHEMA_VERSION = 1
EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_INCONCLUSIVE = 4


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# small helpers


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path) as fh:
        doc = json.load(fh)
    return doc.get("config", doc)  # accept either a bare config or a manifest


def _pick(args, cfg: dict, name: str, default):
    v = getattr(args, name.replace("-", "_"), None)
    if v is not None:
        return v
    return cfg.get(name, default)


def _resolve_seed(args, cfg) -> int:
    v = _pick(args, cfg, "seed", None)
    if v is None:
        v = os.environ.get("DEGDIFF_SEED", "0")
    return int(v)


def _policy_from(cfg: dict) -> LimitPolicy:
    """Limit-scheme tolerances, overridable through the config file."""
    kwargs = {name.replace("-", "_"): cfg[name] for name in _POLICY_KEYS if name in cfg}
    return LimitPolicy(**kwargs)


def _echo_policy(cfg: dict, config_echo: dict) -> None:
    """Carry config-file tolerance overrides into the manifest echo."""
    for name in _POLICY_KEYS:
        if name in cfg:
            config_echo[name] = cfg[name]


def _resolve_model(args, cfg):
    spec_file = getattr(args, "spec_file", None) or cfg.get("spec-file")
    if spec_file:
        with open(spec_file) as fh:
            return spec_from_json(json.load(fh))
    name = _pick(args, cfg, "model", None)
    if isinstance(name, dict):  # config echo / manifest carries the full spec document
        return spec_from_json(name)
    if name is None:
        raise UsageError("no model given: pass --model or --spec-file")
    params = {}
    c = _pick(args, cfg, "c", None)
    if c is not None:
        params["c"] = float(c)
    try:
        return builtin_spec(name, **params)
    except (InvalidSpecError, TypeError) as err:
        raise UsageError(str(err)) from err


def _digest(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


class Manifest:
    """Collects the resolved configuration and output digests of one run."""

    def __init__(self, command: str, config: dict, seed: int):
        self.doc = {
            "schema_version": SCHEMA_VERSION,
            "command": command,
            "config": config,
            "seed": seed,
            "version": __version__,
            "started": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
            "outputs": {},
        }

    def add_output(self, path: str) -> None:
        self.doc["outputs"][os.path.basename(path)] = _digest(path)

    def write(self, path: str) -> None:
        self.doc["finished"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
        with open(path, "w") as fh:
            json.dump(self.doc, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _emit_json(doc: dict, out: str | None, manifest: Manifest | None,
               manifest_path: str | None = None):
    if out and manifest_path:
        doc = {**doc, "manifest": os.path.basename(manifest_path)}
    text = json.dumps(doc, indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
        if manifest:
            manifest.add_output(out)
    else:
        print(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_classify(args) -> int:
    cfg = _load_config(args.config)
    spec = _resolve_model(args, cfg)
    x0 = _pick(args, cfg, "x0", None)
    strict = bool(args.strict or cfg.get("strict"))
    policy = _policy_from(cfg)
    config_echo = {"model": spec_to_json(spec), "x0": x0, "strict": strict}
    _echo_policy(cfg, config_echo)

    doc = {"schema_version": SCHEMA_VERSION, "command": "classify",
           "model": spec_to_json(spec), "subintervals": []}
    inconclusive = False
    for sub in spec.subintervals():
        c = default_reference(sub)
        table = build_scale_speed(spec, c, policy)
        left = classify_boundary(table, sub.left, policy)
        right = classify_boundary(table, sub.right, policy)
        x0_here = x0 if x0 is not None and sub.contains(float(x0)) else c
        erg = ergodic_verdict(left, right, table, float(x0_here))
        doc["subintervals"].append({
            "interval": [left.to_json()["endpoint"], right.to_json()["endpoint"]],
            "reference": c,
            "left": left.to_json(),
            "right": right.to_json(),
            "ergodic": erg.to_json(),
        })
        if (left.nature is Nature.UNKNOWN or right.nature is Nature.UNKNOWN
                or erg.kind is ErgodicKind.UNDETERMINED):
            inconclusive = True

    if spec.local_profile is not None:
        doc["powerlaw_verdict"] = classify_powerlaw(spec.local_profile).to_json()

    manifest = None
    if args.out:
        manifest = Manifest("classify", config_echo, 0)
    _emit_json(doc, args.out, manifest,
               (args.out + ".manifest.json") if args.out else None)
    if manifest:
        manifest.write(args.out + ".manifest.json")
    if strict and inconclusive:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


_CANDIDATES = {
    "quadratic": lambda: LyapunovCandidate(
        lambda x: x * x, lambda x: 2.0 * x, lambda x: 2.0,
        Interval(-1.0, 1.0), "quadratic"),
    "xexp": lambda: LyapunovCandidate(
        lambda x: x * math.exp(x), lambda x: (1.0 + x) * math.exp(x),
        lambda x: (2.0 + x) * math.exp(x), Interval(0.0, 1.0), "xexp"),
}


def cmd_lyapunov_check(args) -> int:
    cfg = _load_config(args.config)
    spec = _resolve_model(args, cfg)
    name = _pick(args, cfg, "candidate", "quadratic")
    if name not in _CANDIDATES:
        raise UsageError(f"unknown candidate {name!r}; have {sorted(_CANDIDATES)}")
    candidate = _CANDIDATES[name]()
    check = _pick(args, cfg, "check", "repulsive")
    delta = float(_pick(args, cfg, "delta",
                        spec.degenerate_points[0] if spec.degenerate_points else 0.0))
    radius = float(_pick(args, cfg, "radius", 1.0))
    side = int(_pick(args, cfg, "side", 1))
    grid = default_grid(delta, side * radius, int(_pick(args, cfg, "grid-n", 2048)))

    if check == "repulsive":
        report = check_repulsive(candidate, spec, grid)
    elif check == "strongly-repulsive":
        eps = _pick(args, cfg, "epsilon", None)
        if eps is None:
            raise UsageError("--epsilon is required for the strongly-repulsive check")
        report = check_strongly_repulsive(candidate, spec, grid, float(eps))
    elif check == "attractive":
        report = check_attractive(candidate, spec, grid)
    elif check == "euler":
        nb = Interval(delta - radius, delta + radius)
        report = check_euler_hypotheses(candidate, spec, nb)
    else:
        raise UsageError(f"unknown check {check!r}")

    doc = {"schema_version": SCHEMA_VERSION, "command": "lyapunov-check",
           "model": spec_to_json(spec), "candidate": name, "check": check,
           "report": report.to_json()}
    _emit_json(doc, args.out, None)
    return EXIT_OK


def _steps_from(args, cfg) -> StepSequence:
    return StepSequence(
        _pick(args, cfg, "step-family", "polynomial"),
        float(_pick(args, cfg, "gamma0", 1.0)),
        float(_pick(args, cfg, "step-r", 1.0 / 3.0)),
    )


def cmd_simulate(args) -> int:
    cfg = _load_config(args.config)
    spec = _resolve_model(args, cfg)
    seed = _resolve_seed(args, cfg)
    n_steps = int(_pick(args, cfg, "n-steps", 100_000))
    x0 = float(_pick(args, cfg, "x0", 1.0))
    thin = int(_pick(args, cfg, "thin", 0))
    steps = _steps_from(args, cfg)
    noise = NoiseModel(_pick(args, cfg, "noise", "gaussian"))

    config_echo = {
        "model": spec_to_json(spec), "seed": seed, "n-steps": n_steps, "x0": x0,
        "thin": thin, "step-family": steps.family, "gamma0": steps.gamma0,
        "step-r": steps.r, "noise": noise.kind,
    }
    chain = make_chain(spec, steps, noise, x0, seed)
    summary = simulate(chain, n_steps, thin=thin)

    doc = {
        "schema_version": SCHEMA_VERSION, "command": "simulate",
        "config": config_echo,
        "final_x": summary.final_x, "n_steps": summary.n_steps,
        "gamma_total": summary.gamma_total,
        "crossings": len(summary.crossing_log),
        "last_crossing_index": summary.last_crossing_index,
        "side_of_delta": {str(k): v for k, v in summary.side_of_delta.items()},
        "trajectory_digest": summary.digest(),
    }
    manifest = Manifest("simulate", config_echo, seed) if args.out else None
    if args.out and thin > 0 and summary.thinned is not None:
        csv_path = args.out + ".csv"
        _write_csv(csv_path, ["n", "Gamma_n", "X_n"], summary.thinned)
        manifest.add_output(csv_path)
        if not args.no_plot:
            from .report import save_trajectory_figure

            fig = save_trajectory_figure(summary.thinned, args.out + ".png",
                                         spec.degenerate_points, title=spec.name)
            manifest.add_output(fig)
    _emit_json(doc, (args.out + ".json") if args.out else None, manifest,
               (args.out + ".manifest.json") if args.out else None)
    if manifest:
        manifest.write(args.out + ".manifest.json")
    return EXIT_OK


def cmd_density(args) -> int:
    cfg = _load_config(args.config)
    spec = _resolve_model(args, cfg)
    seed = _resolve_seed(args, cfg)
    n_steps = int(_pick(args, cfg, "n-steps", 1_000_000))
    x0 = float(_pick(args, cfg, "x0", 1.0))
    lo = float(_pick(args, cfg, "range-lo", -2.0))
    hi = float(_pick(args, cfg, "range-hi", 8.0))
    bins = int(_pick(args, cfg, "bins", 200))
    replicas = int(_pick(args, cfg, "replicas", 1))
    threads = int(_pick(args, cfg, "threads", 1))
    steps = _steps_from(args, cfg)
    noise = NoiseModel(_pick(args, cfg, "noise", "gaussian"))
    weights = WeightSequence(
        _pick(args, cfg, "eta-family", "constant"),
        float(_pick(args, cfg, "eta0", 1.0)),
        float(_pick(args, cfg, "eta-s", 0.0)),
    )

    config_echo = {
        "model": spec_to_json(spec), "seed": seed, "n-steps": n_steps, "x0": x0,
        "range-lo": lo, "range-hi": hi, "bins": bins, "replicas": replicas,
        "step-family": steps.family, "gamma0": steps.gamma0, "step-r": steps.r,
        "noise": noise.kind, "eta-family": weights.family, "eta0": weights.eta0,
        "eta-s": weights.s,
    }
    _echo_policy(cfg, config_echo)

    def run_replica(i: int):
        hist = WeightedHistogram(lo, hi, bins)
        chain = make_chain(spec, steps, noise, x0, seed, replica=i)
        summary = simulate(chain, n_steps, observers=[HistogramObserver(hist, weights)])
        return hist, summary

    if replicas == 1:
        results = [run_replica(0)]
    else:
        with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
            results = list(pool.map(run_replica, range(replicas)))
    hist = results[0][0]
    for h, _ in results[1:]:
        hist = hist.merge(h)
    crossings = sum(len(s.crossing_log) for _, s in results)
    last_crossing = max((s.last_crossing_index for _, s in results
                         if s.last_crossing_index is not None), default=None)

    doc = {
        "schema_version": SCHEMA_VERSION, "command": "density", "config": config_echo,
        "total_weight": hist.total_weight,
        "out_of_range_fraction": hist.out_of_range_weight / hist.total_weight,
        "crossings": crossings, "last_crossing_index": last_crossing,
    }

    # reference comparison: normalized speed density on the occupied side
    delta = spec.degenerate_points[0] if spec.degenerate_points else None
    policy = _policy_from(cfg)
    try:
        if delta is None:
            table = build_scale_speed(spec, policy=policy)
            ref = ReferenceDensity.from_table(table)
            doc["l1_vs_reference"] = l1 = _l1_full(hist, ref)
        else:
            lmass, rmass = side_mass(hist, delta)
            doc["side_mass"] = {"left": lmass, "right": rmass}
            side = 1 if rmass >= lmass else -1
            cref = default_reference(
                Interval(delta, spec.interval.right) if side > 0
                else Interval(spec.interval.left, delta))
            table = build_scale_speed(spec, cref, policy)
            ref = ReferenceDensity.from_table(table)
            doc["l1_vs_reference"] = side_l1_distance(hist, ref, delta, side)
            doc["occupied_side"] = "right" if side > 0 else "left"
    except (ValueError, EvaluationError, UnsupportedIntegrandError) as err:
        ref = None
        doc["l1_vs_reference"] = None
        doc["reference_note"] = f"no reference density: {err}"

    manifest = Manifest("density", config_echo, seed) if args.out else None
    if args.out:
        edges = hist.bin_edges()
        dens = hist.densities()
        rows = [(edges[i], edges[i + 1], dens[i]) for i in range(hist.bins)]
        csv_path = args.out + ".csv"
        _write_csv(csv_path, ["bin_left", "bin_right", "density"], rows)
        manifest.add_output(csv_path)
        if not args.no_plot:
            from .report import save_density_figure

            fig = save_density_figure(hist, args.out + ".png", ref,
                                      title=f"{spec.name} (n={n_steps})")
            manifest.add_output(fig)
    _emit_json(doc, (args.out + ".json") if args.out else None, manifest,
               (args.out + ".manifest.json") if args.out else None)
    if manifest:
        manifest.write(args.out + ".manifest.json")
    return EXIT_OK


def _l1_full(hist, ref) -> float:
    from .measures import l1_distance

    return l1_distance(hist, ref)


def cmd_hitprob(args) -> int:
    cfg = _load_config(args.config)
    spec = _resolve_model(args, cfg)
    a = float(_pick(args, cfg, "a", None))
    x = float(_pick(args, cfg, "x", None))
    b = float(_pick(args, cfg, "b", None))
    table = build_scale_speed(spec, _pick(args, cfg, "reference", None))
    u = hitting_probability(table, x, a, b)
    doc = {"schema_version": SCHEMA_VERSION, "command": "hitprob",
           "a": a, "x": x, "b": b, "probability": u}
    mc_paths = _pick(args, cfg, "mc-paths", None)
    if mc_paths:
        seed = _resolve_seed(args, cfg)
        doc["mc_probability"] = mc_hitting_probability(
            spec, x, a, b, int(mc_paths), float(_pick(args, cfg, "mc-gamma", 1e-4)), seed)
        doc["mc_paths"] = int(mc_paths)
    _emit_json(doc, args.out, None)
    return EXIT_OK


def cmd_exit_time(args) -> int:
    cfg = _load_config(args.config)
    spec = _resolve_model(args, cfg)
    a = float(_pick(args, cfg, "a", None))
    x = float(_pick(args, cfg, "x", None))
    b = float(_pick(args, cfg, "b", None))
    table = build_scale_speed(spec, _pick(args, cfg, "reference", None))
    direct = expected_exit_time(table, x, a, b)
    doc = {"schema_version": SCHEMA_VERSION, "command": "exit-time",
           "a": a, "x": x, "b": b, "expected_exit_time": direct}
    if args.green:
        g = green_exit_time(table, x, a, b)
        doc["green_exit_time"] = g
        doc["cross_check_gap"] = abs(direct - g)
    _emit_json(doc, args.out, None)
    return EXIT_OK


def cmd_vdp2d(args) -> int:
    cfg = _load_config(args.config)
    seed = _resolve_seed(args, cfg)
    c = float(_pick(args, cfg, "c", 0.5))
    n_steps = int(_pick(args, cfg, "n-steps", 1_000_000))
    config = VdpConfig(c=c, n_steps=n_steps)
    config_echo = {"c": c, "n-steps": n_steps, "seed": seed,
                   "gamma0": config.gamma0, "step-r": config.r}
    hist, summary = simulate_vdp(config, seed)
    doc = {
        "schema_version": SCHEMA_VERSION, "command": "vdp2d", "config": config_echo,
        "final": list(summary.final),
        "origin_cell_mass": summary.origin_cell_mass,
        "origin_block_mass": summary.origin_block_mass,
        "max_cell_mass": summary.max_cell_mass,
        "out_of_window_fraction": summary.out_of_window_fraction,
        "min_distance_to_origin": summary.min_distance_to_origin,
    }
    manifest = Manifest("vdp2d", config_echo, seed) if args.out else None
    if args.out:
        dens = hist.densities()
        rows = []
        for i in range(hist.n):
            for j in range(hist.n):
                rows.append((hist.lo + (i + 0.5) * hist.cell,
                             hist.lo + (j + 0.5) * hist.cell, dens[i, j]))
        csv_path = args.out + ".csv"
        _write_csv(csv_path, ["x_cell", "y_cell", "density"], rows)
        manifest.add_output(csv_path)
        if not args.no_plot:
            from .report import save_vdp_figure

            fig = save_vdp_figure(hist, args.out + ".png", title=f"c={c}")
            manifest.add_output(fig)
    _emit_json(doc, (args.out + ".json") if args.out else None, manifest,
               (args.out + ".manifest.json") if args.out else None)
    if manifest:
        manifest.write(args.out + ".manifest.json")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", help="builtin model name (brownian, ou, double-well, root-diffusion)")
    p.add_argument("--c", type=float, help="model noise parameter where applicable")
    p.add_argument("--spec-file", help="JSON spec file (overrides --model)")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its entries")
    p.add_argument("--seed", type=int, help="master seed (default: env DEGDIFF_SEED or 0)")
    p.add_argument("--out", help="output path stem; JSON goes to stdout when omitted")
    p.add_argument("--no-plot", action="store_true", help="skip figure rendering")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="degdiff",
        description="Classify and simulate one-dimensional diffusions with degenerate coefficients.",
    )
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("classify", help="boundary natures and ergodic verdict per subinterval")
    _add_model_flags(p)
    _add_common(p)
    p.add_argument("--x0", type=float, help="start point for the random-limit probability")
    p.add_argument("--strict", action="store_true",
                   help="exit 4 when any verdict is inconclusive")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("lyapunov-check", help="grid check of a Lyapunov-style criterion")
    _add_model_flags(p)
    _add_common(p)
    p.add_argument("--candidate", choices=sorted(_CANDIDATES), help="certificate function")
    p.add_argument("--check", choices=["repulsive", "strongly-repulsive", "attractive", "euler"])
    p.add_argument("--epsilon", type=float, help="margin for the strongly-repulsive check")
    p.add_argument("--delta", type=float, help="degenerate point (default: declared one)")
    p.add_argument("--radius", type=float, help="neighborhood radius (default 1)")
    p.add_argument("--side", type=int, choices=[-1, 1], help="side of delta (default +1)")
    p.add_argument("--grid-n", type=int, help="grid points (default 2048)")
    p.set_defaults(func=cmd_lyapunov_check)

    p = sub.add_parser("simulate", help="run the decreasing-step Euler scheme")
    _add_model_flags(p)
    _add_common(p)
    p.add_argument("--x0", type=float, help="start point (default 1)")
    p.add_argument("--n-steps", type=int, help="number of steps (default 1e5)")
    p.add_argument("--gamma0", type=float, help="step scale (default 1)")
    p.add_argument("--step-r", type=float, help="step exponent (default 1/3)")
    p.add_argument("--step-family", choices=["polynomial", "logarithmic"])
    p.add_argument("--noise", choices=["gaussian", "rademacher"])
    p.add_argument("--thin", type=int, help="record every k-th step into the CSV path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("density", help="weighted occupation histogram vs the predicted density")
    _add_model_flags(p)
    _add_common(p)
    p.add_argument("--x0", type=float)
    p.add_argument("--n-steps", type=int, help="default 1e6")
    p.add_argument("--gamma0", type=float)
    p.add_argument("--step-r", type=float)
    p.add_argument("--step-family", choices=["polynomial", "logarithmic"])
    p.add_argument("--noise", choices=["gaussian", "rademacher"])
    p.add_argument("--range-lo", type=float, help="histogram window (default [-2, 8])")
    p.add_argument("--range-hi", type=float)
    p.add_argument("--bins", type=int, help="default 200")
    p.add_argument("--eta-family", choices=["constant", "polynomial"])
    p.add_argument("--eta0", type=float)
    p.add_argument("--eta-s", type=float)
    p.add_argument("--replicas", type=int, help="independent chains to merge (default 1)")
    p.add_argument("--threads", type=int, help="worker threads for replicas (default 1)")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("hitprob", help="probability of reaching b before a from x")
    _add_model_flags(p)
    _add_common(p)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--reference", type=float, help="reference point selecting the subinterval")
    p.add_argument("--mc-paths", type=int, help="also run a constant-step Monte-Carlo check")
    p.add_argument("--mc-gamma", type=float, help="MC step size (default 1e-4)")
    p.set_defaults(func=cmd_hitprob)

    p = sub.add_parser("exit-time", help="expected exit time of ]a, b[ from x")
    _add_model_flags(p)
    _add_common(p)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--reference", type=float)
    p.add_argument("--green", action="store_true", help="cross-check via the Green function")
    p.set_defaults(func=cmd_exit_time)

    p = sub.add_parser("vdp2d", help="2D perturbed Van der Pol occupation histogram")
    _add_common(p)
    p.add_argument("--c", type=float, help="noise level (default 0.5)")
    p.add_argument("--n-steps", type=int, help="default 1e6")
    p.set_defaults(func=cmd_vdp2d)

    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (DivergenceError, EvaluationError, UnsupportedIntegrandError,
            ZeroDivisionError, ArithmeticError) as err:
        print(f"numeric failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InvalidSpecError, FileNotFoundError, json.JSONDecodeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
