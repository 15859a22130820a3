"""Diffusion model specifications and built-in example models.

A :class:`DiffusionSpec` bundles the drift ``b`` and diffusion coefficient
``sigma`` of a one-dimensional SDE on an open interval, together with the
interior points where both coefficients vanish simultaneously (the degenerate
points that split the state space into invariant pieces).

Coefficients are plain callables; the analysis layers only ever need point
evaluation and, near a degenerate point, the local power-law exponents.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "Interval",
    "DiffusionSpec",
    "PowerLawProfile",
    "GrowthBounds",
    "ValidationReport",
    "InvalidSpecError",
    "ConstructionError",
    "validate_spec",
    "brownian",
    "ornstein_uhlenbeck",
    "double_well",
    "root_diffusion",
    "make_powerlaw_spec",
    "estimate_powerlaw",
    "spec_from_json",
    "spec_to_json",
    "builtin_spec",
]

Coefficient = Callable[[float], float]


class InvalidSpecError(ValueError):
    """A diffusion specification violates a structural requirement."""


class ConstructionError(ValueError):
    """A derived model could not be assembled (e.g. discontinuous glue)."""


@dataclass(frozen=True)
class Interval:
    """Open interval ]left, right[ with endpoints in the extended reals."""

    left: float
    right: float

    def __post_init__(self):
        if math.isnan(self.left) or math.isnan(self.right):
            raise InvalidSpecError("interval endpoints must not be NaN")
        if not self.left < self.right:
            raise InvalidSpecError(
                f"empty interval: left={self.left} right={self.right}"
            )

    def contains(self, x: float) -> bool:
        return self.left < x < self.right

    def finite_window(self, half_width: float = 10.0) -> tuple[float, float]:
        """A finite sub-window used for grid sampling on unbounded intervals."""
        lo = self.left if math.isfinite(self.left) else -half_width
        hi = self.right if math.isfinite(self.right) else half_width
        if not lo < hi:  # interval lies entirely outside [-W, W]
            lo, hi = self.left, self.right
            if not math.isfinite(lo):
                lo = hi - 2 * half_width
            if not math.isfinite(hi):
                hi = lo + 2 * half_width
        return lo, hi


@dataclass(frozen=True)
class PowerLawProfile:
    """Local model b(x) = sgn(x-delta) c_b |x-delta|^beta, sigma = c_sigma |x-delta|^varsigma."""

    delta: float
    beta: float
    varsigma: float
    c_b: float
    c_sigma: float

    def __post_init__(self):
        if self.beta <= 0 or self.c_b <= 0 or self.c_sigma <= 0:
            raise InvalidSpecError("power-law profile requires positive beta, c_b, c_sigma")
        if self.varsigma < 1.0:
            raise InvalidSpecError("power-law profile requires varsigma >= 1")

    def drift(self, x: float) -> float:
        r = x - self.delta
        return math.copysign(self.c_b * abs(r) ** self.beta, r) if r != 0.0 else 0.0

    def sigma(self, x: float) -> float:
        return self.c_sigma * abs(x - self.delta) ** self.varsigma


@dataclass(frozen=True)
class GrowthBounds:
    """Constants for the growth check b(x)^2 <= C_b(1+|x|), sigma(x)^2 <= C_sigma(1+|x|)."""

    C_b: float
    C_sigma: float

    def __post_init__(self):
        if self.C_b <= 0 or self.C_sigma <= 0:
            raise InvalidSpecError("growth bounds must be positive")


@dataclass(frozen=True)
class DiffusionSpec:
    """Drift/diffusion pair on an open interval with declared degenerate points.

    ``degenerate_points`` lists the interior points where drift and sigma both
    vanish; sigma must be nonzero everywhere else in the interior.  Optional
    metadata: a local power-law profile near a degenerate point and growth
    bounds for the coefficients.
    """

    name: str
    drift: Coefficient
    sigma: Coefficient
    interval: Interval = field(default_factory=lambda: Interval(-math.inf, math.inf))
    degenerate_points: tuple[float, ...] = ()
    local_profile: PowerLawProfile | None = None
    growth: GrowthBounds | None = None
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        pts = tuple(float(p) for p in self.degenerate_points)
        object.__setattr__(self, "degenerate_points", pts)
        for p in pts:
            if not self.interval.contains(p):
                raise InvalidSpecError(f"degenerate point {p} not interior to {self.interval}")
        if any(b >= a for a, b in zip(pts[1:], pts[:-1])) or list(pts) != sorted(set(pts)):
            raise InvalidSpecError("degenerate points must be strictly increasing")

    def sigma2(self, x: float) -> float:
        s = self.sigma(x)
        return s * s

    def subintervals(self) -> list[Interval]:
        """The maximal subintervals on which sigma does not vanish."""
        cuts = [self.interval.left, *self.degenerate_points, self.interval.right]
        return [Interval(a, b) for a, b in zip(cuts[:-1], cuts[1:])]


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[str, ...]

    def __bool__(self) -> bool:
        return self.ok


def validate_spec(
    spec: DiffusionSpec,
    grid_size: int = 10_000,
    growth: GrowthBounds | None = None,
) -> ValidationReport:
    """Grid-check the standing assumptions on a diffusion specification.

    Samples ``grid_size`` interior points (on a finite window for unbounded
    intervals) and reports: non-finite coefficient values, zeros or sign
    changes of sigma away from the declared degenerate points, degenerate
    points where the coefficients do not actually vanish, and growth-bound
    violations when bounds are supplied (explicitly or on the spec).
    """
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    growth = growth or spec.growth
    lo, hi = spec.interval.finite_window()
    span = hi - lo
    # strictly interior samples
    xs = np.linspace(lo + span * 1e-9, hi - span * 1e-9, grid_size)
    violations: list[str] = []

    deltas = np.asarray(spec.degenerate_points, dtype=float)

    def near_delta(a: float, b: float) -> bool:
        return bool(deltas.size) and bool(np.any((deltas >= min(a, b)) & (deltas <= max(a, b))))

    svals = np.empty(grid_size)
    for i, x in enumerate(xs):
        bx = spec.drift(float(x))
        sx = spec.sigma(float(x))
        svals[i] = sx
        if not math.isfinite(bx):
            violations.append(f"drift not finite at x={x:.6g}")
        if not math.isfinite(sx):
            violations.append(f"sigma not finite at x={x:.6g}")
        elif sx == 0.0 and not (deltas.size and np.any(np.isclose(deltas, x, atol=span * 1e-9))):
            violations.append(f"sigma vanishes at undeclared point x={x:.6g}")
        if growth is not None and math.isfinite(bx) and math.isfinite(sx):
            cap_b = growth.C_b * (1.0 + abs(x))
            cap_s = growth.C_sigma * (1.0 + abs(x))
            if bx * bx > cap_b:
                violations.append(f"growth bound b^2 <= C_b(1+|x|) violated at x={x:.6g}")
            if sx * sx > cap_s:
                violations.append(f"growth bound sigma^2 <= C_sigma(1+|x|) violated at x={x:.6g}")
        if len(violations) > 50:
            violations.append("... further violations suppressed")
            return ValidationReport(False, tuple(violations))
    # a sign change of the continuous sigma between neighbours implies a zero between them
    sign = np.sign(svals)
    for i in np.nonzero(sign[:-1] * sign[1:] < 0)[0]:
        if not near_delta(xs[i], xs[i + 1]):
            violations.append(
                f"sigma changes sign (zero of sigma) in ({xs[i]:.6g}, {xs[i+1]:.6g}) "
                "away from declared degenerate points"
            )
    for d in deltas:
        if abs(spec.drift(float(d))) > 1e-12 or abs(spec.sigma(float(d))) > 1e-12:
            violations.append(f"declared degenerate point {d:.6g} has nonzero coefficients")
    return ValidationReport(not violations, tuple(violations))


# ---------------------------------------------------------------------------
# built-in models


def brownian() -> DiffusionSpec:
    """Standard Brownian motion on the real line: b = 0, sigma = 1."""
    return DiffusionSpec("brownian", lambda x: 0.0, lambda x: 1.0)


def ornstein_uhlenbeck() -> DiffusionSpec:
    """Ornstein-Uhlenbeck process: b(x) = -x/2, sigma = 1 on the real line."""
    return DiffusionSpec("ou", lambda x: -0.5 * x, lambda x: 1.0)


def _double_well_drift(x: float) -> float:
    # gradient drift of a double-well potential with minima at -3 and 3;
    # cubic inside |x| <= 3, linear pull-back outside, continuous at |x| = 3
    if x >= 3.0:
        return -2.0 * (x - 3.0)
    if x <= -3.0:
        return -2.0 * (x + 3.0)
    return x * 0.5 - x * x * x / 18.0


def double_well(c: float) -> DiffusionSpec:
    """Double-well drift with multiplicative noise sigma(x) = c*x, degenerate at 0.

    The drift pushes toward +-3 and vanishes at -3, 0, 3; the noise vanishes
    at 0 only, so 0 is the single degenerate point.  Requires 0 < c < 2 (the
    regime where +-infinity stay strongly repulsive).
    """
    if not 0.0 < c < 2.0:
        raise InvalidSpecError(f"double_well requires c in (0, 2), got {c}")
    return DiffusionSpec(
        "double-well",
        _double_well_drift,
        lambda x, _c=c: _c * x,
        Interval(-math.inf, math.inf),
        degenerate_points=(0.0,),
        local_profile=PowerLawProfile(0.0, beta=1.0, varsigma=1.0, c_b=0.5, c_sigma=c),
        params={"c": c},
    )


def root_diffusion(c: float) -> DiffusionSpec:
    """b(x) = sqrt(x)/2, sigma(x) = c*x^(3/4) on ]0, +inf[.

    For c in ]1, sqrt(2)[ the endpoint 0 is attractive while the speed measure
    stays finite near 0; a compact test bed for the attractive/attainable
    distinction.
    """
    if c <= 0:
        raise InvalidSpecError("root_diffusion requires c > 0")
    return DiffusionSpec(
        "root-diffusion",
        lambda x: 0.5 * math.sqrt(x) if x > 0 else 0.0,
        lambda x, _c=c: _c * x ** 0.75 if x > 0 else 0.0,
        Interval(0.0, math.inf),
        params={"c": c},
    )


_BUILTINS: dict[str, Callable[..., DiffusionSpec]] = {
    "brownian": brownian,
    "ou": ornstein_uhlenbeck,
    "double-well": double_well,
    "root-diffusion": root_diffusion,
}


def builtin_spec(name: str, **params) -> DiffusionSpec:
    """Instantiate a built-in model by name ('brownian', 'ou', 'double-well', 'root-diffusion')."""
    try:
        factory = _BUILTINS[name]
    except KeyError:
        raise InvalidSpecError(f"unknown builtin model {name!r}; have {sorted(_BUILTINS)}") from None
    return factory(**params)


# ---------------------------------------------------------------------------
# power-law construction


def make_powerlaw_spec(
    profile: PowerLawProfile,
    outer: DiffusionSpec | None = None,
    radius: float = 1.0,
    blend_frac: float = 0.01,
    glue_tol: float = 1e-3,
    interval: Interval | None = None,
) -> DiffusionSpec:
    """Spec equal to the power-law profile within ``radius`` of delta, glued to ``outer`` beyond.

    The glue is a linear blend over the band ``[radius*(1-blend_frac), radius]``.
    If the outer coefficients differ from the local ones at the junction by more
    than ``glue_tol`` (relative), the construction is rejected.  With no
    ``outer`` the power-law formulas extend to the whole interval.
    """
    if radius <= 0 or not 0 < blend_frac < 1:
        raise ConstructionError("radius must be positive and blend_frac in (0,1)")
    d = profile.delta
    if interval is None:
        interval = outer.interval if outer is not None else Interval(-math.inf, math.inf)
    if not interval.contains(d):
        raise InvalidSpecError(f"delta {d} not interior to {interval}")

    if outer is None:
        return DiffusionSpec(
            "powerlaw",
            profile.drift,
            profile.sigma,
            interval,
            degenerate_points=(d,),
            local_profile=profile,
            params={"beta": profile.beta, "varsigma": profile.varsigma,
                    "c_b": profile.c_b, "c_sigma": profile.c_sigma, "delta": d,
                    "radius": radius},
        )

    inner_edge = radius * (1.0 - blend_frac)
    for side in (-1.0, 1.0):
        edge = d + side * radius
        if not interval.contains(edge):
            continue
        for inner_f, outer_f, label in (
            (profile.drift, outer.drift, "drift"),
            (profile.sigma, outer.sigma, "sigma"),
        ):
            vi, vo = inner_f(edge), outer_f(edge)
            scale = max(1.0, abs(vi), abs(vo))
            if abs(vi - vo) > glue_tol * scale:
                raise ConstructionError(
                    f"{label} glue mismatch at x={edge:.6g}: local={vi:.6g} outer={vo:.6g}"
                )

    def blend(inner_f: Coefficient, outer_f: Coefficient) -> Coefficient:
        def f(x: float) -> float:
            r = abs(x - d)
            if r <= inner_edge:
                return inner_f(x)
            if r >= radius:
                return outer_f(x)
            t = (r - inner_edge) / (radius - inner_edge)
            return (1.0 - t) * inner_f(x) + t * outer_f(x)

        return f

    degs = tuple(sorted(set(outer.degenerate_points) | {d}))
    return DiffusionSpec(
        f"powerlaw+{outer.name}",
        blend(profile.drift, outer.drift),
        blend(profile.sigma, outer.sigma),
        interval,
        degenerate_points=degs,
        local_profile=profile,
        params={"radius": radius, "outer": outer.name},
    )


def estimate_powerlaw(
    spec: DiffusionSpec,
    delta: float,
    side: int = 1,
    r_min: float = 1e-6,
    r_max: float = 1e-2,
    n: int = 64,
) -> PowerLawProfile:
    """Recover local power-law parameters from log-log slopes of |b| and sigma near delta.

    Samples a geometric grid of radii on the given side and fits straight lines
    in log-log space; exact for coefficients that are pure powers near delta.
    """
    rs = np.geomspace(r_min, r_max, n)
    xs = delta + side * rs
    bv = np.array([abs(spec.drift(float(x))) for x in xs])
    sv = np.array([abs(spec.sigma(float(x))) for x in xs])
    if np.any(bv <= 0) or np.any(sv <= 0):
        raise ValueError("coefficients must be nonzero on the sampling grid")
    lr = np.log(rs)
    beta, log_cb = np.polyfit(lr, np.log(bv), 1)
    varsigma, log_cs = np.polyfit(lr, np.log(sv), 1)
    if 1.0 - 1e-6 < varsigma < 1.0:  # absorb fit noise at the varsigma >= 1 edge
        varsigma = 1.0
    return PowerLawProfile(
        delta=delta,
        beta=float(beta),
        varsigma=float(varsigma),
        c_b=float(np.exp(log_cb)),
        c_sigma=float(np.exp(log_cs)),
    )


# ---------------------------------------------------------------------------
# JSON spec files


def _endpoint_to_json(x: float) -> float | str:
    if x == math.inf:
        return "inf"
    if x == -math.inf:
        return "-inf"
    return x


def _endpoint_from_json(v) -> float:
    return float(v)  # float() parses "inf" / "-inf" strings directly


def spec_to_json(spec: DiffusionSpec) -> dict:
    """JSON-serializable description of a built-in or power-law spec."""
    doc = {
        "name": spec.name,
        "interval": [_endpoint_to_json(spec.interval.left), _endpoint_to_json(spec.interval.right)],
        "degenerate_points": list(spec.degenerate_points),
    }
    if spec.name in _BUILTINS:
        doc["model"] = {"builtin": spec.name, "parameters": dict(spec.params)}
    elif spec.local_profile is not None:
        p = spec.local_profile
        doc["model"] = {
            "powerlaw": {
                "delta": p.delta, "beta": p.beta, "varsigma": p.varsigma,
                "c_b": p.c_b, "c_sigma": p.c_sigma,
            },
            "radius": spec.params.get("radius", 1.0),
        }
    else:
        raise ValueError(f"spec {spec.name!r} has no serializable model description")
    return doc


def spec_from_json(doc: dict | str) -> DiffusionSpec:
    """Load a spec from a JSON document (see :func:`spec_to_json` for the schema)."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    model = doc.get("model", {})
    if "builtin" in model:
        spec = builtin_spec(model["builtin"], **model.get("parameters", {}))
    elif "powerlaw" in model:
        profile = PowerLawProfile(**model["powerlaw"])
        interval = None
        if "interval" in doc:
            l, r = doc["interval"]
            interval = Interval(_endpoint_from_json(l), _endpoint_from_json(r))
        spec = make_powerlaw_spec(profile, radius=model.get("radius", 1.0), interval=interval)
    else:
        raise InvalidSpecError("spec document needs model.builtin or model.powerlaw")
    return spec
