"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the per-criterion lines.
The heavy simulation criteria use fixed seeds, so every run is reproducible.
"""

import json
import math
import time

import numpy as np
import pytest

import degdiff as dd
from degdiff.cli import main as cli_main
from degdiff.feller import Nature


class criterion:
    """Prints '[ACCEPTANCE n] PASS/FAIL - desc' when the enclosed checks finish."""

    def __init__(self, n, desc):
        self.n = n
        self.desc = desc

    def __enter__(self):
        self.t0 = time.monotonic()
        return self

    def __exit__(self, exc_type, exc, tb):
        status = "PASS" if exc_type is None else "FAIL"
        dt = time.monotonic() - self.t0
        print(f"[ACCEPTANCE {self.n}] {status} ({dt:.1f}s) - {self.desc}")
        return False


STEPS = dd.StepSequence("polynomial", 1.0, 1.0 / 3.0)
GAUSS = dd.NoiseModel("gaussian")


def test_criterion_1_boundary_classification_matches_reference_example():
    with criterion(1, "double-well natures for c in {0.5, 1.0, 1.5} in under 10 s"):
        expected_at_zero = {0.5: Nature.STRONGLY_REPULSIVE, 1.0: Nature.REPULSIVE,
                            1.5: Nature.ATTRACTIVE}
        t0 = time.monotonic()
        for c, want in expected_at_zero.items():
            spec = dd.double_well(c)
            for cref, far_end in ((1.0, math.inf), (-1.0, -math.inf)):
                table = dd.build_scale_speed(spec, cref)
                assert dd.classify_boundary(table, 0.0).nature is want, (c, cref)
                assert dd.classify_boundary(table, far_end).nature is Nature.STRONGLY_REPULSIVE
        assert time.monotonic() - t0 < 10.0


def test_criterion_2_attractive_case_with_finite_speed_measure():
    with criterion(2, "root model c=1.2: attractive at 0, speed integral = 50/7 to 1e-6"):
        table = dd.build_scale_speed(dd.root_diffusion(1.2), 1.0)
        verdict = dd.classify_boundary(table, 0.0)
        assert verdict.nature is Nature.ATTRACTIVE
        sv = dd.improper_limit(table.m, 0.0, 1.0)
        assert sv.is_finite
        assert abs(sv.value - 50.0 / 7.0) <= 1e-6 * (50.0 / 7.0)


def exact_exponent_oracle(beta, varsigma, c_b, c_sigma):
    """Independent brute-force classification from the integral asymptotics.

    Near the degenerate point 2b/sigma^2 ~ a * x^e with a = 2 c_b / c_sigma^2
    and e = beta - 2 varsigma.  Integrating exactly:

    * e > -1: the scale derivative tends to a constant, its primitive is finite
      -> attractive;
    * e = -1: scale derivative ~ x^-a: a < 1 integrable -> attractive; a >= 1
      -> repulsive, and the speed density ~ x^(a - 2 varsigma) is integrable
      iff a > 2 varsigma - 1 -> strongly repulsive exactly then;
    * e < -1: the scale derivative blows up faster than any power -> repulsive,
      while the speed density vanishes faster than any power -> strongly
      repulsive.
    """
    a = 2.0 * c_b / (c_sigma * c_sigma)
    e = beta - 2.0 * varsigma
    if e > -1.0:
        return Nature.ATTRACTIVE
    if e == -1.0:
        if a < 1.0:
            return Nature.ATTRACTIVE
        if a > 2.0 * varsigma - 1.0:
            return Nature.STRONGLY_REPULSIVE
        return Nature.REPULSIVE
    return Nature.STRONGLY_REPULSIVE


def test_criterion_3_powerlaw_oracle_agreement():
    with criterion(3, "exact power-law classification vs independent oracle on 200 profiles"):
        rng = np.random.default_rng(2024)
        profiles = []
        for _ in range(50):  # exponent gap clearly positive (beta > 1 since varsigma >= 1)
            beta = rng.uniform(1.1, 4.0)
            varsigma = rng.uniform(1.0, 1.0 + (beta - 1.0) / 2.0 * 0.9)
            profiles.append((beta, varsigma, rng.uniform(0.1, 3.0), rng.uniform(0.1, 3.0)))
        for _ in range(50):  # gap exactly 0 (beta = 2 varsigma - 1 is float-exact), noise above threshold
            varsigma = rng.uniform(1.0, 2.0)
            beta = 2.0 * varsigma - 1.0
            c_b = rng.uniform(0.1, 3.0)
            profiles.append((beta, varsigma, c_b,
                             math.sqrt(2.0 * c_b) * rng.uniform(1.05, 2.0)))
        for _ in range(50):  # gap 0 at beta = varsigma = 1, noise below the threshold
            c_b = rng.uniform(0.1, 3.0)
            profiles.append((1.0, 1.0, c_b, math.sqrt(2.0 * c_b) * rng.uniform(0.3, 0.95)))
        for _ in range(50):  # gap clearly negative with beta <= 1, noise at or below threshold
            beta = rng.uniform(0.1, 1.0)
            varsigma = rng.uniform(1.0 + beta / 2.0 * 0.1 + 0.05, 2.5)
            c_b = rng.uniform(0.1, 3.0)
            profiles.append((beta, varsigma, c_b,
                             math.sqrt(2.0 * c_b) * rng.uniform(0.3, 1.0)))
        assert len(profiles) == 200

        checked = 0
        for beta, varsigma, c_b, c_sigma in profiles:
            profile = dd.PowerLawProfile(0.0, beta=beta, varsigma=varsigma,
                                         c_b=c_b, c_sigma=c_sigma)
            got = dd.classify_powerlaw(profile).nature
            assert got is not Nature.UNKNOWN, (beta, varsigma, c_b, c_sigma)
            want = exact_exponent_oracle(beta, varsigma, c_b, c_sigma)
            assert got is want, (beta, varsigma, c_b, c_sigma, got, want)
            checked += 1
        assert checked == 200


def test_criterion_4_hitting_probability_quadrature_and_monte_carlo():
    with criterion(4, "Brownian hitting probability: quadrature 1/3 to 1e-10, MC within 0.03"):
        table = dd.build_scale_speed(dd.brownian(), 0.0)
        u = dd.hitting_probability(table, 0.0, -1.0, 2.0)
        assert abs(u - 1.0 / 3.0) <= 1e-10
        p = dd.mc_hitting_probability(dd.brownian(), 0.0, -1.0, 2.0,
                                      n_paths=10_000, gamma=1e-4, seed=2024)
        assert abs(p - 1.0 / 3.0) <= 0.03


def test_criterion_5_exit_times_and_green_cross_check():
    with criterion(5, "exit time 1 at 1e-8 and direct = Green on 50 random triples"):
        bm = dd.build_scale_speed(dd.brownian(), 0.0)
        assert abs(dd.expected_exit_time(bm, 0.0, -1.0, 1.0) - 1.0) <= 1e-8
        ou = dd.build_scale_speed(dd.ornstein_uhlenbeck(), 0.0)
        rng = np.random.default_rng(5)
        done = 0
        while done < 50:
            a, x, b = np.sort(rng.uniform(-2.0, 2.0, 3))
            if x - a < 1e-2 or b - x < 1e-2:
                continue
            table = bm if done % 2 == 0 else ou
            direct = dd.expected_exit_time(table, float(x), float(a), float(b))
            green = dd.green_exit_time(table, float(x), float(a), float(b))
            assert abs(direct - green) <= 1e-7 * max(1.0, abs(direct)), (a, x, b)
            done += 1


def test_criterion_6_crossings_stop_under_decreasing_steps():
    with criterion(6, "c=0.75, 1e6 steps x 20 seeds: late crossings in at most 2 runs"):
        t0 = time.monotonic()
        spec = dd.double_well(0.75)
        late_runs = 0
        for seed in range(20):
            chain = dd.make_chain(spec, STEPS, GAUSS, 1.0, seed=seed)
            s = dd.simulate(chain, 1_000_000)
            if s.last_crossing_index is not None and s.last_crossing_index > 100_000:
                late_runs += 1
        assert late_runs <= 2, late_runs
        assert time.monotonic() - t0 <= 240.0


def test_criterion_7_invariant_density_reproduction():
    with criterion(7, "c=0.5, 1e6 steps: one-sided mass >= 0.99 and side L1 <= 0.15"):
        spec = dd.double_well(0.5)
        hist = dd.WeightedHistogram(-2.0, 8.0, 200)
        chain = dd.make_chain(spec, STEPS, GAUSS, 1.0, seed=2024)
        dd.simulate(chain, 1_000_000, observers=[dd.HistogramObserver(hist)])
        lm, rm = dd.side_mass(hist, 0.0)
        assert max(lm, rm) >= 0.99, (lm, rm)
        side = 1 if rm >= lm else -1
        table = dd.build_scale_speed(spec, 1.0 if side > 0 else -1.0)
        ref = dd.ReferenceDensity.from_table(table)
        l1 = dd.side_l1_distance(hist, ref, 0.0, side)
        assert l1 <= 0.15, l1


def test_criterion_8_dirac_collapse_at_critical_noise():
    with criterion(8, "c=1.0, 1e6 steps: occupation mass of [-0.25, 0.25] >= 0.8"):
        spec = dd.double_well(1.0)
        hist = dd.WeightedHistogram(-2.0, 8.0, 200)
        chain = dd.make_chain(spec, STEPS, GAUSS, 1.0, seed=2024)
        dd.simulate(chain, 1_000_000, observers=[dd.HistogramObserver(hist)])
        assert hist.mass_between(-0.25, 0.25) >= 0.8


def test_criterion_9_generator_identity_two_forms():
    with criterion(9, "generator identity for sin on the OU model within 1e-4"):
        table = dd.build_scale_speed(dd.ornstein_uhlenbeck(), 0.0)
        spec = table.spec
        h = 1e-4
        worst = 0.0
        for x in np.linspace(-2.0, 2.0, 81):
            x = float(x)
            direct = spec.drift(x) * math.cos(x) - 0.5 * math.sin(x)
            ratio = lambda y: math.cos(y) / table.p_prime(y)
            alt = (ratio(x + h) - ratio(x - h)) / (2.0 * h) / table.m(x)
            worst = max(worst, abs(direct - alt))
        assert worst <= 1e-4, worst


def test_criterion_10_canonical_lyapunov_constructions():
    with criterion(10, "A(p - p(c)) = 0 to 1e-6 and AV = -1 to 1e-4 on OU and double-well"):
        cases = [
            (dd.build_scale_speed(dd.ornstein_uhlenbeck(), 0.0), math.inf,
             np.linspace(0.5, 3.0, 25)),
            (dd.build_scale_speed(dd.double_well(0.5), 1.0), 0.0,
             np.geomspace(0.05, 0.9, 25)),
        ]
        for table, endpoint, grid in cases:
            spec = table.spec
            v0 = dd.canonical_repulsive_V(table, endpoint)
            v1 = dd.canonical_strong_V(table, endpoint)
            for x in grid:
                x = float(x)
                a0 = dd.generator_apply(spec, v0.v, v0.v_prime, v0.v_second, x)
                assert abs(a0) <= 1e-6, (spec.name, x, a0)
                a1 = dd.generator_apply(spec, v1.v, v1.v_prime, v1.v_second, x)
                assert abs(a1 + 1.0) <= 1e-4, (spec.name, x, a1)


def test_criterion_11_van_der_pol_noise_sweep():
    with criterion(11, "VdP 1e6 steps: origin block mass grows from c=0.5 to c=0.8"):
        t0 = time.monotonic()
        h5, s5 = dd.simulate_vdp(dd.VdpConfig(c=0.5, n_steps=1_000_000), seed=2024)
        h8, s8 = dd.simulate_vdp(dd.VdpConfig(c=0.8, n_steps=1_000_000), seed=2024)
        assert s8.origin_block_mass > s5.origin_block_mass
        for h in (h5, h8):
            assert not np.isnan(h.weights).any()
            total = h.weights.sum() + h.out_of_range_weight
            assert abs(total - h.total_weight) <= 1e-9 * h.total_weight
        assert time.monotonic() - t0 <= 300.0


def test_criterion_12_cli_reruns_are_byte_identical(tmp_path):
    with criterion(12, "repeated CLI run with the same manifest: byte-identical CSV"):
        args = ["density", "--model", "double-well", "--c", "0.5", "--seed", "7",
                "--n-steps", "50000", "--no-plot"]
        a, b = tmp_path / "first", tmp_path / "again"
        assert cli_main(args + ["--out", str(a)]) == 0
        # second run resolves its configuration from the first run's manifest
        assert cli_main(["density", "--config", str(a) + ".manifest.json",
                         "--out", str(b), "--no-plot"]) == 0
        assert a.with_suffix(".csv").read_bytes() == b.with_suffix(".csv").read_bytes()
        manifest_a = json.loads((tmp_path / "first.manifest.json").read_text())
        manifest_b = json.loads((tmp_path / "again.manifest.json").read_text())
        assert manifest_a["config"] == manifest_b["config"]
        assert manifest_a["outputs"]["first.csv"] == manifest_b["outputs"]["again.csv"]
