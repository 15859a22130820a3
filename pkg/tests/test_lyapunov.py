import math

import numpy as np
import pytest

import degdiff as dd
from degdiff.feller import Nature
from degdiff.lyapunov import default_grid
from degdiff.model import Interval


def quad_candidate(hi=3.0):
    return dd.LyapunovCandidate(
        lambda x: x * x, lambda x: 2.0 * x, lambda x: 2.0, Interval(0.0, hi), "x^2")


def xexp_candidate():
    return dd.LyapunovCandidate(
        lambda x: x * math.exp(x), lambda x: (1.0 + x) * math.exp(x),
        lambda x: (2.0 + x) * math.exp(x), Interval(0.0, 1.0), "x e^x")


def test_generator_apply_outer_double_well():
    # for V = (x - 3 sgn x)^2 on |x| >= 3 direct algebra gives
    # AV = -(4 - c^2) x^2 + 24 |x| - 36 (drift -2(x - 3 sgn x), noise c x)
    for c in (0.5, 1.0, 1.5):
        spec = dd.double_well(c)
        V = lambda x: (x - 3.0 * math.copysign(1.0, x)) ** 2
        Vp = lambda x: 2.0 * (x - 3.0 * math.copysign(1.0, x))
        Vpp = lambda x: 2.0
        for x in (3.0, 3.5, 5.0, -4.0, -7.5):
            got = dd.generator_apply(spec, V, Vp, Vpp, x)
            want = -(4.0 - c * c) * x * x + 24.0 * abs(x) - 36.0
            assert got == pytest.approx(want, rel=1e-12, abs=1e-12)
        # dominated by -(4-c^2)x^2 < 0 far out, as the strong-repulsivity
        # certificate for the infinite endpoints requires
        assert dd.generator_apply(spec, V, Vp, Vpp, 50.0) < -1.0


def test_generator_apply_inner_double_well():
    # Av = (1 + c^2) x^2 - x^4/9 for v = x^2 on 0 < x < 3
    for c in (0.5, 1.0, 1.5):
        spec = dd.double_well(c)
        for x in (0.2, 1.0, 2.5):
            got = dd.generator_apply(spec, lambda y: y * y, lambda y: 2 * y, lambda y: 2.0, x)
            want = (1.0 + c * c) * x * x - x ** 4 / 9.0
            assert got == pytest.approx(want, rel=1e-12)


def test_generator_annihilates_scale_function(ou_table):
    for x in np.linspace(-2, 2, 11):
        x = float(x)
        v = dd.generator_apply(ou_table.spec, ou_table.p, ou_table.p_prime,
                               ou_table.p_second, x)
        assert abs(v) < 1e-10


def test_check_repulsive_xexp_at_critical_noise():
    report = dd.check_repulsive(xexp_candidate(), dd.double_well(1.0), default_grid(0.0, 1.0))
    assert report.holds and report.worst_margin >= 0.0


def test_check_repulsive_fails_for_large_noise():
    report = dd.check_repulsive(quad_candidate(), dd.double_well(1.5), default_grid(0.0, 1.0))
    assert not report.holds and report.worst_margin < 0.0


def test_check_repulsive_brownian_half_line_agrees_with_classification():
    # 0 is attractive for Brownian motion on ]0, inf[ (the scale limit is finite),
    # so v = x must fail the repulsive check and pass the attractive one:
    # Av = 0 while sigma^2 (v')^2 / (2v) = 1/(2x) > 0
    cand = dd.LyapunovCandidate(lambda x: x, lambda x: 1.0, lambda x: 0.0,
                                Interval(0.0, 1.0), "x")
    half = dd.DiffusionSpec("bm-half", lambda x: 0.0, lambda x: 1.0,
                            Interval(0.0, math.inf))
    grid = default_grid(0.0, 1.0, n=64)
    assert not dd.check_repulsive(cand, half, grid).holds
    assert dd.check_attractive(cand, half, grid).holds
    table = dd.build_scale_speed(half, 1.0)
    assert dd.classify_boundary(table, 0.0).nature is Nature.ATTRACTIVE


def test_check_repulsive_zero_of_v_raises():
    cand = dd.LyapunovCandidate(lambda x: x - 0.5, lambda x: 1.0, lambda x: 0.0,
                                Interval(0.0, 1.0), "shifted")
    with pytest.raises(ZeroDivisionError):
        dd.check_repulsive(cand, dd.brownian(), np.array([0.25, 0.5, 0.75]))


def scaled_strong_grid(c):
    hi = 3.0 * math.sqrt((1.0 - c * c) / 2.0)
    return default_grid(0.0, hi * (1.0 - 1e-9))


@pytest.mark.parametrize("c", [0.5, 0.99])
def test_check_strongly_repulsive_holds_below_critical(c):
    eps = (1.0 - c * c) / 2.0
    report = dd.check_strongly_repulsive(
        quad_candidate(), dd.double_well(c), scaled_strong_grid(c), eps)
    assert report.holds, report


def test_check_strongly_repulsive_fails_above_critical():
    report = dd.check_strongly_repulsive(
        quad_candidate(), dd.double_well(1.5), default_grid(0.0, 0.5), 0.1)
    assert not report.holds


def test_check_strongly_repulsive_requires_positive_epsilon():
    with pytest.raises(ValueError):
        dd.check_strongly_repulsive(quad_candidate(), dd.double_well(0.5),
                                    default_grid(0.0, 0.5), 0.0)


def test_check_attractive():
    assert dd.check_attractive(quad_candidate(), dd.double_well(1.5),
                               default_grid(0.0, 0.5)).holds
    assert not dd.check_attractive(quad_candidate(), dd.double_well(0.5),
                                   default_grid(0.0, 0.5)).holds
    # Brownian motion, v = x^2 on (0,1): Av = 1 < 2 = right side
    report = dd.check_attractive(quad_candidate(), dd.brownian(), default_grid(0.0, 1.0))
    assert report.holds and report.worst_margin == pytest.approx(-1.0)


def test_check_euler_hypotheses_double_well():
    for c in (0.5, 0.75):
        report = dd.check_euler_hypotheses(quad_candidate(), dd.double_well(c),
                                           Interval(-0.5, 0.5))
        assert report.holds
        assert report.epsilon == pytest.approx(2.0 * c, rel=1e-6)


def test_check_euler_hypotheses_powerlaw():
    prof = dd.PowerLawProfile(0.0, beta=1.0, varsigma=1.0, c_b=0.5, c_sigma=0.8)
    spec = dd.make_powerlaw_spec(prof)
    report = dd.check_euler_hypotheses(quad_candidate(), spec, Interval(-0.5, 0.5))
    assert report.holds
    assert report.epsilon == pytest.approx(1.6, rel=1e-6)


def test_check_euler_hypotheses_unbounded_ratio_fails():
    # sigma = sqrt|x| makes |v' sigma| / v = 2 |x|^(-1/2) blow up at 0
    spec = dd.DiffusionSpec("rough", lambda x: x, lambda x: math.sqrt(abs(x)),
                            dd.Interval(-math.inf, math.inf), degenerate_points=(0.0,))
    report = dd.check_euler_hypotheses(quad_candidate(), spec, Interval(-0.5, 0.5))
    assert not report.holds
    assert report.epsilon is None


def test_canonical_repulsive_ou(ou_table):
    cand = dd.canonical_repulsive_V(ou_table, math.inf)
    for x in np.linspace(0.5, 3.0, 11):
        x = float(x)
        assert cand.v(x) > 0
        av = dd.generator_apply(ou_table.spec, cand.v, cand.v_prime, cand.v_second, x)
        assert abs(av) < 1e-10


def test_canonical_repulsive_brownian_is_linear(bm_table):
    cand = dd.canonical_repulsive_V(bm_table, math.inf)
    for x in (0.5, 1.0, 2.5):
        assert cand.v(x) == pytest.approx(x, abs=1e-12)  # p(x) - p(0) = x


def test_canonical_repulsive_unbounded_at_repulsive_origin(dw_tables):
    # at c = 1 the scale function diverges logarithmically toward 0, at c = 0.5
    # like x^-3; both canonical certificates must grow without bound
    cand_log = dd.canonical_repulsive_V(dw_tables[1.0], 0.0, c=0.5)
    vals = [cand_log.v(x) for x in (0.1, 0.01, 1e-3, 1e-4)]
    assert all(b > a for a, b in zip(vals[:-1], vals[1:]))
    cand_pow = dd.canonical_repulsive_V(dw_tables[0.5], 0.0, c=0.5)
    assert cand_pow.v(1e-3) > 1e6


def test_canonical_strong_ou(ou_table):
    cand = dd.canonical_strong_V(ou_table, math.inf)
    for x in np.linspace(0.5, 3.0, 13):
        x = float(x)
        av = dd.generator_apply(ou_table.spec, cand.v, cand.v_prime, cand.v_second, x)
        assert abs(av + 1.0) < 1e-4


def test_canonical_strong_double_well(dw_tables):
    cand = dd.canonical_strong_V(dw_tables[0.5], 0.0)
    for x in np.geomspace(0.05, 0.9, 13):
        x = float(x)
        av = dd.generator_apply(dw_tables[0.5].spec, cand.v, cand.v_prime, cand.v_second, x)
        assert abs(av + 1.0) < 1e-4
    # oriented toward the endpoint: nonnegative and increasing as x drops to 0
    assert cand.v(0.2) > cand.v(0.9) >= 0.0


def test_canonical_strong_rejects_infinite_speed_mass(bm_table):
    with pytest.raises(ValueError):
        dd.canonical_strong_V(bm_table, math.inf)


def test_ladder_matches_classification(dw_tables):
    for c, table in dw_tables.items():
        spec = table.spec
        candidates = {"repulsive": xexp_candidate(), "attractive": quad_candidate()}
        grids = {"repulsive": default_grid(0.0, 1.0), "attractive": default_grid(0.0, 0.5)}
        eps = 0.1
        if c < 1.0:
            candidates["strongly_repulsive"] = quad_candidate()
            grids["strongly_repulsive"] = scaled_strong_grid(c)
            eps = (1.0 - c * c) / 2.0
        nature = dd.lyapunov_classification(spec, candidates, grids, eps)
        assert nature is dd.classify_boundary(table, 0.0).nature, c


def test_log_transform_identity():
    # A(-ln v + L) = -Av/v + sigma^2 (v')^2 / (2 v^2), exact for analytic derivatives
    spec = dd.double_well(0.8)
    v, vp, vpp = lambda x: x * x, lambda x: 2.0 * x, lambda x: 2.0
    L = 5.0
    V = lambda x: -math.log(v(x)) + L
    Vp = lambda x: -vp(x) / v(x)
    Vpp = lambda x: (vp(x) ** 2 - vpp(x) * v(x)) / v(x) ** 2
    for x in np.geomspace(0.01, 2.0, 17):
        x = float(x)
        lhs = dd.generator_apply(spec, V, Vp, Vpp, x)
        av = dd.generator_apply(spec, v, vp, vpp, x)
        rhs = -av / v(x) + 0.5 * spec.sigma2(x) * vp(x) ** 2 / v(x) ** 2
        assert lhs == pytest.approx(rhs, rel=1e-8, abs=1e-12)
