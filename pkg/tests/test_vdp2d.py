import numpy as np
import pytest

import degdiff as dd


def test_truncated_drift_values():
    assert dd.vdp_drift_truncated(0.0, 0.0) == (0.0, 0.0)
    assert dd.vdp_drift_truncated(1.0, 1.0) == (1.0, -1.0)
    # truncation active: x^2 ^ 4 = 4
    assert dd.vdp_drift_truncated(3.0, 1.0) == (1.0, -6.0)


def test_sigma_componentwise():
    assert dd.vdp_sigma(0.0, 0.0, 0.9) == (0.0, 0.0)
    assert dd.vdp_sigma(1.0, -2.0, 0.5) == (0.5, -1.0)
    x, y = dd.vdp_sigma(2.0, 3.0, 0.8)
    assert x == pytest.approx(1.6) and y == pytest.approx(2.4)


def test_config_defaults_match_reference_run():
    cfg = dd.VdpConfig(c=0.5)
    assert cfg.gamma0 == 0.5 and cfg.r == pytest.approx(1.0 / 3.0)
    assert cfg.x0 == (1.0, 1.0) and cfg.n_steps == 1_000_000
    assert cfg.cell == 0.2 and (cfg.hist_lo, cfg.hist_hi) == (-3.0, 3.0)


def test_histogram2d_accounting_and_merge():
    h1 = dd.Histogram2D(-1.0, 1.0, 0.5)
    h2 = dd.Histogram2D(-1.0, 1.0, 0.5)
    h1.observe_block(np.array([0.1, 5.0]), np.array([0.1, 0.0]), np.ones(2))
    h2.observe_block(np.array([-0.9]), np.array([0.9]), np.array([2.0]))
    assert h1.out_of_range_weight == 1.0
    m = h1.merge(h2)
    assert m.total_weight == 4.0
    assert m.weights.sum() + m.out_of_range_weight == pytest.approx(4.0)
    with pytest.raises(ValueError):
        h1.merge(dd.Histogram2D(-1.0, 1.0, 0.25))


def test_block_mass_window():
    h = dd.Histogram2D(-1.0, 1.0, 0.5)
    h.observe_block(np.array([0.1]), np.array([0.1]), np.array([1.0]))
    assert h.cell_mass(0.1, 0.1) == 1.0
    assert h.block_mass(0.0, 0.0, 3) == 1.0


def test_simulation_deterministic_and_conservative():
    cfg = dd.VdpConfig(c=0.5, n_steps=20_000)
    h1, s1 = dd.simulate_vdp(cfg, seed=7)
    h2, s2 = dd.simulate_vdp(cfg, seed=7)
    assert np.array_equal(h1.weights, h2.weights)
    assert s1.final == s2.final
    assert not np.isnan(h1.weights).any()
    total = h1.weights.sum() + h1.out_of_range_weight
    assert total == pytest.approx(h1.total_weight, rel=1e-12)
    h3, _ = dd.simulate_vdp(cfg, seed=8)
    assert not np.array_equal(h1.weights, h3.weights)


def test_noise_free_flow_avoids_origin():
    cfg = dd.VdpConfig(c=0.0, n_steps=100_000)
    _, s = dd.simulate_vdp(cfg, seed=0)
    assert s.min_distance_to_origin > 0.0
    assert s.origin_cell_mass == pytest.approx(0.0)


def test_summary_fields_sane():
    cfg = dd.VdpConfig(c=0.6, n_steps=30_000)
    h, s = dd.simulate_vdp(cfg, seed=3)
    assert 0.0 <= s.origin_block_mass <= 1.0
    assert s.max_cell_mass >= s.origin_cell_mass >= 0.0
    assert 0.0 <= s.out_of_window_fraction < 1.0
    assert s.n_steps == 30_000


def test_config_validation():
    with pytest.raises(ValueError):
        dd.VdpConfig(c=-1.0)
    with pytest.raises(ValueError):
        dd.VdpConfig(c=0.5, n_steps=0)
