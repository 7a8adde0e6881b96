import itertools

import numpy as np
import pytest

from pdo_lab.chsh import (
    ChainConfig,
    ChainMode,
    MeasurementSetting,
    chain_value,
    classical_max_bruteforce,
    default_settings,
    observable,
    optimize_settings,
    spatial_corr,
    temporal_corr,
    theory_curve,
)
from pdo_lab.errors import ConfigurationError, InvalidParameterError, ScaleLimitError
from pdo_lab.operators import X, Z

V_S = 0.982


def closed_form(mode, n, v):
    c = np.cos(np.pi / (2 * n))
    return {"temporal": 2 * n * c, "spatial": 2 * n * v * c, "hybrid": n * (1 + v) * c}[mode]


def grid_search_n2(weights, step_deg=1):
    """Oracle: exhaustive search over a degree grid, first angle pinned at 0 (rotation invariance)."""
    grid = np.deg2rad(np.arange(0, 360, step_deg))
    w = np.asarray(weights)
    best = -np.inf
    b = grid[:, None, None]
    c = grid[None, :, None]
    d = grid[None, None, :]
    vals = w[0] * np.cos(0 - b) + w[1] * np.cos(b - c) + w[2] * np.cos(c - d) - w[3] * np.cos(d - 0)
    best = max(best, vals.max())
    return float(best)


def test_observable_examples():
    assert np.allclose(observable(MeasurementSetting(0)), Z)
    assert np.allclose(observable(np.pi / 2), X)
    o = observable(np.pi / 4)
    assert np.allclose(o, (Z + X) / np.sqrt(2))
    assert np.allclose(o @ o, np.eye(2))


def test_spatial_corr_examples():
    assert abs(spatial_corr(0.3, 0.3, 1.0) - 1) < 1e-12
    for v in (0.0, 0.5, 1.0):
        assert abs(spatial_corr(0.1, 0.1 + np.pi / 2, v)) < 1e-12
    assert abs(spatial_corr(1.0, 1.0, V_S) - V_S) < 1e-12
    with pytest.raises(InvalidParameterError):
        spatial_corr(0, 0, 1.5)


def test_temporal_corr_examples():
    assert abs(temporal_corr(0.7, 0.7) - 1) < 1e-12
    assert abs(temporal_corr(0.2, 0.2 + np.pi) + 1) < 1e-12
    assert abs(temporal_corr(0, np.pi / 20) - 0.98768834059513777) < 1e-12


def test_spatial_and_temporal_share_the_same_expression():
    for ta, tb in itertools.product(np.linspace(-np.pi, np.pi, 10), repeat=2):
        assert abs(temporal_corr(ta, tb) - np.cos(ta - tb)) < 1e-12
        assert abs(spatial_corr(ta, tb, 1.0) - np.cos(ta - tb)) < 1e-12
        assert abs(spatial_corr(ta, tb, V_S) - V_S * np.cos(ta - tb)) < 1e-12


def test_default_settings():
    assert np.allclose([s.theta for s in default_settings(2)], [0, np.pi / 4, np.pi / 2, 3 * np.pi / 4])
    assert np.allclose(np.diff([s.theta for s in default_settings(3)]), np.pi / 6)
    with pytest.raises(ConfigurationError):
        default_settings(1)


def test_chain_value_examples():
    p = chain_value(ChainConfig(ChainMode.TEMPORAL, 2))
    assert abs(p.S - 2 * np.sqrt(2)) < 1e-12 and abs(p.delta_S - (2 * np.sqrt(2) - 2)) < 1e-12
    assert p.stderr == 0
    assert abs(chain_value(ChainConfig("spatial", 2, V_S)).S - V_S * 2 * np.sqrt(2)) < 1e-12
    assert abs(chain_value(ChainConfig("spatial", 2, V_S)).S - 2.7775) < 1e-4
    p = chain_value(ChainConfig("temporal", 10))
    assert abs(p.S - 20 * np.cos(np.pi / 20)) < 1e-9 and abs(p.S - 19.7538) < 1e-4


@pytest.mark.parametrize("mode", list(ChainMode))
@pytest.mark.parametrize("n", [2, 5, 13, 20])
def test_chain_value_matches_closed_form(mode, n):
    p = chain_value(ChainConfig(mode, n, V_S))
    assert abs(p.S - closed_form(mode.value, n, V_S)) < 1e-9
    assert abs(p.delta_S - (p.S - (2 * n - 2))) < 1e-12


def test_chain_config_errors():
    with pytest.raises(ConfigurationError):
        ChainConfig("temporal", 2, settings=(0.0, 0.1, 0.2))
    with pytest.raises(InvalidParameterError):
        ChainConfig("spatial", 2, visibility=-0.1)
    with pytest.raises(ValueError):
        ChainConfig("diagonal", 2)


def test_hybrid_uses_spatial_for_second_half_and_closing_term():
    # with V = 0 only the n temporal terms survive
    n = 4
    p = chain_value(ChainConfig("hybrid", n, 0.0))
    assert abs(p.S - n * np.cos(np.pi / (2 * n))) < 1e-12


@pytest.mark.parametrize("n,bound", [(2, 2), (3, 4), (4, 6), (5, 8), (6, 10)])
def test_classical_bruteforce(n, bound):
    assert classical_max_bruteforce(n) == bound


def test_classical_bruteforce_scale_limit():
    with pytest.raises(ScaleLimitError):
        classical_max_bruteforce(7)


def test_optimizer_n2_against_grid_oracle():
    oracle = grid_search_n2([1, 1, 1, 1])
    assert abs(oracle - 2 * np.sqrt(2)) < 1e-6
    _, s_t = optimize_settings(2, "temporal")
    _, s_s = optimize_settings(2, "spatial", 1.0)
    assert abs(s_t - oracle) < 1e-6
    assert abs(s_s - oracle) < 1e-6


def test_optimizer_n2_hybrid_against_grid_oracle():
    v = 0.9
    oracle = grid_search_n2([1, 1, v, v])
    _, s_h = optimize_settings(2, "hybrid", v)
    # the oracle grid is 1 degree; the optimizer can only do better
    assert s_h >= oracle - 1e-12
    assert s_h - oracle < 1e-3


@pytest.mark.parametrize("n", range(2, 9))
def test_default_settings_are_optimal_for_uniform_chains(n):
    default = chain_value(ChainConfig("temporal", n)).S
    _, s_max = optimize_settings(n, "temporal")
    assert abs(s_max - default) < 1e-6
    _, s_hyb = optimize_settings(n, "hybrid", 1.0)
    assert abs(s_hyb - s_max) < 1e-12


@pytest.mark.parametrize("mode", list(ChainMode))
@pytest.mark.parametrize("n", [2, 7, 12])
def test_optimizer_never_below_default(mode, n):
    default = chain_value(ChainConfig(mode, n, V_S)).S
    settings, s_max = optimize_settings(n, mode, V_S)
    assert s_max >= default - 1e-9
    assert len(settings) == 2 * n


def test_optimizer_range():
    with pytest.raises(ConfigurationError):
        optimize_settings(21, "temporal")


def test_temporal_violation_and_asymptote():
    pts = theory_curve("temporal", range(2, 21))
    d = np.array([p.delta_S for p in pts])
    assert np.all(d > 0) and np.all(np.diff(d) > 0)
    gap_ratio = [(2 * p.n - p.S) / p.n for p in pts]
    assert np.all(np.diff(gap_ratio) < 0)


def test_theory_curve_values():
    spatial = {p.n: p for p in theory_curve("spatial", range(2, 21), V_S)}
    hybrid = {p.n: p for p in theory_curve("hybrid", range(2, 21), V_S)}
    assert abs(spatial[10].delta_S - 1.398) < 1e-3
    assert abs(hybrid[10].delta_S - 1.576) < 1e-3
    assert abs(hybrid[16].delta_S - 1.559) < 1e-3
    plateau = [hybrid[n].delta_S for n in range(10, 17)]
    assert max(plateau) - min(plateau) < 0.03


def test_temporal_curve_ignores_visibility():
    a = theory_curve("temporal", [5], 0.5)[0]
    b = theory_curve("temporal", [5], 1.0)[0]
    assert a == b


@pytest.mark.parametrize("n", range(2, 21))
def test_mode_ordering(n):
    st, sh, ss = (chain_value(ChainConfig(m, n, V_S)).S for m in ("temporal", "hybrid", "spatial"))
    assert st >= sh >= ss


def test_theory_curve_range():
    with pytest.raises(ConfigurationError):
        theory_curve("spatial", [1, 2])
