import math

import numpy as np
import pytest

from ogp_lab import (
    LimitParams,
    critical_beta,
    critical_kernel_fraction,
    fpp_curve,
    free_energy_density,
    g_func,
    h_func,
    indep_tree_overlap_curve,
    internal_energy_density,
    limit_dag_overlap,
    limit_tree_overlap,
    rate_function,
    replica_overlap,
    tree_overlap_curve,
)
from ogp_lab.theory import overlap_cgf, typical_overlap_ge2

E_INV = math.exp(-1)

# values frozen from an independent truncated-series oracle (tail < 1e-10)
G_LOG2_LOG2 = 0.6146657987877036
H_ZERO_ONE = 0.7669883540794343
H_LOG_1_0p3 = 0.28096935287552327
REPLICA_E_INV = 0.4848291069956877
RBAR_STAR_0p3 = 0.4305733349922624


def test_g_boundary_branches():
    assert g_func(0.0, 2.3) == 1.0
    assert g_func(1.7, 0.0) == 0.0


def test_g_series_value():
    assert g_func(math.log(2), math.log(2)) == pytest.approx(G_LOG2_LOG2, abs=1e-9)


def test_g_tail_control():
    # two precisions agree to the coarser one
    a = g_func(1.3, 0.8, precision=1e-6)
    b = g_func(1.3, 0.8, precision=1e-12)
    assert abs(a - b) < 1e-6


def test_h_zero_branch():
    assert h_func(0.0, 1.0) == pytest.approx(H_ZERO_ONE, abs=1e-9)


def test_h_series_value():
    a = math.log(1 / 0.3)
    assert h_func(a, a) == pytest.approx(H_LOG_1_0p3, abs=1e-9)


def test_h_vanishing_condition_mass():
    # in the overlap limit, h * (1 - lam^gamma) -> 0 as the conditioning
    # mass vanishes
    for b in (1e-3, 1e-5):
        assert h_func(1.0, b) * (1 - math.exp(-b)) < 0.01


def test_limit_params_consistency():
    with pytest.raises(ValueError):
        LimitParams(lam=0.3, gamma=0.5, rho=0.8)
    with pytest.raises(ValueError):
        LimitParams(lam=0.5, delta=1.0)
    LimitParams(lam=0.0, delta=1.0)  # fine


def test_limit_tree_overlap_branches():
    assert limit_tree_overlap(LimitParams(lam=0.5, gamma=1.0)) == 1.0
    assert limit_tree_overlap(LimitParams(lam=0.5, gamma=0.0, rho=0.8)) == pytest.approx(0.1)
    assert limit_tree_overlap(LimitParams(lam=0.0, gamma=0.7)) == 0.7
    assert limit_tree_overlap(LimitParams(lam=1.0, gamma=0.7)) == 0.7


def test_tree_overlap_curve_continuity_in_gamma():
    # open-interval formula tends to the closed-branch values at both ends
    lam = 0.4
    assert tree_overlap_curve(lam, 1e-9, rho=1.0) == pytest.approx(
        tree_overlap_curve(lam, 0.0, rho=1.0), abs=1e-6
    )
    assert tree_overlap_curve(lam, 1 - 1e-9) == pytest.approx(1.0, abs=1e-5)


def test_tree_overlap_curve_numerical_continuity_scan():
    lam = 0.35
    grid = np.arange(0.001, 1.0, 1e-3)
    vals = np.array([tree_overlap_curve(lam, g) for g in grid])
    assert np.max(np.abs(np.diff(vals))) < 1e-2


def test_disorder_chaos_cap():
    # max over lambda of the gamma=0 curve equals 4/27 exactly at rho -> 1
    lams = np.linspace(0, 1, 100_001)
    vals = (1 - lams) * lams**2
    assert np.max(vals) == pytest.approx(4 / 27, abs=1e-8)
    assert max(tree_overlap_curve(l, 0.0, rho=1.0) for l in np.linspace(0.01, 0.99, 99)) <= 4 / 27 + 1e-12


def test_indep_overlap_curve():
    assert indep_tree_overlap_curve(0.5, 0.0) == 0.0
    assert indep_tree_overlap_curve(0.0, 0.5) == 0.0
    v = indep_tree_overlap_curve(0.3, 0.6)
    assert 0 < v < 1


def test_limit_dag_overlap_branches():
    assert limit_dag_overlap(LimitParams(lam=1.0, gamma=0.3, eta=1.0)) == 0.3
    assert limit_dag_overlap(LimitParams(lam=0.3, gamma=0.2, eta=math.inf)) == 0.2
    # consistency with full tree agreement at rho = 1, gamma = 1, eta = 0
    assert limit_dag_overlap(LimitParams(lam=0.5, gamma=1.0, rho=1.0, eta=0.0)) == pytest.approx(1.0)
    assert limit_dag_overlap(LimitParams(lam=0.5, gamma=0.0, rho=0.0, eta=0.5)) == 0.0


def test_free_energy_values():
    assert free_energy_density(0.3, 0.0, 2.0) == pytest.approx(-0.15)
    assert free_energy_density(0.3, 0.0, 0.5) == pytest.approx(0.7 - 2.0)
    assert free_energy_density(0.0, 1.0, 1.7) == pytest.approx(-1 / 1.7)
    assert free_energy_density(1.0, 0.0, 1.7) == pytest.approx(-1 / 1.7)


def test_free_energy_continuity_at_transition():
    for lam, delta in [(0.3, 0.0), (0.2, 0.4), (0.0, 0.6)]:
        b = 1 - delta
        lo = free_energy_density(lam, delta, b - 1e-9)
        hi = free_energy_density(lam, delta, b + 1e-9)
        assert lo == pytest.approx(hi, abs=1e-6)


def test_free_energy_monotone_in_temperature():
    # the relative free energy decreases as temperature rises, i.e. it is
    # nondecreasing in the inverse temperature beta
    betas = np.linspace(0.05, 3.0, 400)
    vals = [free_energy_density(0.3, 0.1, b) for b in betas]
    assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))


def test_critical_beta():
    assert critical_beta(0.25, math.inf) == pytest.approx(0.75)
    assert critical_beta(0.0, 2.0) == pytest.approx(0.5)
    assert critical_beta(0.1, 1.0) <= 0.0


def test_fpp_anchors_and_flat_region():
    lam, beta = 0.3, 1.5
    grid = np.linspace(0, 1, 401)
    vals = fpp_curve(lam, 0.0, beta, grid)
    assert vals[-1] == pytest.approx(0.0, abs=1e-12)
    flat = (grid >= lam * math.log(1 / lam) + 1e-9) & (grid <= 1 - lam - 1e-9)
    assert np.allclose(vals[flat], -lam / beta)


def test_fpp_high_temperature_affine():
    lam, beta = 0.3, 0.5
    grid = np.linspace(0.0, 1.0, 11)
    vals = fpp_curve(lam, 0.0, beta, grid)
    expect = 1 - lam - 1 / beta + grid / beta
    assert np.allclose(vals, expect)


def test_fpp_quasiconvex_low_temperature():
    grid = np.linspace(0, 1, 1001)
    vals = fpp_curve(0.3, 0.0, 1.5, grid)
    dv = np.diff(vals)
    dv = dv[np.abs(dv) > 1e-13]
    signs = np.sign(dv)
    changes = np.sum(signs[1:] != signs[:-1])
    assert changes <= 1  # nonincreasing then nondecreasing


def test_fpp_piecewise_continuity():
    # continuity across the four-piece junctions for general (r1, r2)
    lam, delta, beta = 0.25, 0.2, 1.2
    r1, r2 = 0.6, 0.15
    grid = np.arange(0.0, 1.0 + 1e-9, 1e-3)
    vals = fpp_curve(lam, delta, beta, grid, r1=r1, r2=r2)
    assert np.max(np.abs(np.diff(vals))) < 1e-2


def test_fpp_two_temperature_gap():
    # genuine discontinuity between the beta+ and beta- formulas at beta_c
    lam = 0.3
    grid = np.array([0.2])
    lo = fpp_curve(lam, 0.0, 1.0 - 1e-6, grid)[0]
    hi = fpp_curve(lam, 0.0, 1.0 + 1e-6, grid)[0]
    assert abs(lo - hi) > 0.05


def test_rate_function_zero_at_typical_overlap():
    rbar = typical_overlap_ge2(0.3)
    assert rbar == pytest.approx(RBAR_STAR_0p3, abs=1e-9)
    assert abs(rate_function(0.3, rbar)) < 1e-8


def test_rate_function_grid_oracle():
    # dense grid over t as an independent maximization oracle
    from scipy import stats as st

    mu = math.log(1 / 0.3)
    ks = np.arange(2, 200)
    p = st.poisson.pmf(ks, mu)
    p = p / p.sum()
    ts = np.arange(-20, 20, 1e-4)
    lam_t = np.array([np.sum(p * np.log(1 - 1 / ks + math.exp(t) / ks)) for t in np.arange(-5, 15, 1e-3)])
    tg = np.arange(-5, 15, 1e-3)
    oracle = float(np.max(tg * 0.9 - lam_t))
    assert rate_function(0.3, 0.9) == pytest.approx(oracle, abs=1e-4)


def test_rate_function_convexity():
    rng = np.random.default_rng(0)
    for _ in range(25):
        a, b = np.sort(rng.uniform(0.05, 0.95, 2))
        mid = 0.5 * (a + b)
        assert rate_function(0.3, mid) <= 0.5 * (rate_function(0.3, a) + rate_function(0.3, b)) + 1e-9


def test_rate_function_boundary_sentinel():
    assert rate_function(0.3, 0.0) == math.inf
    assert rate_function(0.3, 1.0) == math.inf


def test_replica_overlap_values():
    assert replica_overlap(0.0, 2.0) == 0.0
    assert replica_overlap(1.0, 2.0) == 0.0
    assert replica_overlap(0.5, 0.5) == 0.0
    assert replica_overlap(E_INV, 2.0) == pytest.approx(REPLICA_E_INV, abs=1e-9)


def test_critical_kernel_fraction_limits():
    y_hi = critical_kernel_fraction(1.0, 60.0, E_INV)
    y_lo = critical_kernel_fraction(1.0, -60.0, E_INV)
    assert y_hi > 0.999
    assert y_lo < 0.05
    # monotone in b
    ys = [critical_kernel_fraction(1.0, b, E_INV) for b in (-5.0, -1.0, 0.0, 1.0, 5.0)]
    assert all(a <= b + 1e-9 for a, b in zip(ys, ys[1:]))


def test_critical_kernel_fraction_grid_oracle():
    from ogp_lab.theory import _pois_support, legendre_sup

    lam = E_INV
    mu = math.log(1 / lam)
    ks, p = _pois_support(mu)
    ks, p = ks[1:], p[1:] / (1 - math.exp(-mu))

    def cgf(t):
        return float(np.sum(p * (np.logaddexp(np.log(ks) + t, 0.0) - np.log(ks + 1))))

    def cgfp(t):
        e = np.exp(t) * ks
        return float(np.sum(p * e / (e + 1)))

    def obj(y):
        x = (1 - lam) * y
        return (1 - x) * math.log(x) - legendre_sup(cgf, y, cgf_prime=cgfp)

    ys = np.linspace(1e-4, 1 - 1e-6, 5001)
    oracle = ys[np.argmax([obj(y) for y in ys])]
    assert critical_kernel_fraction(1.0, 0.0, lam) == pytest.approx(oracle, abs=1e-3)


def test_internal_energy_density():
    assert internal_energy_density(0.3, 0.7) == pytest.approx(0.0)
    assert internal_energy_density(0.3, 0.0) == pytest.approx(0.7)
    assert internal_energy_density(1.0, 0.0) == pytest.approx(0.0)
    with pytest.raises(ValueError):
        internal_energy_density(0.5, 0.8)
