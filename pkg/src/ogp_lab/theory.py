"""Closed-form limiting quantities: overlap limits, free energy, critical
temperature, Franz-Parisi curves, rate functions, and the near-critical
kernel fraction.

Everything here is deterministic; Poisson expectations are truncated series
with explicit tail control rather than Monte Carlo.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .numerics import legendre_sup

_TAIL = 1e-12


def _pois_support(mu: float, tail: float = _TAIL) -> tuple[np.ndarray, np.ndarray]:
    """Support and pmf of Poisson(mu) truncated so the omitted mass < tail."""
    if mu <= 0:
        return np.array([0]), np.array([1.0])
    hi = int(mu + 12.0 * math.sqrt(mu) + 40.0)
    while stats.poisson.sf(hi, mu) >= tail:
        hi *= 2
    ks = np.arange(0, hi + 1)
    return ks, stats.poisson.pmf(ks, mu)


def g_func(a: float, b: float, precision: float = 1e-10) -> float:
    """E[Z / (max(X1, X2) + Z) | Z > 0] for X1, X2 ~ Poisson(a), Z ~ Poisson(b).

    Evaluated by truncated series with total omitted mass below precision;
    boundary cases g(a, 0) = 0 and g(0, b) = 1.
    """
    if a < 0 or b < 0:
        raise ValueError("need a, b >= 0")
    if b == 0:
        return 0.0
    if a == 0:
        return 1.0
    tail = min(precision / 4.0, _TAIL)
    ks, pa = _pois_support(a, tail)
    Fa = np.cumsum(pa)
    # law of max(X1, X2)
    pmax = Fa**2 - np.concatenate([[0.0], Fa[:-1] ** 2])
    zs, pz = _pois_support(b, tail)
    zs, pz = zs[1:], pz[1:] / (1.0 - math.exp(-b))
    M, Z = np.meshgrid(ks, zs, indexing="ij")
    return float(pmax @ (Z / (M + Z)) @ pz)


def h_func(a: float, b: float, precision: float = 1e-10) -> float:
    """E[Z / ((X1 + Z)(X2 + Z)) | Z > 0]; the a = 0 branch is E[1/Z | Z > 0]."""
    if a < 0 or b <= 0:
        raise ValueError("need a >= 0 and b > 0")
    tail = min(precision / 4.0, _TAIL)
    zs, pz = _pois_support(b, tail)
    zs, pz = zs[1:], pz[1:] / (1.0 - math.exp(-b))
    if a == 0:
        return float(np.sum(pz / zs))
    ks, pa = _pois_support(a, tail)
    inner = np.array([np.sum(pa / (ks + z)) for z in zs])  # E[1/(X + z)]
    return float(np.sum(pz * zs * inner**2))


# ---------------------------------------------------------------------------
# Limit parameters and overlap limits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LimitParams:
    """Limiting proxy values with their mutual consistency constraints."""

    lam: float
    gamma: float = 0.0
    rho: float = 1.0
    delta: float = 0.0
    kappa: float = math.inf
    eta: float = 0.0
    xi: float | None = None
    beta: float = 1.0

    def __post_init__(self):
        for name, v, lo, hi in [
            ("lam", self.lam, 0.0, 1.0),
            ("gamma", self.gamma, 0.0, 1.0),
            ("rho", self.rho, 0.0, 1.0),
            ("delta", self.delta, 0.0, 1.0),
        ]:
            if not (lo <= v <= hi):
                raise ValueError(f"{name}={v} outside [{lo}, {hi}]")
        if self.rho < 1.0 and self.gamma != 0.0:
            raise ValueError("rho < 1 forces gamma = 0 in the limit")
        if self.delta == 1.0 and self.lam != 0.0:
            raise ValueError("delta = 1 forces lambda = 0")
        if self.kappa < 0 or self.eta < 0:
            raise ValueError("kappa and eta must be nonnegative")
        if self.beta <= 0:
            raise ValueError("beta must be positive")


def tree_overlap_curve(lam: float, gamma: float, rho: float = 1.0) -> float:
    """Optimal-coupling tree overlap limit at parameters (lam, gamma, rho).

    This is the general formula; at finite n it is also the overlay curve
    evaluated at the finite-n proxies.
    """
    if lam <= 0.0 or lam >= 1.0:
        return gamma
    if gamma == 1.0:
        return 1.0
    if gamma == 0.0:
        return rho * (1.0 - lam) * lam**2
    log_inv = math.log(1.0 / lam)
    f = g_func((1.0 - gamma) * log_inv, gamma * log_inv) * (1.0 - lam**gamma)
    return (1.0 - 2.0 * lam + lam ** (2.0 - gamma)) / (1.0 - lam) * lam ** (2.0 - gamma) + f


def limit_tree_overlap(p: LimitParams) -> float:
    return tree_overlap_curve(p.lam, p.gamma, p.rho)


def indep_tree_overlap_curve(lam: float, gamma: float) -> float:
    """Independent-coupling tree overlap limit."""
    if lam <= 0.0 or lam >= 1.0 or gamma == 0.0:
        return 0.0
    log_inv = math.log(1.0 / lam)
    return h_func((1.0 - gamma) * log_inv, gamma * log_inv) * (1.0 - lam**gamma)


def dag_overlap_curve(
    lam: float, gamma: float, rho: float, eta: float, xi: float | None = None
) -> float:
    """Shortest-path DAG overlap formula; also the finite-size overlay when
    evaluated at the finite-size proxy values."""
    if lam == 1.0 or math.isinf(eta):
        return gamma
    if xi is None:
        xi = lam ** (1.0 - gamma)
    return rho * ((1.0 - (2.0 - xi) * lam) * xi + eta * gamma) / (1.0 - lam + eta)


def limit_dag_overlap(p: LimitParams) -> float:
    """Shortest-path DAG overlap limit."""
    return dag_overlap_curve(p.lam, p.gamma, p.rho, p.eta, p.xi)


# ---------------------------------------------------------------------------
# Free energy and critical temperature
# ---------------------------------------------------------------------------


def free_energy_density(lam: float, delta: float, beta: float) -> float:
    """Limiting relative free energy density as a function of beta."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    if not (0.0 <= lam <= 1.0 and 0.0 <= delta <= 1.0):
        raise ValueError("lam, delta must lie in [0, 1]")
    if delta == 1.0:
        if lam != 0.0:
            raise ValueError("delta = 1 forces lambda = 0")
        return -1.0 / beta
    if lam == 1.0:
        if delta != 0.0:
            raise ValueError("lambda = 1 forces delta = 0")
        return -1.0 / beta
    if beta >= 1.0 - delta:
        return -(lam + delta) / beta
    return (1.0 - (lam + delta)) / (1.0 - delta) - 1.0 / beta


def critical_beta(delta: float, kappa: float) -> float:
    """Critical inverse temperature 1 - delta - 1/kappa (kappa = inf allowed)."""
    inv = 0.0 if math.isinf(kappa) else (math.inf if kappa == 0 else 1.0 / kappa)
    return 1.0 - delta - inv


# ---------------------------------------------------------------------------
# Franz-Parisi curves
# ---------------------------------------------------------------------------


def fpp_value(lam: float, delta: float, beta: float, r1: float, r2: float, r: float) -> float:
    """Piecewise-linear relative Franz-Parisi potential at overlap r for a
    center whose kernel fraction is r1 and single-parent-kernel fraction r2."""
    if not (0.0 <= r <= 1.0):
        raise ValueError(f"overlap r={r} outside [0, 1]")
    if not (0.0 <= r2 <= r1 <= 1.0):
        raise ValueError("need 0 <= r2 <= r1 <= 1")
    if beta >= 1.0 - delta:
        if r >= r1 + lam:
            return -r1 - lam - delta / beta + (1.0 + delta / beta) * r
        if r >= r1:
            return -(1.0 - (1.0 - lam - r1) * (1.0 - delta)) / beta + r / beta
        if r >= r2:
            return -(1.0 - (1.0 - lam) * (1.0 - delta)) / beta + (delta / beta) * r
        return r2 - (1.0 - (1.0 - lam - r2) * (1.0 - delta)) / beta - (1.0 - 1.0 / beta) * r
    if r >= r1:
        return 1.0 - r1 - lam - 1.0 / beta + r / beta
    return 1.0 - lam - 1.0 / beta + (1.0 / beta - 1.0) * r


def fpp_curve(
    lam: float,
    delta: float,
    beta: float,
    r_grid: np.ndarray,
    r1: float | None = None,
    r2: float | None = None,
) -> np.ndarray:
    """Franz-Parisi curve over r_grid. When the center parameters are omitted
    they are filled for a Gibbs-typical center: low temperature gives
    (r1, r2) = (1 - lam, lam log(1/lam)), high temperature gives (0, 0)."""
    if r1 is None or r2 is None:
        if beta >= 1.0 - delta:
            r1 = 1.0 - lam
            r2 = lam * math.log(1.0 / lam) if 0.0 < lam < 1.0 else 0.0
        else:
            r1, r2 = 0.0, 0.0
    return np.array([fpp_value(lam, delta, beta, r1, r2, float(r)) for r in np.asarray(r_grid)])


# ---------------------------------------------------------------------------
# Rate function for the low-temperature overlap basin
# ---------------------------------------------------------------------------


def _pois_ge2(lam: float) -> tuple[np.ndarray, np.ndarray]:
    mu = math.log(1.0 / lam)
    ks, p = _pois_support(mu)
    ks, p = ks[2:], p[2:]
    return ks, p / p.sum()


def overlap_cgf(lam: float, t: float) -> float:
    """E[log(1 - 1/X + e^t / X) | X >= 2] for X ~ Poisson(log(1/lam))."""
    ks, p = _pois_ge2(lam)
    return float(np.sum(p * np.log(1.0 - 1.0 / ks + math.exp(t) / ks)))


def typical_overlap_ge2(lam: float) -> float:
    """E[1/X | X >= 2]: the zero of the rate function."""
    ks, p = _pois_ge2(lam)
    return float(np.sum(p / ks))


def rate_function(lam: float, r_bar: float) -> float:
    """Legendre transform sup_t (t r_bar - cgf(t)) of the overlap cgf.

    Returns +inf at the boundary values r_bar in {0, 1} (supremum not
    attained at finite t).
    """
    if not (0.0 < lam < 1.0):
        raise ValueError("need 0 < lam < 1")
    if not (0.0 <= r_bar <= 1.0):
        raise ValueError("need 0 <= r_bar <= 1")
    if r_bar in (0.0, 1.0):
        return math.inf
    ks, p = _pois_ge2(lam)

    def cgf(t: float) -> float:
        return float(np.sum(p * np.log(1.0 - 1.0 / ks + math.exp(t) / ks)))

    def cgf_prime(t: float) -> float:
        et = math.exp(t)
        return float(np.sum(p * (et / ks) / (1.0 - 1.0 / ks + et / ks)))

    return legendre_sup(cgf, r_bar, cgf_prime=cgf_prime)


# ---------------------------------------------------------------------------
# Replica symmetry
# ---------------------------------------------------------------------------


def replica_overlap(lam: float, beta: float) -> float:
    """Limiting overlap of two independent Gibbs samples: zero unless
    0 < lam < 1 and beta > 1, where it is (1 - lam) E[1/X | X > 0]."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    if lam <= 0.0 or lam >= 1.0 or beta < 1.0:
        return 0.0
    mu = math.log(1.0 / lam)
    ks, p = _pois_support(mu)
    ks, p = ks[1:], p[1:]
    e_inv = float(np.sum(p / ks) / p.sum())
    return (1.0 - lam) * e_inv


# ---------------------------------------------------------------------------
# Near-critical kernel fraction
# ---------------------------------------------------------------------------


def critical_kernel_fraction(alpha: float, b: float, lam: float) -> float:
    """Maximizer y* of g_{alpha,b}((1-lam) y) - I(y) over y in (0, 1].

    g_{alpha,b}(x) = (b - log alpha) x + (1 - x) log x, and I is the Legendre
    rate of the per-site tilting log((A e^t + 1)/(A + 1)) with A the
    positive-conditioned Poisson(log(1/lam)) parent count. The objective is
    strictly concave, so golden-section search finds the optimum.
    """
    if not (0.0 < lam < 1.0):
        raise ValueError("need 0 < lam < 1")
    if alpha <= 0:
        raise ValueError("need alpha > 0")
    mu = math.log(1.0 / lam)
    ks, p = _pois_support(mu)
    ks, p = ks[1:], p[1:] / (1.0 - math.exp(-mu))

    def cgf(t: float) -> float:
        # log-domain to survive large t
        val = np.logaddexp(np.log(ks) + t, 0.0) - np.log(ks + 1.0)
        return float(np.sum(p * val))

    def cgf_prime(t: float) -> float:
        et_k = np.exp(t) * ks
        return float(np.sum(p * et_k / (et_k + 1.0)))

    def rate(y: float) -> float:
        return legendre_sup(cgf, y, cgf_prime=cgf_prime)

    def objective(y: float) -> float:
        x = (1.0 - lam) * y
        return (b - math.log(alpha)) * x + (1.0 - x) * math.log(x) - rate(y)

    return _golden_max(objective, 1e-12, 1.0 - 1e-12, tol=1e-10)


def _golden_max(fn, lo: float, hi: float, tol: float = 1e-10) -> float:
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, d = lo, hi
    b = d - phi * (d - a)
    c = a + phi * (d - a)
    fb, fc = fn(b), fn(c)
    while d - a > tol:
        if fb > fc:
            d, c, fc = c, b, fb
            b = d - phi * (d - a)
            fb = fn(b)
        else:
            a, b, fb = b, c, fc
            c = a + phi * (d - a)
            fc = fn(c)
    return 0.5 * (a + d)


def internal_energy_density(lam: float, kernel_fraction: float) -> float:
    """Relative internal energy 1 - lam - r for kernel fraction r in [0, 1-lam]."""
    if not (0.0 <= lam <= 1.0):
        raise ValueError("need 0 <= lam <= 1")
    if kernel_fraction < -1e-12 or kernel_fraction > 1.0 - lam + 1e-12:
        raise ValueError(f"kernel fraction must lie in [0, {1.0 - lam}]")
    return 1.0 - lam - kernel_fraction
