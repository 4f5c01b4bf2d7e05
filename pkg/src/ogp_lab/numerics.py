"""Shared numeric utilities: truncated distribution samplers, one-dimensional
Wasserstein distances, Legendre transforms, and weighted subset sampling.

All partition-function style arithmetic stays in the natural-log domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import rng as _rng


@dataclass(frozen=True)
class DiscreteDist:
    """Finite distribution on real support values."""

    values: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if np.any(p < 0):
            raise ValueError("negative probability")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {p.sum()}, not 1")

    def mean(self) -> float:
        return float(np.dot(self.values, self.probs))


def ztp_pmf(k: np.ndarray, mu: float) -> np.ndarray:
    """Zero-truncated Poisson pmf on k >= 1."""
    return stats.poisson.pmf(k, mu) / (1.0 - math.exp(-mu))


def ztp_sample(mu: float, seed_or_gen, size: int | None = None):
    """Zero-truncated Poisson draws: inverse CDF for small mu, rejection
    (redraw until positive) once the zero class is negligible."""
    gen = seed_or_gen if isinstance(seed_or_gen, np.random.Generator) else _rng.stream(seed_or_gen, _rng.TAG_ZTP)
    m = 1 if size is None else size
    out = np.empty(m, dtype=np.int64)
    if mu < 30.0:
        # inverse CDF on the truncated law
        u = gen.random(m)
        p0 = math.exp(-mu)
        target = p0 + u * (1.0 - p0)  # quantile level in the untruncated CDF
        k = np.ones(m, dtype=np.int64)
        cdf = np.full(m, p0 + p0 * mu)
        term = np.full(m, p0 * mu)
        active = cdf < target
        while active.any():
            k[active] += 1
            term = term * mu / k
            cdf = cdf + np.where(active, term, 0.0)
            active = cdf < target
        out = k
    else:
        out = gen.poisson(mu, size=m)
        bad = out == 0
        while bad.any():
            out[bad] = gen.poisson(mu, size=int(bad.sum()))
            bad = out == 0
    return int(out[0]) if size is None else out


def ztb_sample(n: int, p: float, seed_or_gen, size: int | None = None):
    """Zero-truncated Binomial draws by rejection (redraw until positive)."""
    gen = seed_or_gen if isinstance(seed_or_gen, np.random.Generator) else _rng.stream(seed_or_gen, _rng.TAG_ZTP, 1)
    m = 1 if size is None else size
    if n == 1:
        out = np.ones(m, dtype=np.int64)
    else:
        out = gen.binomial(n, p, size=m)
        bad = out == 0
        while bad.any():
            out[bad] = gen.binomial(n, p, size=int(bad.sum()))
            bad = out == 0
    return int(out[0]) if size is None else out


# ---------------------------------------------------------------------------
# One-dimensional Wasserstein
# ---------------------------------------------------------------------------


def w1_1d(xs: np.ndarray, ys: np.ndarray) -> float:
    """W1 between equal-size empirical measures: mean absolute difference of
    the order statistics."""
    xs = np.sort(np.asarray(xs, dtype=float))
    ys = np.sort(np.asarray(ys, dtype=float))
    if xs.size != ys.size:
        raise ValueError("empirical-vs-empirical form needs equal sample sizes")
    return float(np.mean(np.abs(xs - ys)))


def w1_empirical_vs_dist(xs: np.ndarray, dist: DiscreteDist) -> float:
    """W1 between an empirical sample and a finite analytic target, via the
    CDF-difference integral."""
    xs = np.sort(np.asarray(xs, dtype=float))
    grid = np.unique(np.concatenate([xs, dist.values.astype(float)]))
    Fx = np.searchsorted(xs, grid, side="right") / xs.size
    order = np.argsort(dist.values)
    vals = np.asarray(dist.values, dtype=float)[order]
    cum = np.cumsum(np.asarray(dist.probs, dtype=float)[order])
    idx = np.searchsorted(vals, grid, side="right")
    Fy = np.where(idx > 0, cum[np.minimum(idx, cum.size) - 1], 0.0)
    widths = np.diff(grid)
    return float(np.sum(np.abs(Fx - Fy)[:-1] * widths))


# ---------------------------------------------------------------------------
# Legendre transform machinery
# ---------------------------------------------------------------------------


def legendre_sup(cgf, x: float, cgf_prime=None, tol: float = 1e-12, max_expand: int = 200) -> float:
    """sup_t (t*x - cgf(t)) for a convex cgf, by bisection on cgf'(t) = x.

    The bracket [-1, 1] is expanded geometrically until the derivative
    straddles x; if it never does on one side the supremum is effectively at
    infinity and +inf is returned.
    """

    def deriv(t: float) -> float:
        if cgf_prime is not None:
            return cgf_prime(t)
        h = 1e-6 * max(1.0, abs(t))
        return (cgf(t + h) - cgf(t - h)) / (2.0 * h)

    lo, hi = -1.0, 1.0
    expand = 0
    while deriv(lo) > x:
        lo *= 2.0
        expand += 1
        if expand > max_expand:
            return math.inf
    expand = 0
    while deriv(hi) < x:
        hi *= 2.0
        expand += 1
        if expand > max_expand:
            return math.inf
    while hi - lo > tol * max(1.0, abs(lo), abs(hi)):
        mid = 0.5 * (lo + hi)
        if deriv(mid) < x:
            lo = mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    return t * x - cgf(t)


# ---------------------------------------------------------------------------
# Weighted subset sampling via elementary symmetric polynomials
# ---------------------------------------------------------------------------


def log_esp(log_w: np.ndarray, m: int) -> np.ndarray:
    """log e_j for j = 0..m of the weights exp(log_w), by the stable
    log-domain elementary-symmetric recursion (O(len * m))."""
    log_w = np.asarray(log_w, dtype=float)
    nw = log_w.size
    if not (0 <= m <= nw):
        raise ValueError(f"need 0 <= m <= {nw}, got {m}")
    e = np.full(m + 1, -math.inf)
    e[0] = 0.0
    for i in range(nw):
        hi = min(i + 1, m)
        e[1 : hi + 1] = np.logaddexp(e[1 : hi + 1], log_w[i] + e[0:hi])
    return e


def lse_m(values: np.ndarray, m: int) -> float:
    """m-wise LogSumExp: log sum over m-subsets I of exp(sum_{i in I} x_i)."""
    values = np.asarray(values, dtype=float)
    if not (1 <= m <= values.size):
        raise ValueError(f"need 1 <= m <= {values.size}")
    return float(log_esp(values, m)[m])


@dataclass
class WeightedSubsetDP:
    """Exact sampler and marginals for P(A) ∝ prod_{i in A} w_i over |A| = m.

    suffix[i, j] = log e_j(w_i, ..., w_{N-1}); sequential sampling includes
    item i with probability w_i * e_{k-1}(suffix after i) / e_k(suffix from i).
    """

    log_w: np.ndarray
    m: int
    suffix: np.ndarray  # (N+1, m+1)

    @property
    def log_e_m(self) -> float:
        return float(self.suffix[0, self.m])

    def inclusion_probs(self) -> np.ndarray:
        """P(i in A) for every item; sums to m exactly in expectation."""
        N = self.log_w.size
        # prefix[j] = log e_j(w_0..w_{i-1}), updated as i advances
        prefix = np.full(self.m + 1, -math.inf)
        prefix[0] = 0.0
        probs = np.empty(N)
        for i in range(N):
            # P(i in A) = w_i * sum_j e_j(prefix) e_{m-1-j}(suffix) / e_m
            acc = -math.inf
            for j in range(0, self.m):
                acc = np.logaddexp(acc, prefix[j] + self.suffix[i + 1, self.m - 1 - j])
            probs[i] = math.exp(self.log_w[i] + acc - self.log_e_m)
            hi = min(i + 1, self.m)
            prefix[1 : hi + 1] = np.logaddexp(prefix[1 : hi + 1], self.log_w[i] + prefix[0:hi])
        return probs

    def sample(self, gen: np.random.Generator) -> np.ndarray:
        N = self.log_w.size
        chosen = []
        k = self.m
        for i in range(N):
            if k == 0:
                break
            if N - i == k:
                chosen.extend(range(i, N))
                break
            p_inc = math.exp(self.log_w[i] + self.suffix[i + 1, k - 1] - self.suffix[i, k])
            if gen.random() < p_inc:
                chosen.append(i)
                k -= 1
        return np.array(chosen, dtype=np.int64)


def weighted_subset_dp(weights: np.ndarray, m: int) -> WeightedSubsetDP:
    """Build the suffix table; numerically stable for weights spanning
    hundreds of orders of magnitude (everything stays in log space)."""
    w = np.asarray(weights, dtype=float)
    if np.any(w <= 0):
        raise ValueError("weights must be positive")
    log_w = np.log(w)
    N = w.size
    if not (0 <= m <= N):
        raise ValueError(f"need 0 <= m <= {N}, got {m}")
    suffix = np.full((N + 1, m + 1), -math.inf)
    suffix[N, 0] = 0.0
    for i in range(N - 1, -1, -1):
        suffix[i, 0] = 0.0
        lo = 1
        hi = min(N - i, m)
        suffix[i, lo : hi + 1] = np.logaddexp(
            suffix[i + 1, lo : hi + 1], log_w[i] + suffix[i + 1, lo - 1 : hi]
        )
    return WeightedSubsetDP(log_w=log_w, m=m, suffix=suffix)
