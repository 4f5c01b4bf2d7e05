"""Box-constrained optimization contrasts: a quartic multilinear objective
whose projected gradient flow stalls on a suboptimal face, its concave
threshold-average extension which local search solves globally, and the
matching mean-field block-spin model with its overlap-constrained potential.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln


def f_multilinear(p) -> float:
    """f(x, y, z, w) = x + y - z - w + xy + zw + (3/4)(x + y)(z + w)."""
    x, y, z, w = p
    return x + y - z - w + x * y + z * w + 0.75 * (x + y) * (z + w)


def grad_f(p) -> np.ndarray:
    x, y, z, w = p
    return np.array(
        [
            1.0 + y + 0.75 * (z + w),
            1.0 + x + 0.75 * (z + w),
            -1.0 + w + 0.75 * (x + y),
            -1.0 + z + 0.75 * (x + y),
        ]
    )


def projected_gradient_flow(start, dt: float, t_max: float) -> tuple[np.ndarray, np.ndarray]:
    """Explicit-Euler ascent flow on the box [-1, 1]^4 with the velocity
    projected coordinatewise onto the tangent cone at active faces.

    Returns (times, trajectory) with trajectory[k] the state at times[k].
    Coordinatewise projection is exact for boxes and only for boxes.
    """
    p = np.asarray(start, dtype=float)
    if np.any(np.abs(p) > 1.0):
        raise ValueError("start must lie in the box [-1, 1]^4")
    steps = int(round(t_max / dt))
    traj = np.empty((steps + 1, 4))
    traj[0] = p
    for k in range(steps):
        v = grad_f(p)
        v[(p >= 1.0) & (v > 0)] = 0.0
        v[(p <= -1.0) & (v < 0)] = 0.0
        p = np.clip(p + dt * v, -1.0, 1.0)
        traj[k + 1] = p
    times = np.arange(steps + 1) * dt
    return times, traj


# ---------------------------------------------------------------------------
# Threshold-average (chain) extension
# ---------------------------------------------------------------------------


def _as_vertex_key(signs) -> tuple[int, ...]:
    return tuple(1 if s > 0 else -1 for s in signs)


def vertex_table_from_f(fn, d: int) -> dict[tuple[int, ...], float]:
    """Tabulate fn on all sign vertices of [-1, 1]^d."""
    if d > 20:
        raise ValueError("dense vertex tables refused beyond d = 20")
    table = {}
    for bits in range(1 << d):
        v = tuple(1 if (bits >> i) & 1 else -1 for i in range(d))
        table[v] = float(fn(v))
    return table


def lovasz_extension(vertex_values: dict[tuple[int, ...], float], p) -> float:
    """Threshold-average extension: the mean over t in [-1, 1] of the vertex
    value at the sign pattern (+1 where p_i >= t). Computed by the sorted
    breakpoint (chain) formula, which is exact for the integral."""
    p = np.asarray(p, dtype=float)
    d = p.size
    if d > 20:
        raise ValueError("dense vertex tables refused beyond d = 20")
    # integrand is constant between consecutive breakpoints -1, p_(1), .., 1
    cuts = np.concatenate([[-1.0], np.sort(p), [1.0]])
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b <= a:
            continue
        t = 0.5 * (a + b)
        signs = tuple(1 if pi >= t else -1 for pi in p)
        total += (b - a) * vertex_values[signs]
    return 0.5 * total


def lovasz_subgradient(vertex_values: dict[tuple[int, ...], float], p) -> np.ndarray:
    """A supergradient of the concave extension at p (central difference per
    coordinate is exact between breakpoints; finite differences are robust at
    breakpoints for the ascent's purposes)."""
    p = np.asarray(p, dtype=float)
    h = 1e-6
    g = np.empty(p.size)
    for i in range(p.size):
        hi = p.copy()
        lo = p.copy()
        hi[i] = min(1.0, p[i] + h)
        lo[i] = max(-1.0, p[i] - h)
        g[i] = (lovasz_extension(vertex_values, hi) - lovasz_extension(vertex_values, lo)) / (hi[i] - lo[i])
    return g


def lovasz_subgrad_ascent(
    vertex_values: dict[tuple[int, ...], float],
    p0,
    step: float = 0.3,
    iters: int = 400,
) -> tuple[np.ndarray, float]:
    """Projected supergradient ascent on the concave extension.

    The extension's maximum over the box equals the best vertex value, which
    the vertex table supplies directly, so the Polyak step
    (f* - f(p)) / |g|^2 applies and converges fast on this piecewise-linear
    objective; `step` caps the step length. Returns (best point, best value).
    """
    p = np.clip(np.asarray(p0, dtype=float), -1.0, 1.0)
    f_star = max(vertex_values.values())
    best_p = p.copy()
    best_v = lovasz_extension(vertex_values, p)
    for k in range(1, iters + 1):
        g = lovasz_subgradient(vertex_values, p)
        gg = float(g @ g)
        if gg < 1e-18:
            break
        cur = lovasz_extension(vertex_values, p)
        alpha = min((f_star - cur) / gg, step / math.sqrt(k) * (1.0 + 1.0 / math.sqrt(gg)))
        alpha = max(alpha, 0.0)
        p = np.clip(p + alpha * g, -1.0, 1.0)
        v = lovasz_extension(vertex_values, p)
        if v > best_v:
            best_v = v
            best_p = p.copy()
        if f_star - best_v < 1e-12:
            break
    return best_p, float(best_v)


def f_m_highdim(x: np.ndarray) -> float:
    """The block version: f applied to the four block means of a 4m-vector."""
    x = np.asarray(x, dtype=float)
    if x.size % 4:
        raise ValueError("length must be a multiple of 4")
    m = x.size // 4
    means = x.reshape(4, m).mean(axis=1)
    return f_multilinear(means)


# ---------------------------------------------------------------------------
# Mean-field block-spin potential
# ---------------------------------------------------------------------------


def f_infinity(r: float) -> float:
    """Zero-temperature overlap-constrained potential -(4 r^2 - 2|r| + 3)."""
    return -(4.0 * r * r - 2.0 * abs(r) + 3.0)


def ising_fpp(m: int, beta: float, r_grid: np.ndarray, eps: float | None = None) -> np.ndarray:
    """Exact finite-size overlap-constrained potential of the block-spin
    model p(x) ∝ exp(beta m f(block means)) on {±1}^{4m}, centered at the
    all-ones configuration (a zero-temperature state).

    For each r, sums exp(beta m f + log #configs) over all magnetization
    sectors whose overlap with the center lies within eps of r, using exact
    log-binomial sector counts. Overlap values live on a grid of step
    1/(2m), so the default eps of one step always captures the sectors
    nearest to r without smearing across the window.
    Returns -(1 / (beta m)) log of each window sum.
    """
    if m > 2000:
        raise ValueError("sector enumeration capped at m = 2000")
    r_grid = np.asarray(r_grid, dtype=float)
    if eps is None:
        eps = 1.0 / (2 * m)

    # Pair blocks: (x, y) and (z, w). Within a pair, f depends on the pair sum
    # s and difference d only through s and -d^2/4, so each pair collapses to
    # a weight per total up-count j in 0..2m:
    #   W(j) = LSE_k [ logC(m,k) + logC(m,j-k) + beta m * quad(k, j) ]
    # where the quadratic part carries everything f needs from inside the pair.
    lgc = gammaln(m + 1) - gammaln(np.arange(m + 1) + 1) - gammaln(m - np.arange(m + 1) + 1)

    def mean(k: np.ndarray) -> np.ndarray:
        return (2.0 * k - m) / m

    js = np.arange(0, 2 * m + 1)

    def pair_weights(sign: float) -> np.ndarray:
        # sign=+1 for the (x, y) pair: f contributes  (x+y) + xy
        # sign=-1 for the (z, w) pair: f contributes -(z+w) + zw
        W = np.full(2 * m + 1, -np.inf)
        for j in js:
            k_lo, k_hi = max(0, j - m), min(m, j)
            ks = np.arange(k_lo, k_hi + 1)
            a = mean(ks)
            b = mean(j - ks)
            quad = sign * (a + b) + a * b
            terms = lgc[ks] + lgc[j - ks] + beta * m * quad
            mx = terms.max()
            W[j] = mx + math.log(np.sum(np.exp(terms - mx)))
        return W

    W1 = pair_weights(+1.0)
    W2 = pair_weights(-1.0)
    # pair sums: s(j) = x + y = (2j - 2m)/m for pair up-count j
    s_pair = (2.0 * js - 2.0 * m) / m

    # cross terms between the pairs: (3/4)(x+y)(z+w); overlap with the
    # all-ones center is the grand mean (s1 + s2)/4
    out = np.empty(r_grid.size)
    cross = 0.75 * np.outer(s_pair, s_pair)
    total = W1[:, None] + W2[None, :] + beta * m * cross
    overlap = (s_pair[:, None] + s_pair[None, :]) / 4.0
    for i, r in enumerate(r_grid):
        mask = np.abs(overlap - r) <= eps + 1e-12
        if not mask.any():
            out[i] = math.inf
            continue
        vals = total[mask]
        mx = vals.max()
        out[i] = -(mx + math.log(np.sum(np.exp(vals - mx)))) / (beta * m)
    return out
