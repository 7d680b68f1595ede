"""Analysis of 1-D profiles: variation, L1-vs-variation bounds, sliding
integrals against interval sets, spectral diagnostics and concavity checks.

The central quantity is the modulus K(eps, g): the least total variation of a
compactly supported approximant within L1 distance eps of g.  It is computed
as an upper bound only — constructions consume it in the safe direction — by
taking the better of a truncation approximant and a merge-chain approximant,
each returned with an exactly re-checked witness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import WindowExceededError
from .intervals import IntervalSet, Window
from .profiles import Profile, SignedPiecewiseLinear, StepProfile


# -- variation and weak derivative -------------------------------------------


def variation_and_derivative(p: Profile) -> tuple[float, StepProfile]:
    """Total variation of p (exact from breakpoints) and its slope step
    function, a weak derivative when p is continuous."""
    return p.total_variation(), p.derivative_step()


# -- K(eps, f) upper bounds ---------------------------------------------------


@dataclass(frozen=True)
class KBound:
    """An upper bound for K(eps, g) with its witness approximant.

    The recorded facts are re-checked exactly (step arithmetic) at
    construction: l1_error < epsilon and Var(witness) == variation_bound.
    """

    epsilon: float
    variation_bound: float
    witness: StepProfile
    l1_error: float
    strategy: str

    def __post_init__(self):
        if not self.l1_error < self.epsilon:
            raise ValueError(
                f"witness misses its L1 budget: {self.l1_error} >= {self.epsilon}"
            )
        if self.variation_bound != self.witness.total_variation():
            raise ValueError("variation_bound does not match the witness")


class VariationEnvelope:
    """Reusable K(eps, g) upper-bound oracle for one step function g.

    Precomputes a fixed merge chain (adjacent pieces coalesced in increasing
    order of L1 damage, each block taking its weighted-median value).  A
    query scans the states whose cumulative L1 cost fits the budget, so the
    returned bound is non-increasing in eps by construction; truncation
    approximants are tried as well and the better witness wins.
    """

    def __init__(self, g: StepProfile):
        self.g = g
        self._chain = _merge_chain(g)

    def bound(self, eps: float) -> KBound:
        if eps <= 0:
            raise ValueError(f"epsilon must be positive, got {eps}")
        best = None
        for witness, strategy in self._candidates(eps):
            err = self.g.l1_distance(witness)
            if not err < eps:
                continue
            var = witness.total_variation()
            if best is None or var < best.variation_bound:
                best = KBound(eps, var, witness, err, strategy)
        assert best is not None  # g itself is always a feasible witness
        return best

    def _candidates(self, eps: float):
        yield self.g, "identity"
        if self.g.l1_norm() < eps:
            lo, hi = self.g.support
            yield StepProfile([lo, hi], [0.0]), "zero"
        t = _least_truncation_threshold(self.g, eps)
        if t is not None:
            yield self.g.clamp(t), "truncation"
        state = _best_chain_state(self._chain, eps)
        if state is not None:
            yield _chain_witness(self.g, self._chain, state), "merge"


def k_upper(g: StepProfile, eps: float, envelope: VariationEnvelope | None = None) -> KBound:
    """Upper bound for K(eps, g); see :class:`VariationEnvelope`."""
    if envelope is None:
        envelope = VariationEnvelope(g)
    return envelope.bound(eps)


def _least_truncation_threshold(g: StepProfile, eps: float) -> float | None:
    """Smallest clamp level t with ||g - clamp(g, t)||_1 < eps, plus margin."""
    w = g.widths()
    v = np.abs(g.vals)
    if float(math.fsum(w * v)) < eps:
        return 0.0
    levels = np.unique(v)

    def excess(t: float) -> float:
        return float(math.fsum(w * np.maximum(v - t, 0.0)))

    # excess(t) is piecewise linear and decreasing; solve on the level grid
    prev_t, prev_e = 0.0, excess(0.0)
    t_star = float(levels[-1])
    for t in levels:
        e = excess(float(t))
        if e < eps:
            # linear interpolation between (prev_t, prev_e) and (t, e)
            if prev_e > e:
                t_star = prev_t + (prev_e - eps) * (t - prev_t) / (prev_e - e)
            else:
                t_star = float(t)
            break
        prev_t, prev_e = float(t), e
    for bump in (1e-12, 1e-9, 1e-6):
        t_try = t_star * (1 + bump) + bump
        if excess(t_try) < eps:
            return t_try
    return None


def _weighted_median_and_cost(items) -> tuple[float, float]:
    """items: value-sorted [(v, w)]; lower weighted median and its L1 cost."""
    half = math.fsum(w for _, w in items) / 2.0
    acc = 0.0
    med = items[-1][0]
    for v, w in items:
        acc += w
        if acc >= half:
            med = v
            break
    cost = math.fsum(w * abs(v - med) for v, w in items)
    return med, cost


def _merge_chain(g: StepProfile):
    """Fixed merge order with per-state (cumulative L1 cost, variation).

    Blocks of adjacent pieces are coalesced cheapest-first (each block at its
    weighted median); states[j] = (cost_j, var_j) after j merges, with
    states[0] describing g itself.  Returns (order, states) where order[j]
    is the removed boundary (last original piece of the absorbing block).
    """
    import heapq

    n = g.piece_count
    widths = g.widths()
    items = [[(float(g.vals[i]), float(widths[i]))] for i in range(n)]
    meds = [float(v) for v in g.vals]
    costs = [0.0] * n
    last_piece = list(range(n))
    prev = list(range(-1, n - 1))
    nxt = list(range(1, n + 1))
    alive = [True] * n
    version = [0] * n

    def merged_data(k):
        right = nxt[k]
        both = sorted(items[k] + items[right])
        med, cost = _weighted_median_and_cost(both)
        return both, med, cost

    def variation_total():
        vals = [meds[k] for k in range(n) if alive[k]]
        total = abs(vals[0]) + abs(vals[-1])
        total += math.fsum(abs(vals[i + 1] - vals[i]) for i in range(len(vals) - 1))
        return total

    heap = []
    for k in range(n - 1):
        _, med, cost = merged_data(k)
        delta = cost - costs[k] - costs[k + 1]
        heapq.heappush(heap, (delta, k, version[k], version[k + 1]))

    states = [(0.0, variation_total())]
    order = []
    cum = 0.0
    budget_cap = g.l1_norm() * 1.5 + 1e-9
    while heap and cum <= budget_cap:
        delta, k, vk, vr = heapq.heappop(heap)
        right = nxt[k] if k < n else -1
        if not alive[k] or right >= n or right < 0 or not alive[right]:
            continue
        if version[k] != vk or version[right] != vr:
            continue
        both, med, cost = merged_data(k)
        items[k] = both
        meds[k] = med
        costs[k] = cost
        alive[right] = False
        order.append(last_piece[k])
        last_piece[k] = last_piece[right]
        nxt[k] = nxt[right]
        if nxt[k] < n:
            prev[nxt[k]] = k
        version[k] += 1
        cum += max(delta, 0.0)
        states.append((cum, variation_total()))
        if prev[k] >= 0:
            _, _, c2 = merged_data(prev[k])
            d2 = c2 - costs[prev[k]] - costs[k]
            heapq.heappush(heap, (d2, prev[k], version[prev[k]], version[k]))
        if nxt[k] < n:
            _, _, c3 = merged_data(k)
            d3 = c3 - costs[k] - costs[nxt[k]]
            heapq.heappush(heap, (d3, k, version[k], version[nxt[k]]))
    return order, states


def _best_chain_state(chain, eps: float) -> int | None:
    order, states = chain
    best_j, best_var = None, math.inf
    for j, (c, var) in enumerate(states):
        if c < eps and var < best_var:
            best_j, best_var = j, var
    return best_j if best_j not in (None, 0) else None


def _chain_witness(g: StepProfile, chain, j: int) -> StepProfile:
    order, _ = chain
    removed = set(order[:j])
    edges = [float(g.edges[0])]
    vals = []
    widths = g.widths()
    block = []
    for i in range(g.piece_count):
        block.append((float(g.vals[i]), float(widths[i])))
        if i in removed:
            continue
        med, _ = _weighted_median_and_cost(sorted(block))
        vals.append(med)
        edges.append(float(g.edges[i + 1]))
        block = []
    return StepProfile(edges, vals)


# -- sliding integrals --------------------------------------------------------


def sliding_integral(
    p: Profile,
    T: IntervalSet,
    a: float,
    b_grid,
    window: Window,
) -> np.ndarray:
    """F(b) = ∫_T p((x - b)/a) dx for each b, by exact piecewise integration.

    Precondition: the support of x -> p((x - b)/a), which is
    [b + a*s0, b + a*s1], must lie inside the window for every b.
    """
    if a <= 0:
        raise ValueError("scale a must be positive")
    b = np.atleast_1d(np.asarray(b_grid, dtype=np.float64))
    s0, s1 = p.support
    lo_need = float(np.min(b)) + a * s0
    hi_need = float(np.max(b)) + a * s1
    wlo, whi = float(window.lo), float(window.hi)
    if lo_need < wlo - 1e-12 or hi_need > whi + 1e-12:
        raise WindowExceededError(
            f"shifted support [{lo_need:g}, {hi_need:g}] exceeds window "
            f"[{wlo:g}, {whi:g}]",
            required_lo=lo_need,
            required_hi=hi_need,
        )
    if len(T) == 0:
        return np.zeros(b.shape)
    if len(T) <= 4096 and len(T) * b.size <= 2_000_000:
        return _sliding_direct(p, T.to_floats(), a, b)
    return _sliding_by_parts(p, _coverage_for(T), a, b)


def _sliding_direct(p: Profile, ends: np.ndarray, a: float, b: np.ndarray) -> np.ndarray:
    P = p.antiderivative()
    out = np.empty(b.size)
    for i, bi in enumerate(b):
        u = (ends - bi) / a
        vals = P(u.ravel()).reshape(-1, 2)
        out[i] = a * math.fsum(vals[:, 1] - vals[:, 0])
    return out


# interval sets are immutable, so coverage tables are cached per object;
# the bound keeps memory finite when many large sets flow through
_COVERAGE_CACHE: dict = {}
_COVERAGE_ORDER: list = []


def _coverage_for(T: IntervalSet) -> "_Coverage":
    key = id(T)
    hit = _COVERAGE_CACHE.get(key)
    if hit is not None and hit[0] is T:
        return hit[1]
    cov = _Coverage(T.to_floats())
    _COVERAGE_CACHE[key] = (T, cov)
    _COVERAGE_ORDER.append(key)
    while len(_COVERAGE_ORDER) > 8:
        old = _COVERAGE_ORDER.pop(0)
        _COVERAGE_CACHE.pop(old, None)
    return cov


class _Coverage:
    """C(x) = lambda(T ∩ (-inf, x]) and its antiderivative Q, vectorized."""

    def __init__(self, ends: np.ndarray):
        xs = ends.ravel()
        cvals = np.empty(xs.size)
        cum = np.concatenate([[0.0], np.cumsum(ends[:, 1] - ends[:, 0])])
        cvals[0::2] = cum[:-1]
        cvals[1::2] = cum[1:]
        slopes = np.zeros(xs.size - 1)
        slopes[0::2] = 1.0  # inside intervals C has slope 1, outside 0
        widths = np.diff(xs)
        areas = widths * (cvals[:-1] + cvals[1:]) / 2.0
        self.xs = xs
        self.c = cvals
        self.q = np.concatenate([[0.0], np.cumsum(areas)])
        self.slopes = slopes
        self.total = float(cum[-1])

    def C(self, x):
        return np.interp(x, self.xs, self.c)

    def Q(self, x):
        x = np.asarray(x, dtype=np.float64)
        idx = np.clip(np.searchsorted(self.xs, x, side="right") - 1, 0, self.xs.size - 2)
        t = x - self.xs[idx]
        val = self.q[idx] + t * (self.c[idx] + t * self.slopes[idx] / 2.0)
        below = x <= self.xs[0]
        above = x >= self.xs[-1]
        val = np.where(below, 0.0, val)
        return np.where(above, self.q[-1] + (x - self.xs[-1]) * self.total, val)


def _sliding_by_parts(p: Profile, cover: "_Coverage", a: float, b: np.ndarray) -> np.ndarray:
    """F(b) = -∫ C(x) d/dx[p((x-b)/a)] dx; needs only O(knots) evaluations
    of the coverage antiderivative per b, independent of |T|."""
    xs = p.xs
    slopes = p.slopes()
    # interior and edge jumps of p: d/dx contributes J_k * delta at knot k
    jumps_x = [xs[0]]
    jumps_v = [float(p.vl[0])]
    for k in range(1, p.piece_count):
        j = float(p.vl[k] - p.vr[k - 1])
        if j != 0.0:
            jumps_x.append(xs[k])
            jumps_v.append(j)
    jumps_x.append(xs[-1])
    jumps_v.append(-float(p.vr[-1]))
    jx = np.array(jumps_x)
    jv = np.array(jumps_v)

    knots = b[:, None] + a * xs[None, :]
    Q = cover.Q(knots.ravel()).reshape(knots.shape)
    piece_term = -(slopes[None, :] / a) * (Q[:, 1:] - Q[:, :-1])
    jump_pts = b[:, None] + a * jx[None, :]
    jump_term = -jv[None, :] * cover.C(jump_pts.ravel()).reshape(jump_pts.shape)
    return piece_term.sum(axis=1) + jump_term.sum(axis=1)


# -- spectral absolute-continuity diagnostic -----------------------------------


def ac_diagnostic(
    p: Profile,
    power: float,
    cutoffs,
    samples: int = 1 << 20,
) -> np.ndarray:
    """Partial integrals I(R) = ∫_{|r|<=R} |p_hat(r)|^2 |r|^power dr.

    Sampled on a buffer of 4x the support width with a flat-top taper: the
    window equals 1 across the central half (where the support lives, so
    Plancherel survives) and falls off as a raised cosine outside it.
    Growth across doubling cutoffs signals a non-integrable tail; a plateau
    is consistent with the finiteness criterion.
    """
    if power < 0:
        raise ValueError("power must be non-negative")
    cutoffs = np.asarray(cutoffs, dtype=np.float64)
    if cutoffs.size == 0 or np.any(np.diff(cutoffs) <= 0):
        raise ValueError("cutoffs must be ascending and non-empty")
    s0, s1 = p.support
    width = s1 - s0
    center = (s0 + s1) / 2.0
    span = 4.0 * width
    xs = center - span / 2.0 + span * np.arange(samples) / samples
    vals = p(xs)
    rel = (xs - (center - span / 2.0)) / span
    taper = np.ones(samples)
    left = rel < 0.25
    right = rel > 0.75
    taper[left] = 0.5 * (1.0 - np.cos(4.0 * np.pi * rel[left]))
    taper[right] = 0.5 * (1.0 - np.cos(4.0 * np.pi * (1.0 - rel[right])))
    dx = span / samples
    spectrum = np.fft.fft(vals * taper) * dx
    freqs = np.fft.fftfreq(samples, dx)
    density = np.abs(spectrum) ** 2 * np.abs(freqs) ** power
    order = np.argsort(np.abs(freqs), kind="stable")
    absf = np.abs(freqs)[order]
    cum = np.cumsum(density[order]) * (1.0 / span)
    idx = np.searchsorted(absf, cutoffs, side="right") - 1
    if np.any(idx < 0):
        raise ValueError("cutoff below the frequency resolution")
    return cum[idx]


# -- Brunn-Minkowski concavity check ------------------------------------------


def concavity_check(
    p: Profile, d: int, tol: float = 1e-9, refine: int = 4
) -> tuple[bool, float]:
    """Midpoint concavity of p^(1/(d-1)) on its support.

    Tests every pair on the 4x-refined breakpoint grid; returns
    (is_concave, worst_margin) where the margin is the most negative
    midpoint defect (>= -tol passes).
    """
    if d < 2:
        raise ValueError("dimension must be at least 2")
    s0, s1 = p.support
    base = [s0]
    for i in range(p.piece_count):
        a, b = p.xs[i], p.xs[i + 1]
        for j in range(1, refine + 1):
            base.append(a + (b - a) * j / refine)
    grid = np.unique(np.asarray(base))
    exponent = 1.0 / (d - 1)
    q = np.maximum(p(grid), 0.0) ** exponent
    worst = 0.0
    n = grid.size
    chunk = max(1, 2_000_000 // max(n, 1))
    for start in range(0, n, chunk):
        gi = grid[start : start + chunk, None]
        qi = q[start : start + chunk, None]
        mids = (gi + grid[None, :]) / 2.0
        qm = np.maximum(p(mids.ravel()), 0.0).reshape(mids.shape) ** exponent
        margin = qm - (qi + q[None, :]) / 2.0
        worst = min(worst, float(np.min(margin)))
    return worst >= -tol, worst


# -- convolution differentiation identity ---------------------------------------


def convolution_identity_check(
    p: Profile,
    q: StepProfile,
    samples=None,
    fd_step: float = 1e-4,
) -> float:
    """Max deviation between the finite-difference derivative of p*q and
    (p' * q), both evaluated in closed form.

    Default samples avoid the kinks of p*q (where one-sided curvature makes
    central differences first-order); p*q is piecewise quadratic elsewhere,
    so central differences are exact up to roundoff.
    """
    if np.all(q.vals == 0.0):
        return 0.0
    P = p.antiderivative()
    Qanti = q.antiderivative()
    g = p.derivative_step()

    qc, qd = q.edges[:-1], q.edges[1:]
    qv = q.vals

    def conv(x):
        x = np.asarray(x, dtype=np.float64)
        acc = np.zeros(x.shape)
        for c, dd, v in zip(qc, qd, qv):
            if v != 0.0:
                acc += v * (P(x - c) - P(x - dd))
        return acc

    ge, gv = g.edges, g.vals

    def deriv_conv(x):
        x = np.asarray(x, dtype=np.float64)
        acc = np.zeros(x.shape)
        for i, v in enumerate(gv):
            if v != 0.0:
                acc += v * (Qanti(x - ge[i]) - Qanti(x - ge[i + 1]))
        return acc

    if samples is None:
        lo = p.support[0] + q.support[0]
        hi = p.support[1] + q.support[1]
        pad = 0.1 * (hi - lo)
        samples = np.linspace(lo - pad, hi + pad, 801)
    samples = np.asarray(samples, dtype=np.float64)
    kinks = (np.add.outer(p.xs, q.edges)).ravel()
    dist = np.min(np.abs(samples[:, None] - kinks[None, :]), axis=1)
    samples = samples[dist > 2.5 * fd_step]
    if samples.size == 0:
        raise ValueError("no samples left after removing kink neighborhoods")
    fd = (conv(samples + fd_step) - conv(samples - fd_step)) / (2.0 * fd_step)
    return float(np.max(np.abs(fd - deriv_conv(samples))))
