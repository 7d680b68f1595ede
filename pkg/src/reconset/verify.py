"""Verification harness: measure vectors, monotonicity and injectivity
reports, Monte Carlo reconstruction rates, and the two-test-set
counterexample searcher.

Separation policy: exact-arithmetic paths demand strict inequality, while
quadrature-backed paths demand separation above 10x the reported quadrature
error — anything closer is flagged indeterminate rather than called a
collision.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .dyadic import Dyadic, as_dyadic, snap
from .errors import SearchBudgetError, WindowExceededError
from .gridsets import GridSet, RandomLevels, sample_grid_set
from .intervals import IntervalSet, Window
from .shapes import Pose, SlabTestSet, intersection_measure_detailed, radon_profile


# -- family grids -----------------------------------------------------------------


@dataclass(frozen=True)
class IntervalFamilyGrid:
    """Intervals [x, x+L) on a rectangular dyadic (x, L) parameter grid."""

    x_lo: Dyadic
    x_hi: Dyadic
    x_step: Dyadic
    l_lo: Dyadic
    l_hi: Dyadic
    l_step: Dyadic

    @staticmethod
    def of(x_lo, x_hi, x_step, l_lo, l_hi, l_step) -> "IntervalFamilyGrid":
        vals = [as_dyadic(v) for v in (x_lo, x_hi, x_step, l_lo, l_hi, l_step)]
        if not Dyadic(0) < vals[2] or not Dyadic(0) < vals[5]:
            raise ValueError("steps must be positive")
        return IntervalFamilyGrid(*vals)

    def xs(self) -> list:
        return _dyadic_range(self.x_lo, self.x_hi, self.x_step)

    def ls(self) -> list:
        return _dyadic_range(self.l_lo, self.l_hi, self.l_step)

    def instances(self) -> list:
        return [(x, L) for x in self.xs() for L in self.ls()]

    def describe(self) -> dict:
        return {
            "kind": "interval",
            "x": [str(self.x_lo), str(self.x_hi), str(self.x_step)],
            "L": [str(self.l_lo), str(self.l_hi), str(self.l_step)],
        }


def _dyadic_range(lo: Dyadic, hi: Dyadic, step: Dyadic) -> list:
    out = []
    v = lo
    while v <= hi:
        out.append(v)
        v = v + step
    return out


@dataclass(frozen=True)
class TranslateFamilyGrid:
    """Translates of a fixed shape over a uniform grid in each coordinate."""

    shape: object
    lo: tuple
    hi: tuple
    steps: tuple  # points per axis

    def instances(self) -> list:
        axes = [
            np.linspace(a, b, int(k)) for a, b, k in zip(self.lo, self.hi, self.steps)
        ]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
        return [Pose(tuple(float(c) for c in row), 1.0) for row in pts]

    def describe(self) -> dict:
        return {
            "kind": "translate",
            "lo": list(self.lo),
            "hi": list(self.hi),
            "steps": list(self.steps),
        }


# -- measure vectors ----------------------------------------------------------------


def measure_vector(instance, tests, profiles=None) -> tuple[np.ndarray, np.ndarray]:
    """Component i = measure of the instance against test i.

    Returns (values, error_bounds); exact paths report zero error.  The
    instance is either an (x, L) dyadic pair denoting [x, x+L), or a
    (shape, Pose) pair for slab tests.
    """
    values = []
    errors = []
    for idx, t in enumerate(tests):
        if isinstance(t, IntervalSet):
            x, L = instance
            E = IntervalSet([(x, x + L)])
            values.append(float(E.intersect(t).measure()))
            errors.append(0.0)
        elif isinstance(t, GridSet):
            x, L = instance
            _check_box_contains(t.levels, x, x + L)
            values.append(float(t.intersect_interval_measure(x, x + L)))
            errors.append(0.0)
        elif isinstance(t, SlabTestSet):
            shape, pose = instance
            prof = profiles[idx] if profiles else None
            v, e = intersection_measure_detailed(shape, pose, t, profile=prof)
            values.append(v)
            errors.append(e)
        else:
            raise TypeError(f"unknown test type {type(t).__name__}")
    return np.asarray(values), np.asarray(errors)


def _check_box_contains(levels: RandomLevels, lo: Dyadic, hi: Dyadic):
    blo = as_dyadic(levels.box_lo[0])
    bhi = as_dyadic(levels.box_hi[0])
    if lo < blo or bhi < hi:
        raise WindowExceededError(
            f"instance [{lo}, {hi}) outside the grid box [{blo}, {bhi})",
            required_lo=float(lo),
            required_hi=float(hi),
        )


# -- reports ---------------------------------------------------------------------


@dataclass
class MonotonicityReport:
    min_increment: float
    violations: list

    @property
    def passed(self) -> bool:
        return not self.violations and self.min_increment > 0

    def to_json(self):
        return {
            "min_increment": self.min_increment,
            "violations": self.violations,
            "passed": self.passed,
        }


def monotonicity_report(values) -> MonotonicityReport:
    """Min consecutive increment and the indices of non-increases."""
    vals = list(values)
    if len(vals) < 2:
        raise ValueError("monotonicity needs at least two values")
    diffs = [b - a for a, b in zip(vals, vals[1:])]
    violations = [i + 1 for i, d in enumerate(diffs) if not d > 0]
    return MonotonicityReport(float(min(diffs)), violations)


@dataclass
class VerificationReport:
    instance_count: int
    test_count: int
    min_separation: float
    witness_pair: tuple
    collisions: list
    indeterminate: bool
    quadrature_error: float
    grid: dict = field(default_factory=dict)
    seeds: dict = field(default_factory=dict)
    runtime: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.collisions and not self.indeterminate

    def to_json(self):
        return {
            "instances": self.instance_count,
            "tests": self.test_count,
            "min_separation": self.min_separation,
            "witness_pair": list(self.witness_pair),
            "collisions": self.collisions,
            "indeterminate": self.indeterminate,
            "quadrature_error": self.quadrature_error,
            "grid": self.grid,
            "seeds": self.seeds,
            "runtime": self.runtime,
            "passed": self.passed,
        }


def pairwise_min_linf(matrix: np.ndarray, threshold: float = 0.0):
    """Min pairwise l-infinity distance with a sort-assisted sweep.

    Returns (min_distance, witness (i, j), collisions at <= threshold).
    Sorting on the first component prunes: once the first-coordinate gap
    alone exceeds both the current minimum and the collision threshold,
    later rows cannot matter; the surviving window is handled vectorized.
    """
    n = matrix.shape[0]
    if n < 2:
        return math.inf, (-1, -1), []
    order = np.argsort(matrix[:, 0], kind="stable")
    m = matrix[order]
    col0 = m[:, 0]
    best = math.inf
    witness = (-1, -1)
    collisions = []
    for i in range(n - 1):
        cap = max(best, threshold)
        j_end = int(np.searchsorted(col0, col0[i] + cap, side="right")) if math.isfinite(cap) else n
        j_end = max(j_end, i + 2)
        j_end = min(j_end, n)
        block = m[i + 1 : j_end]
        if block.size == 0:
            continue
        dists = np.max(np.abs(block - m[i]), axis=1)
        k = int(np.argmin(dists))
        if float(dists[k]) < best:
            best = float(dists[k])
            witness = (int(order[i]), int(order[i + 1 + k]))
        hit = np.flatnonzero(dists <= threshold)
        for h in hit:
            collisions.append((int(order[i]), int(order[i + 1 + h])))
    return best, witness, collisions


def injectivity_report(grid, tests, resolution: int = 256, threads: int = 1) -> VerificationReport:
    """Pairwise separation of the measure-vector map over a finite family.

    Exact tests demand strict separation; quadrature-backed tests flag the
    report indeterminate when the minimum separation does not clear 10x the
    reported error.  With threads > 1 the measure rows are computed
    concurrently and merged by grid index, so the report is unchanged.
    """
    t0 = time.time()
    instances = grid.instances()
    profiles = None
    if instances and isinstance(instances[0], Pose):
        shape = grid.shape
        profiles = [
            None
            if t.full_space
            else radon_profile(shape, t.theta, resolution)
            for t in tests
        ]
        work = [((shape, pose), tests, profiles) for pose in instances]
    else:
        work = [(inst, tests, None) for inst in instances]
    if threads > 1 and len(work) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda args: measure_vector(*args), work))
    else:
        rows = [measure_vector(*args) for args in work]
    matrix = np.stack([r[0] for r in rows])
    qerr = float(np.max(np.stack([r[1] for r in rows]))) if rows else 0.0
    best, witness, collisions = pairwise_min_linf(matrix)
    indeterminate = qerr > 0 and best <= 10.0 * qerr and not collisions
    return VerificationReport(
        instance_count=len(instances),
        test_count=len(tests),
        min_separation=best,
        witness_pair=witness,
        collisions=collisions,
        indeterminate=indeterminate,
        quadrature_error=qerr,
        grid=grid.describe() if hasattr(grid, "describe") else {},
        runtime=time.time() - t0,
    )


# -- two-test-set counterexample searcher ---------------------------------------------


@dataclass
class CounterexamplePair:
    first: tuple  # (Dyadic, Dyadic)
    second: tuple
    a_discrepancy: Fraction
    b_discrepancy: Fraction
    grid_used: int

    def to_json(self):
        (x1, y1), (x2, y2) = self.first, self.second
        return {
            "first": [[x1.num, x1.exp], [y1.num, y1.exp]],
            "second": [[x2.num, x2.exp], [y2.num, y2.exp]],
            "a_discrepancy": float(self.a_discrepancy),
            "b_discrepancy": float(self.b_discrepancy),
            "grid_used": self.grid_used,
        }


class _Cumulative:
    """Exact piecewise-linear cumulative measure of an interval set.

    Slopes are 0/1 with dyadic breakpoints, so every evaluation at a dyadic
    point is exact dyadic arithmetic.
    """

    def __init__(self, S: IntervalSet):
        self.breaks: list[Dyadic] = []
        self.cum: list[Dyadic] = []  # cumulative measure at each break
        acc = Dyadic(0)
        for lo, hi in S:
            self.breaks.append(lo)
            self.cum.append(acc)
            acc = acc + (hi - lo)
            self.breaks.append(hi)
            self.cum.append(acc)
        self.total = acc
        self._breaks_f = np.array([float(b) for b in self.breaks])
        self._cum_f = np.array([float(c) for c in self.cum])

    def value_f(self, x: np.ndarray) -> np.ndarray:
        if not self.breaks:
            return np.zeros_like(np.asarray(x, dtype=np.float64))
        return np.interp(x, self._breaks_f, self._cum_f)

    def piece(self, x: Dyadic) -> tuple[int, Dyadic]:
        """(slope, intercept) of the cumulative at x: value = slope*x + c."""
        import bisect

        if not self.breaks:
            return 0, Dyadic(0)
        xf = x.as_fraction()
        keys = [b.as_fraction() for b in self.breaks]
        i = bisect.bisect_right(keys, xf) - 1
        if i < 0:
            return 0, Dyadic(0)
        if i >= len(self.breaks) - 1:
            return 0, self.total
        inside = i % 2 == 0  # pieces alternate inside/outside starting inside
        if inside:
            return 1, self.cum[i] - self.breaks[i]
        return 0, self.cum[i]

    def value(self, x: Dyadic) -> Dyadic:
        s, c = self.piece(x)
        return c + (x * Dyadic(s) if s else Dyadic(0))


def interval_counterexample(
    A: IntervalSet,
    B: IntervalSet,
    min_length=1,
    tol: float = 1e-9,
    window: Window | None = None,
    initial_grid: int = 256,
    max_rounds: int = 6,
) -> CounterexamplePair:
    """Two distinct intervals of length > min_length whose measures against
    both A and B agree within tol.

    Searches the planar map f(x, y) = (lambda(A ∩ [x,y]), lambda(B ∩ [x,y]))
    for image self-overlaps on a coarse grid, then resolves each candidate
    pair exactly on the affine pieces of f (slopes are 0/±1 with dyadic
    offsets, so solutions are dyadic and the discrepancies vanish exactly).
    Existence is guaranteed for any A, B; exhaustion signals a budget
    problem and raises SearchBudgetError.
    """
    min_length = as_dyadic(min_length)
    if window is None:
        hi = Dyadic(2)
        for S in (A, B):
            if S:
                lo0, hi0 = S.span()
                hi = max(hi, abs(lo0), abs(hi0))
        W = hi + min_length + Dyadic(4)
    else:
        W = max(abs(window.lo), abs(window.hi))
    CA, CB = _Cumulative(A), _Cumulative(B)
    sep_needed = max(100.0 * tol, 2.0 ** -20)

    grid = initial_grid
    for _ in range(max_rounds):
        pair = _search_on_grid(CA, CB, float(W), min_length, grid, sep_needed)
        if pair is not None:
            (z1, z2) = pair
            a1 = CA.value(z1[1]) - CA.value(z1[0])
            a2 = CA.value(z2[1]) - CA.value(z2[0])
            b1 = CB.value(z1[1]) - CB.value(z1[0])
            b2 = CB.value(z2[1]) - CB.value(z2[0])
            da = (a1 - a2).as_fraction()
            db = (b1 - b2).as_fraction()
            if abs(da) <= tol and abs(db) <= tol:
                return CounterexamplePair(z1, z2, da, db, grid)
        grid *= 4
    raise SearchBudgetError(
        f"no counterexample found up to a {grid // 4}x{grid // 4} grid",
        densest_grid=grid // 4,
    )


def _search_on_grid(CA, CB, W, min_length, grid, sep_needed):
    lo, hi = -W + 1.0, W - 1.0
    xs = np.linspace(lo, hi, grid)
    step = xs[1] - xs[0]
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    mask = (Y - X) > float(min_length) + 2.0 * step
    pts_x = X[mask]
    pts_y = Y[mask]
    fa = CA.value_f(pts_y) - CA.value_f(pts_x)
    fb = CB.value_f(pts_y) - CB.value_f(pts_x)
    bucket = 2.0 * step + 1e-12
    keys = np.stack(
        [np.floor(fa / bucket).astype(np.int64), np.floor(fb / bucket).astype(np.int64)],
        axis=1,
    )
    buckets: dict[tuple, list] = {}
    for idx in range(keys.shape[0]):
        buckets.setdefault((int(keys[idx, 0]), int(keys[idx, 1])), []).append(idx)
    min_dom = float(min_length)
    checked = 0
    for (ka, kb), members in buckets.items():
        cands = []
        for da in (-1, 0, 1):
            for db in (-1, 0, 1):
                cands.extend(buckets.get((ka + da, kb + db), []))
        for i in members:
            for j in cands:
                if j <= i:
                    continue
                if (
                    abs(pts_x[i] - pts_x[j]) < sep_needed + 2 * step
                    and abs(pts_y[i] - pts_y[j]) < sep_needed + 2 * step
                ):
                    continue
                if abs(fa[i] - fa[j]) > 2.1 * step or abs(fb[i] - fb[j]) > 2.1 * step:
                    continue
                checked += 1
                if checked > 200_000:
                    return None
                res = _exact_resolve(
                    CA,
                    CB,
                    (pts_x[i], pts_y[i]),
                    (pts_x[j], pts_y[j]),
                    step,
                    min_dom,
                    sep_needed,
                )
                if res is not None:
                    return res
    return None


def _exact_resolve(CA, CB, z1, z2, step, min_length, sep_needed):
    """Solve f(z1') = f(z2') exactly near the float candidates.

    Each coordinate is confined to its current affine piece of the relevant
    cumulative, the 2x4 dyadic system is solved with two coordinates pinned
    to snapped values, and all constraints are re-checked exactly.
    """
    coords_f = [z1[0], z1[1], z2[0], z2[1]]
    pinned = []
    for c in coords_f:
        s, _ = snap(float(c), 24)
        pinned.append(s)
    slopes_a = []
    slopes_b = []
    offs_a = []
    offs_b = []
    for c in pinned:
        sa, ca = CA.piece(c)
        sb, cb = CB.piece(c)
        slopes_a.append(sa)
        slopes_b.append(sb)
        offs_a.append(ca)
        offs_b.append(cb)
    # equations: (CA(y1) - CA(x1)) - (CA(y2) - CA(x2)) = 0, same for B
    # coefficients for (x1, y1, x2, y2)
    rows = [
        [-slopes_a[0], slopes_a[1], slopes_a[2], -slopes_a[3]],
        [-slopes_b[0], slopes_b[1], slopes_b[2], -slopes_b[3]],
    ]
    rhs = [
        (offs_a[0] - offs_a[1] - offs_a[2] + offs_a[3]).as_fraction(),
        (offs_b[0] - offs_b[1] - offs_b[2] + offs_b[3]).as_fraction(),
    ]
    from itertools import combinations

    for free in combinations(range(4), 2):
        solve_for = [k for k in range(4) if k not in free]
        m00 = Fraction(rows[0][solve_for[0]])
        m01 = Fraction(rows[0][solve_for[1]])
        m10 = Fraction(rows[1][solve_for[0]])
        m11 = Fraction(rows[1][solve_for[1]])
        det = m00 * m11 - m01 * m10
        vals: list[Fraction | None] = [None] * 4
        for k in free:
            vals[k] = pinned[k].as_fraction()
        r0 = rhs[0] - sum(Fraction(rows[0][k]) * vals[k] for k in free)
        r1 = rhs[1] - sum(Fraction(rows[1][k]) * vals[k] for k in free)
        if det != 0:
            vals[solve_for[0]] = (m11 * r0 - m01 * r1) / det
            vals[solve_for[1]] = (m00 * r1 - m10 * r0) / det
        else:
            # rank <= 1: try pinning one more variable
            if m00 != 0 or m01 != 0:
                if m00 != 0:
                    vals[solve_for[1]] = pinned[solve_for[1]].as_fraction()
                    vals[solve_for[0]] = (r0 - m01 * vals[solve_for[1]]) / m00
                else:
                    vals[solve_for[0]] = pinned[solve_for[0]].as_fraction()
                    vals[solve_for[1]] = (r0 - m00 * vals[solve_for[0]]) / m01
                if m10 * vals[solve_for[0]] + m11 * vals[solve_for[1]] != r1:
                    continue
            elif m10 != 0 or m11 != 0:
                if m10 != 0:
                    vals[solve_for[1]] = pinned[solve_for[1]].as_fraction()
                    vals[solve_for[0]] = (r1 - m11 * vals[solve_for[1]]) / m10
                else:
                    vals[solve_for[0]] = pinned[solve_for[0]].as_fraction()
                    vals[solve_for[1]] = (r1 - m10 * vals[solve_for[0]]) / m11
                if r0 != 0:
                    continue
            else:
                if r0 != 0 or r1 != 0:
                    continue
                vals[solve_for[0]] = pinned[solve_for[0]].as_fraction()
                vals[solve_for[1]] = pinned[solve_for[1]].as_fraction()
        if any(v is None for v in vals):
            continue
        cand = _validate_candidate(
            CA, CB, vals, pinned, step, min_length, sep_needed
        )
        if cand is not None:
            return cand
    return None


def _validate_candidate(CA, CB, vals, pinned, step, min_length, sep_needed):
    dys = []
    for v in vals:
        if v.denominator & (v.denominator - 1):
            return None  # not dyadic; a different pivot choice will be
        dys.append(Dyadic(v.numerator, v.denominator.bit_length() - 1))
    x1, y1, x2, y2 = dys
    # stay on the same affine pieces the system was built from
    for d, p in zip(dys, pinned):
        if abs(float(d) - float(p)) > 1.6 * step:
            return None
    for c, ref in ((x1, pinned[0]), (y1, pinned[1]), (x2, pinned[2]), (y2, pinned[3])):
        for C in (CA, CB):
            if C.piece(c) != C.piece(ref):
                return None
    if not (min_length < float(y1 - x1) and min_length < float(y2 - x2)):
        return None
    sep = max(abs(float(x1 - x2)), abs(float(y1 - y2)))
    if sep < sep_needed:
        return None
    a1 = CA.value(y1) - CA.value(x1)
    a2 = CA.value(y2) - CA.value(x2)
    b1 = CB.value(y1) - CB.value(x1)
    b2 = CB.value(y2) - CB.value(x2)
    if a1 != a2 or b1 != b2:
        return None
    return (x1, y1), (x2, y2)


# -- Monte Carlo reconstruction ---------------------------------------------------------


@dataclass
class MonteCarloReport:
    trials: int
    successes: int
    rate: float
    copies: int
    separation: float
    per_trial: list
    master_seed: int

    def to_json(self):
        return {
            "trials": self.trials,
            "successes": self.successes,
            "rate": self.rate,
            "copies": self.copies,
            "separation": self.separation,
            "per_trial": self.per_trial,
            "master_seed": self.master_seed,
        }


def monte_carlo_reconstruction(
    grid: IntervalFamilyGrid,
    levels: RandomLevels,
    copies: int,
    trials: int,
    seed: int,
    separation: float | None = None,
) -> MonteCarloReport:
    """Fraction of trials whose random test sets separate the whole family.

    A trial succeeds when no pair of family members has all its measure
    differences below the declared resolution separation (default
    1/(4 n^d)).  Per-trial seeds are logged for replay.
    """
    if trials < 0 or copies < 1:
        raise ValueError("need trials >= 0 and copies >= 1")
    n = levels.finest
    d = levels.d
    if separation is None:
        separation = 1.0 / (4.0 * float(n) ** d)
    instances = grid.instances()
    fine = _fine_endpoints(grid, levels)
    per_trial = []
    successes = 0
    for t in range(trials):
        trial_seeds = [(seed * 1_000_003 + t) * 1_009 + c for c in range(copies)]
        counts = np.empty((len(instances), copies), dtype=np.int64)
        for c, s in enumerate(trial_seeds):
            gs = sample_grid_set(levels, s)
            counts[:, c] = gs.interval_counts(fine[:, 0], fine[:, 1])
        matrix = counts.astype(np.float64) / float(n) ** d
        best, witness, collisions = pairwise_min_linf(
            matrix, threshold=separation * (1 - 1e-12)
        )
        ok = not collisions
        successes += ok
        per_trial.append(
            {"seeds": trial_seeds, "min_separation": best, "success": bool(ok)}
        )
    rate = successes / trials if trials else 0.0
    return MonteCarloReport(
        trials, successes, rate, copies, separation, per_trial, seed
    )


def _fine_endpoints(grid: IntervalFamilyGrid, levels: RandomLevels) -> np.ndarray:
    n = levels.finest
    blo = as_dyadic(levels.box_lo[0])
    bhi = as_dyadic(levels.box_hi[0])
    out = []
    for x, L in grid.instances():
        if x < blo or bhi < x + L:
            raise WindowExceededError(
                f"family member [{x}, {x+L}) outside box [{blo}, {bhi})"
            )
        ulo = (x - blo) * Dyadic(n)
        uhi = (x + L - blo) * Dyadic(n)
        if not (ulo.is_integer and uhi.is_integer):
            raise ValueError(
                "family grid must land on the fine grid for the vectorized "
                f"path (got [{x}, {x+L}) at resolution 1/{n})"
            )
        out.append((ulo.num, uhi.num))
    return np.asarray(out, dtype=np.int64)
