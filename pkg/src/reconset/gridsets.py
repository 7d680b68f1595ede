"""Randomized multi-level cube-grid test sets.

Each level i lays two nested grids over an integer box: fine cubes of side
1/n_i and coarse cells of side 1/g_i (both powers of two, with the chain
n_{i-1} | g_i and g_i | n_i).  Independently per coarse cell, a count m_D is
drawn uniformly from {0, ..., floor(p_i (n_i/g_i)^d)} and that many distinct
fine cubes are selected inside the cell; the level sets are combined by
symmetric difference on the finest grid, where measures are exact dyadic
counts.

Randomness is counter-based: a Philox stream keyed by (seed, level, cell)
makes every cell independent and the whole construction reproducible and
order-independent.

The copy count r = floor(2 dim_P / (d - b)) + 1 gives the number of
independent sets needed for a family with packing dimension dim_P whose
member boundaries have upper box dimension at most b.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .dyadic import Dyadic, as_dyadic


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class RandomLevels:
    """Validated level parameters for the random construction."""

    n: tuple  # fine cells per unit, one per level, powers of two
    g: tuple  # coarse cells per unit, powers of two ("log role")
    p: tuple  # densities, strictly decreasing, sum < 1
    box_lo: tuple
    box_hi: tuple

    @property
    def levels(self) -> int:
        return len(self.n)

    @property
    def d(self) -> int:
        return len(self.box_lo)

    @property
    def finest(self) -> int:
        return self.n[-1]

    def box_units(self) -> tuple:
        return tuple(b - a for a, b in zip(self.box_lo, self.box_hi))

    def tail_bound(self) -> float:
        """Mass budget of truncated levels; reported as verification slack."""
        return 0.0  # levels beyond the last are not represented at all


def validate_levels(n, g, p, box_lo=(0,), box_hi=(1,)) -> RandomLevels:
    """Check the divisibility chain and monotonicity; name the failing pair."""
    n = tuple(int(x) for x in n)
    g = tuple(int(x) for x in g)
    p = tuple(float(x) for x in p)
    box_lo = tuple(int(x) for x in box_lo)
    box_hi = tuple(int(x) for x in box_hi)
    if not (len(n) == len(g) == len(p)) or not n:
        raise ValueError("need equal, non-empty n/g/p level lists")
    if len(box_lo) != len(box_hi) or not box_lo:
        raise ValueError("box_lo/box_hi dimension mismatch")
    if any(b <= a for a, b in zip(box_lo, box_hi)):
        raise ValueError("box needs lo < hi componentwise")
    for i, x in enumerate(n):
        if not _is_pow2(x):
            raise ValueError(f"n[{i}] = {x} is not a power of two")
    for i, x in enumerate(g):
        if not _is_pow2(x):
            raise ValueError(f"g[{i}] = {x} is not a power of two")
    for i in range(len(n)):
        if g[i] > n[i] or n[i] % g[i]:
            raise ValueError(f"g[{i}] = {g[i]} does not divide n[{i}] = {n[i]}")
        if i > 0 and (g[i] % n[i - 1]):
            raise ValueError(
                f"n[{i-1}] = {n[i-1]} does not divide g[{i}] = {g[i]}"
            )
    for i, x in enumerate(p):
        if not (0.0 < x < 1.0):
            raise ValueError(f"p[{i}] = {x} outside (0, 1)")
    if any(b >= a for a, b in zip(p, p[1:])):
        raise ValueError("densities p must be strictly decreasing")
    if sum(p) >= 1.0:
        raise ValueError("sum of densities must stay below 1")
    return RandomLevels(n, g, p, box_lo, box_hi)


def _philox(seed: int, level: int, cell: int) -> np.random.Generator:
    key = (int(seed) << 64) ^ (int(level) << 48) ^ int(cell)
    return np.random.Generator(np.random.Philox(key=key))


def sample_level(levels: RandomLevels, i: int, seed: int) -> np.ndarray:
    """Select fine cubes for level i; deterministic given (seed, i, cell).

    Returns sorted flat indices into the box-wide fine grid at resolution
    n_i.  Per coarse cell D, m_D is uniform on {0, ..., floor(p (n/g)^d)} and
    the m_D distinct cubes are drawn by a sparse partial Fisher-Yates.
    """
    if not (0 <= i < levels.levels):
        raise IndexError(f"level {i} out of range")
    n, g, p = levels.n[i], levels.g[i], levels.p[i]
    d = levels.d
    units = levels.box_units()
    sub = n // g  # fine cubes per coarse cell edge
    cell_size = sub**d
    m_max = int(math.floor(p * cell_size))
    coarse_counts = tuple(u * g for u in units)
    fine_counts = tuple(u * n for u in units)
    total_coarse = int(np.prod(coarse_counts))
    picks = []
    for cell in range(total_coarse):
        rng = _philox(seed, i, cell)
        m = int(rng.integers(0, m_max + 1))
        if m == 0:
            continue
        local = _sparse_fisher_yates(rng, cell_size, m)
        # unravel coarse cell and local fine offsets into global fine indices
        rem = cell
        coarse_coord = []
        for size in reversed(coarse_counts):
            coarse_coord.append(rem % size)
            rem //= size
        coarse_coord.reverse()
        loc = np.asarray(local, dtype=np.int64)
        coords = np.empty((loc.size, d), dtype=np.int64)
        r = loc.copy()
        for k in reversed(range(d)):
            coords[:, k] = r % sub
            r //= sub
        flat = np.zeros(loc.size, dtype=np.int64)
        for k in range(d):
            flat = flat * fine_counts[k] + coarse_coord[k] * sub + coords[:, k]
        picks.append(flat)
    if not picks:
        return np.empty(0, dtype=np.int64)
    return np.sort(np.concatenate(picks))


def _sparse_fisher_yates(rng: np.random.Generator, n: int, m: int) -> list:
    """m distinct values from range(n): partial Fisher-Yates on a sparse map."""
    swap: dict[int, int] = {}
    out = []
    for j in range(m):
        k = int(rng.integers(j, n))
        vj = swap.get(j, j)
        vk = swap.get(k, k)
        out.append(vk)
        swap[k] = vj
        swap[j] = vk
    return out


@dataclass(frozen=True)
class GridSet:
    """Assembled random test set: level selections and their parity union."""

    levels: RandomLevels
    selections: tuple  # per level: sorted fine-cube flat index arrays
    seed: int
    parity: np.ndarray  # boolean d-array on the finest grid

    def measure(self) -> Dyadic:
        count = int(np.count_nonzero(self.parity))
        exp = (self.levels.finest.bit_length() - 1) * self.levels.d
        return Dyadic(count, exp)

    def level_measure(self, i: int) -> Dyadic:
        scale = (self.levels.n[i].bit_length() - 1) * self.levels.d
        return Dyadic(int(self.selections[i].size), scale)

    # -- exact 1-D interval intersections --------------------------------------

    @cached_property
    def _prefix_1d(self) -> np.ndarray:
        if self.levels.d != 1:
            raise ValueError("interval intersections need a 1-D grid set")
        flat = self.parity.ravel().astype(np.int64)
        return np.concatenate([[0], np.cumsum(flat)])

    def interval_counts(self, fine_lo, fine_hi) -> np.ndarray:
        """Cube counts of A over [lo, hi) given integer fine-grid endpoints.

        Vectorized exact path for families whose parameter grid lands on the
        fine grid: the measure is count / n^d with no partial cells.
        """
        prefix = self._prefix_1d
        return prefix[np.asarray(fine_hi)] - prefix[np.asarray(fine_lo)]

    def intersect_interval_measure(self, lo, hi) -> Dyadic:
        """lambda(A ∩ [lo, hi)) exactly, for dyadic endpoints."""
        lo = as_dyadic(lo)
        hi = as_dyadic(hi)
        if not lo < hi:
            return Dyadic(0)
        n = self.levels.finest
        j = n.bit_length() - 1
        blo = as_dyadic(self.levels.box_lo[0])
        bhi = as_dyadic(self.levels.box_hi[0])
        lo = max(lo, blo)
        hi = min(hi, bhi)
        if not lo < hi:
            return Dyadic(0)
        # positions scaled to fine-grid units: u = (x - box_lo) * n, exact
        ulo = (lo - blo) * Dyadic(n)
        uhi = (hi - blo) * Dyadic(n)
        prefix = self._prefix_1d
        i0, i1 = ulo.floor(), uhi.floor()
        total = Dyadic(0)
        if i0 == i1:
            if self.parity.ravel()[i0]:
                total = (uhi - ulo) * Dyadic(1, j)
            return total
        full = Dyadic(int(prefix[i1] - prefix[i0 + 1]), 0)
        total = full * Dyadic(1, j)
        if self.parity.ravel()[i0]:
            total = total + (Dyadic(i0 + 1) - ulo) * Dyadic(1, j)
        if i1 < self.parity.size and self.parity.ravel()[i1]:
            total = total + (uhi - Dyadic(i1)) * Dyadic(1, j)
        return total


def assemble(levels: RandomLevels, selections) -> GridSet:
    """Symmetric difference of the level sets on the finest grid, exactly."""
    if len(selections) != levels.levels:
        raise ValueError("need one selection per level")
    d = levels.d
    units = levels.box_units()
    fine = tuple(u * levels.finest for u in units)
    parity = np.zeros(fine, dtype=bool)
    for i, sel in enumerate(selections):
        n_i = levels.n[i]
        counts_i = tuple(u * n_i for u in units)
        level_mask = np.zeros(counts_i, dtype=bool)
        if sel.size:
            level_mask.ravel()[sel] = True
        rep = levels.finest // n_i
        for axis in range(d):
            level_mask = np.repeat(level_mask, rep, axis=axis)
        parity ^= level_mask
    return GridSet(levels, tuple(np.asarray(s, dtype=np.int64) for s in selections), -1, parity)


def sample_grid_set(levels: RandomLevels, seed: int) -> GridSet:
    """Sample every level and assemble; fully determined by (levels, seed)."""
    selections = tuple(sample_level(levels, i, seed) for i in range(levels.levels))
    gs = assemble(levels, selections)
    return GridSet(levels, gs.selections, seed, gs.parity)


# -- copy counts ---------------------------------------------------------------


@dataclass(frozen=True)
class CopyCount:
    dim_p: float
    d: int
    b: float

    def __post_init__(self):
        if self.dim_p < 0:
            raise ValueError("packing dimension bound must be non-negative")
        if not self.b < self.d:
            raise ValueError(f"boundary dimension b = {self.b} must be < d = {self.d}")


def required_copies(c: CopyCount) -> int:
    """r = floor(2 dim_P / (d - b)) + 1 independent sets."""
    return int(math.floor(2.0 * c.dim_p / (c.d - c.b))) + 1


# -- serialization ----------------------------------------------------------------


def save_grid_set(gs: GridSet, path: str):
    """Binary format: header (levels, box, n, g, p, seed) + per-level sorted
    cube-index arrays."""
    header = {
        "n": list(gs.levels.n),
        "g": list(gs.levels.g),
        "p": list(gs.levels.p),
        "box_lo": list(gs.levels.box_lo),
        "box_hi": list(gs.levels.box_hi),
        "seed": gs.seed,
    }
    arrays = {f"level_{i}": sel for i, sel in enumerate(gs.selections)}
    np.savez_compressed(path, header=json.dumps(header, sort_keys=True), **arrays)


def load_grid_set(path: str) -> GridSet:
    data = np.load(path, allow_pickle=False)
    header = json.loads(str(data["header"]))
    levels = validate_levels(
        header["n"], header["g"], header["p"], header["box_lo"], header["box_hi"]
    )
    selections = tuple(
        np.asarray(data[f"level_{i}"], dtype=np.int64) for i in range(levels.levels)
    )
    gs = assemble(levels, selections)
    return GridSet(levels, gs.selections, header["seed"], gs.parity)


def grid_summary(gs: GridSet) -> dict:
    """JSON summary with exact per-level and assembled measures."""
    return {
        "seed": gs.seed,
        "levels": gs.levels.levels,
        "d": gs.levels.d,
        "n": list(gs.levels.n),
        "g": list(gs.levels.g),
        "p": list(gs.levels.p),
        "box_lo": list(gs.levels.box_lo),
        "box_hi": list(gs.levels.box_hi),
        "level_measures": [str(gs.level_measure(i)) for i in range(gs.levels.levels)],
        "measure": str(gs.measure()),
        "cube_counts": [int(s.size) for s in gs.selections],
    }
