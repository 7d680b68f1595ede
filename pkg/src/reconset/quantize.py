"""Greedy quantizers: interval sets whose indicator tracks a smooth target.

The block-by-block rule on a unit cell [c, c+1) splits the cell into n equal
blocks (n a power of two) and keeps or skips each block so the running
integral of (chi_T - phi) stays inside [0, 1/n]; a final left trim makes the
cell integral vanish.  With the skip-preferring tie-break the kept-block
count after m blocks equals ceil(n * ∫_c^{c+m/n} phi), which is what the
vectorized implementation uses; `reference_greedy_mask` keeps the literal
loop for cross-checks.

Tiling the rule over integer cells with per-shell budgets delta(k) yields a
set T with |∫_a^b (chi_T - phi)| <= delta(floor|a|) + delta(floor|b|) over
the window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dyadic import Dyadic
from .errors import InfeasibleResolutionError
from .intervals import IntervalSet, Window

TRIM_EXPONENT = 44  # left-trim endpoints snap to 2**-44; cell integrals stay < 1e-12
MAX_BLOCKS_PER_CELL = 1 << 22


def _check_power_of_two(n: int, what: str = "n"):
    if n < 2 or n & (n - 1):
        raise ValueError(f"{what} must be a power of two >= 2, got {n}")


def least_power_of_two_above(x: float) -> int:
    """Smallest power of two strictly greater than x."""
    n = 2
    while n <= x:
        n <<= 1
    return n


def reference_greedy_mask(block_integrals: np.ndarray, n: int) -> tuple[np.ndarray, float]:
    """Literal block rule; returns (kept mask, final running integral)."""
    s = 0.0
    kept = np.zeros(n, dtype=bool)
    for m in range(n):
        skip = s - block_integrals[m]
        if m == 0 or skip < 0.0:
            kept[m] = True
            s = skip + 1.0 / n
        else:
            s = skip
    return kept, s


def greedy_mask(block_integrals: np.ndarray, n: int) -> tuple[np.ndarray, float]:
    """Vectorized block rule via the kept-count identity k_m = ceil(n A_m)."""
    a = np.cumsum(block_integrals)
    k = np.ceil(n * a - 1e-12)  # tolerate float dust just above integers
    k = np.maximum.accumulate(np.maximum(k, 1.0))  # block 0 is always kept
    kept = np.diff(np.concatenate([[0.0], k])) > 0.5
    total = float(math.fsum(block_integrals))
    return kept, float(k[-1]) / n - total


@dataclass(frozen=True)
class CellQuantization:
    """One quantized unit cell: kept blocks of width 1/n in [lo, lo+1)."""

    lo: int
    n: int
    kept: np.ndarray
    trim: Dyadic  # length removed from the start of the first kept run

    def interval_arrays(self) -> tuple[np.ndarray, np.ndarray, int]:
        """Run-length encode kept blocks into numerators at TRIM_EXPONENT."""
        kept = self.kept
        diff = np.diff(np.concatenate([[0], kept.view(np.int8), [0]]))
        starts = np.flatnonzero(diff == 1).astype(np.int64)
        stops = np.flatnonzero(diff == -1).astype(np.int64)
        shift = TRIM_EXPONENT - (self.n.bit_length() - 1)
        lo0 = self.lo * self.n
        lows = (lo0 + starts) << shift
        highs = (lo0 + stops) << shift
        if lows.size and self.trim.num:
            t = self.trim.num << (TRIM_EXPONENT - self.trim.exp)
            first_width = int(highs[0] - lows[0])
            lows[0] += min(t, first_width)
        return lows, highs, TRIM_EXPONENT


def quantize_cell(target, cell_lo: int, n: int) -> CellQuantization:
    """Run the block rule on [cell_lo, cell_lo + 1) with n blocks."""
    _check_power_of_two(n)
    if n > MAX_BLOCKS_PER_CELL:
        raise InfeasibleResolutionError(
            f"cell at {cell_lo} needs {n} blocks (> {MAX_BLOCKS_PER_CELL}); "
            "budgets demand more resolution than the desk-scale cap"
        )
    edges = cell_lo + np.arange(n + 1, dtype=np.float64) / n
    block_ints = np.asarray(target.consecutive_block_integrals(edges), dtype=np.float64)
    kept, h = greedy_mask(block_ints, n)
    h = min(max(h, 0.0), 1.0 / n)
    trim_num = round(h * (1 << TRIM_EXPONENT))
    return CellQuantization(cell_lo, n, kept, Dyadic(trim_num, TRIM_EXPONENT))


def cells_to_interval_set(cells) -> IntervalSet:
    lows_all = []
    highs_all = []
    for cell in cells:
        lows, highs, _ = cell.interval_arrays()
        lows_all.append(lows)
        highs_all.append(highs)
    if not lows_all:
        return IntervalSet.empty()
    lows = np.concatenate(lows_all)
    highs = np.concatenate(highs_all)
    keep = lows < highs
    return IntervalSet.from_arrays(lows[keep], highs[keep], TRIM_EXPONENT)


def greedy_quantizer(target, n: int) -> IntervalSet:
    """Quantize target restricted to [0, 1): kept blocks minus the left trim.

    Guarantees |∫_a^b (chi_T - phi)| <= 4/n for 0 <= a <= b <= 1 and
    ∫_0^1 (chi_T - phi) = 0 up to the trim snap (< 1e-12).
    """
    cell = quantize_cell(target, 0, n)
    return cells_to_interval_set([cell])


def shell_index(cell_lo: int) -> int:
    """Shell of the unit cell [cell_lo, cell_lo+1): floor(|a|) for a inside."""
    return cell_lo if cell_lo >= 0 else -cell_lo - 1


@dataclass(frozen=True)
class ShellBudget:
    """Per-shell quantization budgets delta(k), each in (0, 1)."""

    values: tuple

    def __post_init__(self):
        if not self.values:
            raise ValueError("shell budget needs at least one shell")
        for k, v in enumerate(self.values):
            if not (0.0 < v < 1.0):
                raise ValueError(f"delta({k}) = {v} outside (0, 1)")

    @staticmethod
    def from_callable(fn, max_shell: int) -> "ShellBudget":
        return ShellBudget(tuple(float(fn(k)) for k in range(max_shell + 1)))

    @staticmethod
    def constant(value: float, max_shell: int) -> "ShellBudget":
        return ShellBudget((float(value),) * (max_shell + 1))

    def __call__(self, k: int) -> float:
        if k >= len(self.values):
            raise IndexError(f"shell {k} beyond budget table (max {len(self.values) - 1})")
        return self.values[k]


def tiled_quantizer(target, delta: ShellBudget, window: Window):
    """Per-cell quantizers over a window with integer endpoints.

    Returns (T, cell_resolutions) where cell_resolutions maps cell start to
    the block count used; the bound |∫_a^b (chi_T - phi)| is
    delta(floor|a|) + delta(floor|b|) for a, b in the window.
    """
    if not (window.lo.is_integer and window.hi.is_integer):
        raise ValueError("tiled quantizer window endpoints must be integers")
    lo, hi = window.lo.num, window.hi.num
    cells = []
    resolutions = {}
    for c in range(lo, hi):
        n = least_power_of_two_above(4.0 / delta(shell_index(c)))
        cells.append(quantize_cell(target, c, n))
        resolutions[c] = n
    return cells_to_interval_set(cells), resolutions


# -- residual evaluation (guarantee checks) ---------------------------------


def coverage_before(endpoints: np.ndarray, x):
    """lambda(T ∩ (-inf, x]) for T given as sorted float (N, 2) endpoints."""
    x = np.asarray(x, dtype=np.float64)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    if endpoints.size == 0:
        out = np.zeros_like(x)
        return float(out[0]) if scalar else out
    lows = endpoints[:, 0]
    highs = endpoints[:, 1]
    cum = np.concatenate([[0.0], np.cumsum(highs - lows)])
    idx = np.searchsorted(lows, x, side="right")
    out = cum[idx]
    prev = idx - 1
    valid = prev >= 0
    overshoot = np.zeros_like(x)
    overshoot[valid] = np.maximum(0.0, highs[prev[valid]] - x[valid])
    out = out - overshoot
    return float(out[0]) if scalar else out


def quantizer_residual(T: IntervalSet, target, origin: float, points) -> np.ndarray:
    """D(x) = ∫_origin^x (chi_T - phi) at each point, vectorized."""
    pts = np.atleast_1d(np.asarray(points, dtype=np.float64))
    ends = T.to_floats()
    cover = coverage_before(ends, pts) - coverage_before(ends, np.array(origin))
    phi_int = np.asarray(target.integrate_phi(np.full(pts.shape, origin), pts))
    return cover - phi_int


def windowed_integral_norm(
    T: IntervalSet, target, x: float, a: float, samples: int = 512
) -> float:
    """sup over x-a <= u <= v <= x+a of |∫_u^v (chi_T - phi)|.

    The windowed norm the construction budgets control; evaluated on a
    sample grid refined by the interval endpoints inside the window.
    """
    ends = T.to_floats().ravel()
    inside = ends[(ends >= x - a) & (ends <= x + a)]
    pts = np.unique(
        np.concatenate([[x - a, x + a], inside, np.linspace(x - a, x + a, samples)])
    )
    D = quantizer_residual(T, target, x - a, pts)
    return float(D.max() - D.min())
