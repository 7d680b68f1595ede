"""Finite unions of half-open intervals with exact dyadic endpoints.

An :class:`IntervalSet` stores all endpoints as int64 numerators over one
shared power-of-two denominator, so boolean operations, measures and affine
images are exact while sets with millions of components stay cheap.  The
half-open ``[lo, hi)`` convention makes partitions measure-exact; it differs
from closed intervals only on null sets, which never affect a measure.

Locally finite sets are represented by their restriction to a
:class:`Window`; constructions record their window and verification
operations refuse queries outside it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dyadic import Dyadic, as_dyadic
from .errors import ExactnessOverflowError

# int64 guard: |numerator| must stay clear of 2**63 through one alignment shift
_MAX_BITS = 58


def _check_bits(arr: np.ndarray, bits: int = _MAX_BITS, what: str = "endpoint"):
    if arr.size and int(np.max(np.abs(arr))) >> bits:
        raise ExactnessOverflowError(
            f"{what} magnitude exceeds 2**{bits}; reduce exponents or coordinates"
        )


@dataclass(frozen=True)
class Window:
    """A bounded truncation horizon ``[lo, hi)`` for locally finite sets."""

    lo: Dyadic
    hi: Dyadic

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"window requires lo < hi, got [{self.lo}, {self.hi})")

    @staticmethod
    def of(lo, hi) -> "Window":
        return Window(as_dyadic(lo), as_dyadic(hi))

    @property
    def span(self) -> Dyadic:
        return self.hi - self.lo

    def contains(self, x) -> bool:
        x = as_dyadic(x)
        return self.lo <= x and x <= self.hi

    def contains_range(self, lo, hi) -> bool:
        return self.contains(lo) and self.contains(hi)

    def to_json(self):
        return [self.lo.num, self.lo.exp, self.hi.num, self.hi.exp]

    @staticmethod
    def from_json(obj) -> "Window":
        nl, el, nh, eh = obj
        return Window(Dyadic(nl, el), Dyadic(nh, eh))

    def __str__(self):
        return f"[{self.lo}, {self.hi})"


class IntervalSet:
    """Normalized finite union of disjoint half-open dyadic intervals."""

    __slots__ = ("_nums", "_exp")

    def __init__(self, pairs=()):
        """Build from (lo, hi) pairs; degenerate pairs dropped, overlaps merged."""
        lows, highs, exp = _pairs_to_arrays(pairs)
        self._nums, self._exp = _normalize_arrays(lows, highs, exp)

    # -- raw constructors ------------------------------------------------

    @classmethod
    def _raw(cls, nums: np.ndarray, exp: int) -> "IntervalSet":
        """Wrap already-normalized data (sorted, disjoint, non-degenerate)."""
        obj = cls.__new__(cls)
        obj._nums = nums
        obj._exp = exp
        return obj

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls._raw(np.empty((0, 2), dtype=np.int64), 0)

    @classmethod
    def from_arrays(cls, lows, highs, exp: int) -> "IntervalSet":
        """Build from integer numerator arrays at a common exponent."""
        try:
            lows = np.asarray(lows, dtype=np.int64)
            highs = np.asarray(highs, dtype=np.int64)
        except OverflowError as e:
            raise ExactnessOverflowError(f"numerators exceed int64: {e}") from None
        nums, e = _normalize_arrays(lows, highs, exp)
        return cls._raw(nums, e)

    @classmethod
    def point_window(cls, window: Window) -> "IntervalSet":
        return cls([(window.lo, window.hi)])

    # -- basic views -------------------------------------------------------

    def __len__(self) -> int:
        return self._nums.shape[0]

    def __bool__(self) -> bool:
        return self._nums.shape[0] > 0

    @property
    def exponent(self) -> int:
        return self._exp

    def endpoints(self, i: int) -> tuple[Dyadic, Dyadic]:
        lo, hi = self._nums[i]
        return Dyadic(int(lo), self._exp), Dyadic(int(hi), self._exp)

    def __iter__(self):
        for i in range(len(self)):
            yield self.endpoints(i)

    def __eq__(self, other):
        if not isinstance(other, IntervalSet):
            return NotImplemented
        if len(self) != len(other):
            return False
        if len(self) == 0:
            return True
        a, b, _ = _align(self, other)
        return bool(np.array_equal(a, b))

    def __hash__(self):
        return hash((self._exp, self._nums.tobytes()))

    def __repr__(self):
        if len(self) <= 6:
            body = ", ".join(f"[{lo}, {hi})" for lo, hi in self)
        else:
            lo0, hi0 = self.endpoints(0)
            lon, hin = self.endpoints(len(self) - 1)
            body = f"[{lo0}, {hi0}) ... [{lon}, {hin}) ({len(self)} intervals)"
        return f"IntervalSet({{{body}}})"

    def to_floats(self) -> np.ndarray:
        """(N, 2) float endpoints; exact whenever numerators fit in 53 bits."""
        return self._nums.astype(np.float64) * 2.0 ** (-self._exp)

    def span(self) -> tuple[Dyadic, Dyadic]:
        if not self:
            raise ValueError("empty set has no span")
        return self.endpoints(0)[0], self.endpoints(len(self) - 1)[1]

    # -- measure ----------------------------------------------------------

    def measure(self) -> Dyadic:
        """Exact total length, Σ (hi - lo)."""
        if not self:
            return Dyadic(0)
        d = self._nums[:, 1] - self._nums[:, 0]
        # diffs are positive and bounded by the global span, so the int64 sum
        # is safe given the construction guard; verify cheaply anyway
        total = int(np.sum(d, dtype=np.int64))
        if total < 0 or total < int(np.max(d)):
            raise ExactnessOverflowError("measure sum overflowed int64")
        return Dyadic(total, self._exp)

    # -- set operations -----------------------------------------------------

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        return boolean(self, other, "intersect")

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return boolean(self, other, "union")

    def symmdiff(self, other: "IntervalSet") -> "IntervalSet":
        return boolean(self, other, "symmdiff")

    def difference(self, other: "IntervalSet") -> "IntervalSet":
        return boolean(self, other, "difference")

    def restrict(self, window: Window) -> "IntervalSet":
        return self.intersect(IntervalSet.point_window(window))

    def complement_within(self, window: Window) -> "IntervalSet":
        return IntervalSet.point_window(window).difference(self)

    def contains_point(self, x) -> bool:
        if not self:
            return False
        x = as_dyadic(x)
        xf = x.as_fraction()
        import bisect

        lows = [Dyadic(int(n), self._exp).as_fraction() for n in self._nums[:, 0]]
        idx = bisect.bisect_right(lows, xf) - 1
        if idx < 0:
            return False
        hi = Dyadic(int(self._nums[idx, 1]), self._exp).as_fraction()
        return xf < hi

    # -- affine image ---------------------------------------------------------

    def affine(self, scale, shift) -> "IntervalSet":
        """Exact image {scale*s + shift : s in S}; scale must be positive."""
        scale = as_dyadic(scale)
        shift = as_dyadic(shift)
        if not Dyadic(0) < scale:
            raise ValueError(f"affine scale must be positive, got {scale}")
        if not self:
            return IntervalSet.empty()
        nums = self._nums.astype(object)
        scaled = nums * scale.num  # exponent exp + scale.exp
        e = self._exp + scale.exp
        e_out = max(e, shift.exp)
        scaled <<= e_out - e
        scaled += shift.num << (e_out - shift.exp)
        return IntervalSet.from_arrays(scaled[:, 0], scaled[:, 1], e_out)

    def translate(self, shift) -> "IntervalSet":
        return self.affine(Dyadic(1), shift)

    # -- JSON ----------------------------------------------------------------

    def to_json(self):
        """Array of [num_lo, exp_lo, num_hi, exp_hi] in canonical form."""
        out = []
        for lo, hi in self:
            out.append([lo.num, lo.exp, hi.num, hi.exp])
        return out

    @staticmethod
    def from_json(obj) -> "IntervalSet":
        pairs = []
        for nl, el, nh, eh in obj:
            pairs.append((Dyadic(nl, el), Dyadic(nh, eh)))
        return IntervalSet(pairs)


# -- internals ------------------------------------------------------------


def _pairs_to_arrays(pairs):
    lows_d = []
    highs_d = []
    for lo, hi in pairs:
        lows_d.append(as_dyadic(lo))
        highs_d.append(as_dyadic(hi))
    if not lows_d:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64), 0
    exp = 0
    for d in lows_d:
        exp = max(exp, d.exp)
    for d in highs_d:
        exp = max(exp, d.exp)
    lows = np.array([d.num << (exp - d.exp) for d in lows_d], dtype=object)
    highs = np.array([d.num << (exp - d.exp) for d in highs_d], dtype=object)
    mx = max(int(np.max(np.abs(lows))), int(np.max(np.abs(highs))), 1)
    if mx >> _MAX_BITS:
        raise ExactnessOverflowError(
            f"endpoints need more than 2**{_MAX_BITS} at exponent {exp}"
        )
    return lows.astype(np.int64), highs.astype(np.int64), exp


def _normalize_arrays(lows: np.ndarray, highs: np.ndarray, exp: int):
    """Sort, drop degenerate, merge overlapping/adjacent; reduce exponent."""
    if np.any(lows > highs):
        i = int(np.argmax(lows > highs))
        raise ValueError(
            f"interval has lo > hi: ({Dyadic(int(lows[i]), exp)}, "
            f"{Dyadic(int(highs[i]), exp)})"
        )
    keep = lows < highs
    lows, highs = lows[keep], highs[keep]
    if lows.size == 0:
        return np.empty((0, 2), dtype=np.int64), 0
    _check_bits(lows)
    _check_bits(highs)
    order = np.argsort(lows, kind="stable")
    lows, highs = lows[order], highs[order]
    # merge: a new interval starts where lo strictly exceeds the running max hi
    run_hi = np.maximum.accumulate(highs)
    starts = np.empty(lows.size, dtype=bool)
    starts[0] = True
    starts[1:] = lows[1:] > run_hi[:-1]
    idx = np.flatnonzero(starts)
    out = np.empty((idx.size, 2), dtype=np.int64)
    out[:, 0] = lows[idx]
    ends = np.append(idx[1:], lows.size)
    out[:, 1] = run_hi[ends - 1]
    return _reduce_exponent(out, exp)


def _reduce_exponent(nums: np.ndarray, exp: int):
    if exp == 0 or nums.size == 0:
        return nums, exp if nums.size else 0
    acc = int(np.bitwise_or.reduce(nums.ravel()))
    if acc == 0:
        return nums, 0
    tz = (acc & -acc).bit_length() - 1
    shift = min(tz, exp)
    if shift:
        nums = nums >> shift
        exp -= shift
    return nums, exp


def _align(a: IntervalSet, b: IntervalSet):
    e = max(a._exp, b._exp)
    an, bn = a._nums, b._nums
    if e > a._exp:
        _check_bits(an, 62 - (e - a._exp), "aligned endpoint")
        an = an << (e - a._exp)
    if e > b._exp:
        _check_bits(bn, 62 - (e - b._exp), "aligned endpoint")
        bn = bn << (e - b._exp)
    return an, bn, e


_OPS = {
    "intersect": lambda a, b: a & b,
    "union": lambda a, b: a | b,
    "symmdiff": lambda a, b: a ^ b,
    "difference": lambda a, b: a & ~b,
}


def boolean(s: IntervalSet, t: IntervalSet, op: str) -> IntervalSet:
    """Exact set-theoretic combination of two interval sets."""
    if op not in _OPS:
        raise ValueError(f"unknown boolean op {op!r}; expected one of {sorted(_OPS)}")
    an, bn, e = _align(s, t)
    if an.size == 0 and bn.size == 0:
        return IntervalSet.empty()
    coords = np.unique(np.concatenate([an.ravel(), bn.ravel()]))
    if coords.size < 2:
        return IntervalSet.empty()
    seg_lo = coords[:-1]
    in_a = _membership(an, seg_lo)
    in_b = _membership(bn, seg_lo)
    keep = _OPS[op](in_a, in_b)
    if not np.any(keep):
        return IntervalSet.empty()
    # merge adjacent kept segments: segment i spans [coords[i], coords[i+1])
    starts = np.empty(keep.size, dtype=bool)
    starts[0] = keep[0]
    starts[1:] = keep[1:] & ~keep[:-1]
    stops = np.empty(keep.size, dtype=bool)
    stops[-1] = keep[-1]
    stops[:-1] = keep[:-1] & ~keep[1:]
    out = np.empty((int(np.sum(starts)), 2), dtype=np.int64)
    out[:, 0] = coords[:-1][starts]
    out[:, 1] = coords[1:][stops]
    nums, e = _reduce_exponent(out, e)
    return IntervalSet._raw(nums, e)


def _membership(nums: np.ndarray, points: np.ndarray) -> np.ndarray:
    """points[i] in the union, evaluated with half-open semantics."""
    if nums.size == 0:
        return np.zeros(points.size, dtype=bool)
    lo = np.searchsorted(nums[:, 0], points, side="right")
    hi = np.searchsorted(nums[:, 1], points, side="right")
    return lo - hi == 1


def normalize(pairs) -> IntervalSet:
    """Public name for the normalizing constructor."""
    return IntervalSet(pairs)
