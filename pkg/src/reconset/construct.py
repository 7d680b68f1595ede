"""Explicit test-set constructions.

Three families of constructions live here:

* semigroup/avoidance sets for translates of interval unions: T = A ∪ (A+G)
  where G is the additive semigroup of the component lengths and A avoids its
  own G-translates while keeping positive measure in every interval at the
  declared resolution scale;

* the translate construction for a profile f: a logistic target phi is
  quantized with per-shell budgets sized from upper bounds on K(eps, f') so
  that b -> ∫_T f(x-b) dx is strictly increasing;

* the magnification construction: same skeleton with the slow-decay target
  (phi' ~ c1/(|x| log^2 |x|)) and budgets from both proof regimes, valid for
  every scale a >= 1 up to the declared horizon;

plus slab families that lift the 1-D sets to R^d through screened directions.

Every construction returns a certificate recording the budgets; the recorded
inequalities can be re-verified offline via ``recheck()``.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .analysis import VariationEnvelope, ac_diagnostic
from .dyadic import Dyadic, as_dyadic
from .errors import (
    GrowthCertificateError,
    InfeasibleResolutionError,
    SearchBudgetError,
)
from .intervals import IntervalSet, Window, boolean
from .profiles import Profile
from .quantize import ShellBudget, shell_index, tiled_quantizer
from .shapes import (
    Ball,
    Box,
    Direction,
    Polygon,
    Simplex,
    SlabTestSet,
    diameter_direction,
    radon_profile,
    slab_lift,
)
from .targets import Logistic, LogSquaredDecay, target_from_json

# normalization constants only need to bracket the support; a coarse snap
# keeps exponents small enough that affine images stay inside int64
SNAP_EXPONENT = 8


# -- semigroups and avoidance sets ------------------------------------------------


def semigroup(lengths, bound, max_elements: int = 200_000) -> list[Dyadic]:
    """All positive integer combinations of the lengths up to `bound`.

    Exactly enumerated, sorted, deduplicated; locally finite by construction.
    """
    ls = sorted({as_dyadic(x) for x in lengths})
    if not ls:
        raise ValueError("semigroup needs at least one length")
    if any(not Dyadic(0) < x for x in ls):
        raise ValueError("semigroup lengths must be positive")
    bound = as_dyadic(bound)
    if not Dyadic(0) < bound:
        raise ValueError("bound must be positive")
    out: list[Dyadic] = []
    seen = set()
    heap = [x for x in ls if x <= bound]
    heapq.heapify(heap)
    while heap:
        g = heapq.heappop(heap)
        if g in seen:
            continue
        seen.add(g)
        out.append(g)
        if len(out) > max_elements:
            raise InfeasibleResolutionError(
                f"semigroup exceeds {max_elements} elements below {bound}"
            )
        for a in ls:
            s = g + a
            if s <= bound and s not in seen:
                heapq.heappush(heap, s)
    return out


def avoidance_set(G, window: Window, rho) -> IntervalSet:
    """A ⊂ window with A ∩ (A+g) ∩ window = ∅ for all g, and positive
    measure in every subinterval of length >= rho.

    Cell-by-cell construction at grid scale rho/2: each cell receives one
    tiny interval placed inside the part not shadowed by earlier placements
    translated by ±G.  Both postconditions are re-checked exactly before
    returning.
    """
    rho = as_dyadic(rho)
    G = [as_dyadic(g) for g in G]
    if not G:
        raise ValueError("avoidance set needs a non-empty G")
    g_min = min(G)
    if not Dyadic(0) < rho or not rho < g_min:
        raise InfeasibleResolutionError(
            f"resolution rho = {rho} must satisfy 0 < rho < min(G) = {g_min}"
        )
    span = window.span
    reach = [g for g in G if g < span]
    half = rho.half()
    n_cells = (span.as_fraction() / half.as_fraction()).__floor__()
    if n_cells < 1:
        raise InfeasibleResolutionError("window shorter than rho/2")
    # width target: small enough that shadows can never fill a cell
    k = max(4 * (len(reach) + 1), 4)
    pad = 1
    while (1 << pad) < 4 * k:
        pad += 1
    w_target = Dyadic(half.num, half.exp + pad)

    import bisect

    placed: list[tuple[Dyadic, Dyadic]] = []  # in position order (cells left to right)
    placed_lo_f: list[float] = []  # float keys for bisect (exact at these scales)
    for i in range(n_cells):
        cell_lo = window.lo + Dyadic(i * half.num, half.exp)
        cell_hi = cell_lo + half
        cell = IntervalSet([(cell_lo, cell_hi)])
        shadows = []
        wmax = float(w_target)
        for g in reach:
            for s in (g, -g):
                # placed intervals with lo in [cell_lo - s - w, cell_hi - s]
                lo_f = float(cell_lo) - float(s) - wmax
                hi_f = float(cell_hi) - float(s)
                j0 = bisect.bisect_left(placed_lo_f, lo_f)
                j1 = bisect.bisect_right(placed_lo_f, hi_f)
                for j in range(j0, j1):
                    lo, hi = placed[j]
                    a, b = lo + s, hi + s
                    if a < cell_hi and cell_lo < b:
                        shadows.append((max(a, cell_lo), min(b, cell_hi)))
        free = cell.difference(IntervalSet(shadows)) if shadows else cell
        if not free:
            raise InfeasibleResolutionError(
                f"no room left in cell {i}; shadows filled it (|G|={len(reach)})"
            )
        # widest gap, then place min(w_target, half the gap) at its start
        best = max(free, key=lambda p: (p[1] - p[0]).as_fraction())
        glo, ghi = best
        width = min(w_target, (ghi - glo).half())
        if not Dyadic(0) < width:
            raise InfeasibleResolutionError(f"cell {i} gap degenerate")
        placed.append((glo, glo + width))
        placed_lo_f.append(float(glo))

    A = IntervalSet(placed)
    _check_avoidance(A, reach, window, half, n_cells)
    return A


def _check_avoidance(A: IntervalSet, reach, window: Window, half: Dyadic, n_cells: int):
    for g in reach:
        clash = A.intersect(A.translate(g)).restrict(window)
        if clash:
            raise AssertionError(f"avoidance violated at shift {g}: {clash}")
    for i in range(n_cells):
        cell_lo = window.lo + Dyadic(i * half.num, half.exp)
        cell = IntervalSet([(cell_lo, cell_lo + half)])
        if not Dyadic(0) < A.intersect(cell).measure():
            raise AssertionError(f"cell {i} has no mass")


def union_test_set(lengths, window: Window, rho) -> IntervalSet:
    """T = A ∪ (A + G) restricted to the window, G the length semigroup.

    Guarantee: x -> lambda((E+x) ∩ T) is strictly increasing for translation
    steps >= rho while E+x stays in the window (E any union of intervals
    with the given lengths); verified by the harness, not just asserted.
    """
    G = semigroup(lengths, window.span)
    A = avoidance_set(G, window, rho)
    T = A
    for g in G:
        T = T.union(A.translate(g).restrict(window))
    return T


# -- shared machinery for the profile constructions ----------------------------------


@dataclass(frozen=True)
class Normalization:
    """Affine data mapping the input profile to supp ⊆ [-1,1], mass 1."""

    center: Dyadic
    halfwidth: Dyadic
    mass: float

    def internal_profile(self, f: Profile) -> Profile:
        c, w = float(self.center), float(self.halfwidth)
        return f.shift(-c).scale_x(1.0 / w).scale_y(w / self.mass)

    @staticmethod
    def of(f: Profile) -> "Normalization":
        mass = f.integral()
        if mass <= 0:
            raise ValueError("profile must have positive mass")
        lo, hi = f.support
        from .dyadic import snap

        c, _ = snap((lo + hi) / 2.0, SNAP_EXPONENT)
        w_needed = max(hi - float(c), float(c) - lo)
        w, err = snap(w_needed, SNAP_EXPONENT)
        if float(w) < w_needed:
            w = w + Dyadic(1, SNAP_EXPONENT)
        return Normalization(c, w, mass)

    def to_json(self):
        return {
            "center": [self.center.num, self.center.exp],
            "halfwidth": [self.halfwidth.num, self.halfwidth.exp],
            "mass": self.mass,
        }

    @staticmethod
    def from_json(obj):
        return Normalization(
            Dyadic(*obj["center"]), Dyadic(*obj["halfwidth"]), obj["mass"]
        )


def _internal_window(window: Window, norm: Normalization) -> Window:
    """Integer hull of the window pulled into normalized coordinates."""
    lo = (window.lo - norm.center).as_fraction() / norm.halfwidth.as_fraction()
    hi = (window.hi - norm.center).as_fraction() / norm.halfwidth.as_fraction()
    return Window.of(int(math.floor(lo)), int(math.ceil(hi)))


@dataclass
class ShellRow:
    k: int
    phi_min: float
    eps: float
    k_bound: float
    h: float
    delta: float | None = None
    n: int | None = None

    def to_json(self):
        return {
            "k": self.k,
            "phi_min": self.phi_min,
            "eps": self.eps,
            "k_bound": self.k_bound,
            "h": self.h,
            "delta": self.delta,
            "n": self.n,
        }

    @staticmethod
    def from_json(o):
        return ShellRow(o["k"], o["phi_min"], o["eps"], o["k_bound"], o["h"], o["delta"], o["n"])


@dataclass
class TranslateCertificate:
    """Budgets of a translate construction, re-verifiable offline."""

    phi: dict
    normalization: Normalization
    requested_window: Window
    effective_window: Window
    shells: list
    guarantee_lower_bound: float
    interval_count: int

    def recheck(self) -> list[str]:
        problems = []
        target = target_from_json(self.phi)
        rows = {r.k: r for r in self.shells}
        for r in self.shells:
            if abs(r.eps - r.phi_min / 4.0) > 1e-12 * max(r.phi_min, 1.0):
                problems.append(f"shell {r.k}: eps != phi_min/4")
            if r.h * 4.0 * r.k_bound > r.phi_min * (1 + 1e-12):
                problems.append(f"shell {r.k}: h * 4K exceeds min phi'")
            got = target.dphi_min(-(r.k + 2.0), r.k + 2.0)
            if got < r.phi_min * (1 - 1e-9):
                problems.append(f"shell {r.k}: recorded phi_min too large")
            if r.delta is not None:
                nxt = rows.get(r.k + 1)
                if nxt is not None and r.delta > nxt.h / 2.0 * (1 + 1e-12):
                    problems.append(f"shell {r.k}: delta > h(k+1)/2")
                if r.n is not None and not (r.n > 4.0 / r.delta):
                    problems.append(f"shell {r.k}: n not above 4/delta")
        hs = [r.h for r in sorted(self.shells, key=lambda r: r.k)]
        if any(b > a * (1 + 1e-12) for a, b in zip(hs, hs[1:])):
            problems.append("h not non-increasing across shells")
        return problems

    def to_json(self):
        return {
            "kind": "translate",
            "phi": self.phi,
            "normalization": self.normalization.to_json(),
            "requested_window": self.requested_window.to_json(),
            "effective_window": self.effective_window.to_json(),
            "shells": [r.to_json() for r in self.shells],
            "guarantee_lower_bound": self.guarantee_lower_bound,
            "interval_count": self.interval_count,
        }

    @staticmethod
    def from_json(o):
        return TranslateCertificate(
            o["phi"],
            Normalization.from_json(o["normalization"]),
            Window.from_json(o["requested_window"]),
            Window.from_json(o["effective_window"]),
            [ShellRow.from_json(r) for r in o["shells"]],
            o["guarantee_lower_bound"],
            o["interval_count"],
        )


def translate_test_set(
    f: Profile, window: Window, rate: float = 0.5
) -> tuple[IntervalSet, TranslateCertificate]:
    """Test set T making b -> ∫_T f(x - b) dx strictly increasing.

    The profile is normalized to support ⊆ [-1, 1] and mass 1; a logistic
    target is quantized with per-shell budgets
    eps(k) = min phi'/4,  h(k) = min phi' / (4 K(eps(k), f')),
    delta(k) = h(k+1)/2, each K value an exact-witness upper bound.
    The guarantee target (f * chi_T)' >= min phi'/4 on each shell is recorded
    and meant to be verified numerically by the harness.
    """
    norm = Normalization.of(f)
    p = norm.internal_profile(f)
    env = VariationEnvelope(p.derivative_step())
    phi = Logistic(rate=rate)
    eff = _internal_window(window, norm)
    max_shell = max(shell_index(c) for c in range(eff.lo.num, eff.hi.num))

    rows = []
    h_prev = 0.499
    for k in range(max_shell + 2):
        phi_min = phi.dphi_min(-(k + 2.0), k + 2.0)
        eps = phi_min / 4.0
        kb = env.bound(eps).variation_bound
        h = min(h_prev, phi_min / (4.0 * max(kb, 1e-12)), 0.499)
        rows.append(ShellRow(k, phi_min, eps, kb, h))
        h_prev = h
    for k in range(max_shell + 1):
        rows[k].delta = rows[k + 1].h / 2.0
    delta = ShellBudget(tuple(r.delta for r in rows[: max_shell + 1]))
    T_int, resolutions = tiled_quantizer(phi, delta, eff)
    for k in range(max_shell + 1):
        cells = [c for c in range(eff.lo.num, eff.hi.num) if shell_index(c) == k]
        rows[k].n = max(resolutions[c] for c in cells) if cells else None

    T = T_int.affine(norm.halfwidth, norm.center)
    cert = TranslateCertificate(
        phi=phi.describe(),
        normalization=norm,
        requested_window=window,
        effective_window=Window(
            norm.center + Dyadic(eff.lo.num) * norm.halfwidth,
            norm.center + Dyadic(eff.hi.num) * norm.halfwidth,
        ),
        shells=rows,
        guarantee_lower_bound=min(r.phi_min for r in rows) / 4.0,
        interval_count=len(T),
    )
    return T, cert


# -- magnification construction ----------------------------------------------------


@dataclass
class MagnifyConfig:
    """Verification horizon and growth-certificate policy.

    The regime constants c2, c3, C3 are computed from the target's
    derivative extrema and the K bounds (never guessed); pre-set values are
    accepted only for re-verification runs.
    """

    a_max: float = 8.0
    slope_max: float = 10.0
    eps_grid: tuple = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3)
    c2: float | None = None
    c3: float | None = None
    C3: float | None = None

    def __post_init__(self):
        if self.a_max < 1.0:
            raise ValueError("a_max must be at least 1")
        if len(self.eps_grid) < 3:
            raise ValueError("growth certificate needs at least 3 eps points")


@dataclass
class GrowthFit:
    eps_grid: tuple
    k_bounds: tuple
    slope: float
    intercept: float
    slope_max: float

    def to_json(self):
        return {
            "eps_grid": list(self.eps_grid),
            "k_bounds": list(self.k_bounds),
            "slope": self.slope,
            "intercept": self.intercept,
            "slope_max": self.slope_max,
        }

    @staticmethod
    def from_json(o):
        return GrowthFit(
            tuple(o["eps_grid"]), tuple(o["k_bounds"]), o["slope"], o["intercept"], o["slope_max"]
        )


def growth_certificate(env: VariationEnvelope, eps_grid, slope_max: float) -> GrowthFit:
    """Fit log K(eps) against eps^(-1/3); reject steep growth.

    Subexponential K with exponent 1/3 shows as a bounded slope; the fitted
    slope is stored so the check can be replayed.
    """
    eps = np.asarray(sorted(eps_grid, reverse=True), dtype=np.float64)
    ks = np.array([env.bound(float(e)).variation_bound for e in eps])
    x = eps ** (-1.0 / 3.0)
    y = np.log(np.maximum(ks, 1e-300))
    A = np.stack([x, np.ones_like(x)], axis=1)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    fit = GrowthFit(tuple(float(e) for e in eps), tuple(float(k) for k in ks),
                    float(coef[0]), float(coef[1]), slope_max)
    if fit.slope > slope_max:
        raise GrowthCertificateError(
            f"K(eps, f') growth slope {fit.slope:.3g} exceeds {slope_max} "
            "on the declared eps grid",
            slope=fit.slope,
            slope_max=slope_max,
        )
    return fit


@dataclass
class MagnifyCertificate:
    phi: dict
    normalization: Normalization
    requested_window: Window
    effective_window: Window
    a_max: float
    c2: float
    c3: float
    C3: float
    h0: float
    growth: GrowthFit
    shells: list  # ShellRow with phi_min = regime-2 numerator, eps = regime-2 eps
    interval_count: int

    def guarantee_lower_bound(self, a: float, x: float = 0.0) -> float:
        """Proof target for (f_a * chi_T)'(x) at scale a within the horizon."""
        if abs(x) <= 2 * a:
            return self.c2 / (12.0 * a * math.log(3.0 * a) ** 2)
        return self.c3 / (8.0 * abs(x) * math.log(2.0 * abs(x)) ** 2)

    def recheck(self) -> list[str]:
        problems = []
        if self.growth.slope > self.growth.slope_max:
            problems.append("growth slope exceeds bound")
        if not (0 < self.h0 < 1):
            problems.append("h(0) outside (0,1)")
        if abs(self.h0 - min(self.c2 / (24.0 * self.C3), 0.499)) > 1e-12:
            problems.append("h(0) != c2/(24 C3)")
        hs = [r.h for r in sorted(self.shells, key=lambda r: r.k)]
        if any(b > a * (1 + 1e-12) for a, b in zip(hs, hs[1:])):
            problems.append("h not non-increasing")
        rows = {r.k: r for r in self.shells}
        for r in self.shells:
            if r.k == 0:
                continue
            x = 2.0 * (r.k + 1.0)
            lhs = r.h * r.k_bound
            rhs = self.c3 / (16.0 * x * math.log(2.0 * x) ** 2)
            if lhs > rhs * (1 + 1e-9):
                problems.append(f"shell {r.k}: h*K exceeds regime-2 budget")
            if r.delta is not None:
                nxt = rows.get(r.k + 1)
                if nxt is not None and r.delta > nxt.h * (1 + 1e-12):
                    problems.append(f"shell {r.k}: delta > h(k+1)")
                if r.n is not None and not (r.n > 4.0 / r.delta):
                    problems.append(f"shell {r.k}: n not above 4/delta")
        return problems

    def to_json(self):
        return {
            "kind": "magnify",
            "phi": self.phi,
            "normalization": self.normalization.to_json(),
            "requested_window": self.requested_window.to_json(),
            "effective_window": self.effective_window.to_json(),
            "a_max": self.a_max,
            "c2": self.c2,
            "c3": self.c3,
            "C3": self.C3,
            "h0": self.h0,
            "growth": self.growth.to_json(),
            "shells": [r.to_json() for r in self.shells],
            "interval_count": self.interval_count,
        }

    @staticmethod
    def from_json(o):
        return MagnifyCertificate(
            o["phi"],
            Normalization.from_json(o["normalization"]),
            Window.from_json(o["requested_window"]),
            Window.from_json(o["effective_window"]),
            o["a_max"],
            o["c2"],
            o["c3"],
            o["C3"],
            o["h0"],
            GrowthFit.from_json(o["growth"]),
            [ShellRow.from_json(r) for r in o["shells"]],
            o["interval_count"],
        )


def magnify_test_set(
    f: Profile, window: Window, cfg: MagnifyConfig | None = None
) -> tuple[IntervalSet, MagnifyCertificate]:
    """Test set T making b -> ∫_T f((x - b)/a) dx strictly increasing for
    every magnification a in [1, a_max].

    Uses the slow-decay target; the regime constants are computed on the
    declared horizon:
    c2 = min_a 3a ln^2(3a) phi'(3a),  c3 = min_x 2x ln^2(2x) phi'(3x/2),
    C3 = max_a K(c2/(12 ln^2 3a), f') ln^2(3a)/a,  h(0) = c2/(24 C3),
    and shell budgets h(k) from the far regime; delta(k) = h(k+1).
    Raises GrowthCertificateError when K(eps, f') is not certifiably
    subexponential on the declared eps grid.
    """
    if cfg is None:
        cfg = MagnifyConfig()
    norm = Normalization.of(f)
    p = norm.internal_profile(f)
    env = VariationEnvelope(p.derivative_step())
    fit = growth_certificate(env, cfg.eps_grid, cfg.slope_max)
    phi = LogSquaredDecay()
    eff = _internal_window(window, norm)
    max_shell = max(shell_index(c) for c in range(eff.lo.num, eff.hi.num))

    a_grid = np.geomspace(1.0, cfg.a_max, 65)
    ln3a = np.log(3.0 * a_grid) ** 2
    c2 = cfg.c2
    if c2 is None:
        c2 = float(np.min(3.0 * a_grid * ln3a * phi.dphi(3.0 * a_grid)))
    x_hi = 2.0 * (max_shell + 2.0)
    x_grid = np.geomspace(2.0, max(x_hi, 4.0), 129)
    ln2x = np.log(2.0 * x_grid) ** 2
    c3 = cfg.c3
    if c3 is None:
        c3 = float(np.min(2.0 * x_grid * ln2x * phi.dphi(1.5 * x_grid)))
    C3 = cfg.C3
    if C3 is None:
        C3 = 0.0
        for a, l2 in zip(a_grid, ln3a):
            kb = env.bound(c2 / (12.0 * l2)).variation_bound
            C3 = max(C3, kb * l2 / a)
    h0 = min(c2 / (24.0 * C3), 0.499)

    rows = [ShellRow(0, c2, c2 / 12.0, env.bound(c2 / 12.0).variation_bound, h0)]
    h_prev = h0
    for k in range(1, max_shell + 2):
        x = 2.0 * (k + 1.0)
        l2 = math.log(2.0 * x) ** 2
        eps2 = c3 / (8.0 * x * l2)
        kb = env.bound(eps2).variation_bound
        h = min(h_prev, c3 / (16.0 * x * l2) / max(kb, 1e-12))
        rows.append(ShellRow(k, c3 / (2.0 * x * l2), eps2, kb, h))
        h_prev = h
    for k in range(max_shell + 1):
        rows[k].delta = rows[k + 1].h
    delta = ShellBudget(tuple(r.delta for r in rows[: max_shell + 1]))
    T_int, resolutions = tiled_quantizer(phi, delta, eff)
    for k in range(max_shell + 1):
        cells = [c for c in range(eff.lo.num, eff.hi.num) if shell_index(c) == k]
        rows[k].n = max(resolutions[c] for c in cells) if cells else None

    T = T_int.affine(norm.halfwidth, norm.center)
    cert = MagnifyCertificate(
        phi=phi.describe(),
        normalization=norm,
        requested_window=window,
        effective_window=Window(
            norm.center + Dyadic(eff.lo.num) * norm.halfwidth,
            norm.center + Dyadic(eff.hi.num) * norm.halfwidth,
        ),
        a_max=cfg.a_max,
        c2=c2,
        c3=c3,
        C3=C3,
        h0=h0,
        growth=fit,
        shells=rows,
        interval_count=len(T),
    )
    return T, cert


# -- slab families over R^d ---------------------------------------------------------


@dataclass
class FamilyOptions:
    """Tuning for direction screening and the lifted windows."""

    translate_radius: float = 1.0  # translations stay in [-r, r]^d
    a_max: float = 8.0
    resolution: int = 64
    seed: int = 0
    candidates: int = 64
    plateau_ratio: float = 1.05
    cutoffs: tuple = (16.0, 32.0, 64.0, 128.0, 256.0)
    screening_power: float | None = None  # default d-1, the integrability exponent
    independence_min: float = 0.2
    rate: float = 0.5
    squeeze: float = 0.125


def _direction_candidates(d: int, count: int, seed: int):
    for i in range(d):
        yield Direction.axis(i, d)
    rng = np.random.default_rng(seed)
    produced = 0
    while produced < count:
        if d == 2:
            m = int(rng.integers(0, 4096))
            ang = 2.0 * math.pi * m / 4096.0
            yield Direction((math.cos(ang), math.sin(ang)))
        else:
            v = rng.standard_normal(d)
            v = np.round(v / np.linalg.norm(v) * 4096) / 4096.0
            n = np.linalg.norm(v)
            if n < 0.5:
                continue
            yield Direction.of(v)
        produced += 1


def _face_normals(shape):
    if isinstance(shape, Box):
        return [Direction.axis(i, shape.d).as_array() for i in range(shape.d)]
    if isinstance(shape, Polygon):
        return list(shape.edge_normals())
    if isinstance(shape, Simplex):
        v = np.asarray(shape.vertices)
        d = shape.d
        normals = []
        for drop in range(d + 1):
            face = np.delete(v, drop, axis=0)
            base = face[0]
            span = face[1:] - base
            # normal = kernel of the span
            _, _, vt = np.linalg.svd(span)
            normals.append(vt[-1])
        return normals
    return []


def _is_convex(shape) -> bool:
    if isinstance(shape, (Ball, Box, Simplex)):
        return True
    if isinstance(shape, Polygon):
        return shape.is_convex()
    return False


def family_test_sets(
    shape, mode: str, options: FamilyOptions | None = None
) -> list[SlabTestSet]:
    """d slab test sets for translates (d+1 with the full space for
    magnified copies) of a fixed body.

    Direction candidates (axes first, then seeded dyadic-angle vectors) are
    screened: linear independence, no face-orthogonality for polytopes, a
    plateauing spectral diagnostic, and for magnification additionally the
    variation-growth certificate; convex bodies route magnification
    candidates through the squeezed diameter search.  The first passing
    candidates win, so the family is deterministic per seed.
    """
    if mode not in ("translate", "magnify"):
        raise ValueError(f"mode must be translate or magnify, got {mode!r}")
    if options is None:
        options = FamilyOptions()
    d = shape.d
    if d < 2:
        raise ValueError("slab families need d >= 2 (use 1-D sets directly)")
    normals = _face_normals(shape)
    accepted: list[SlabTestSet] = []
    accepted_dirs: list[np.ndarray] = []
    tried = 0
    for cand in _direction_candidates(d, options.candidates, options.seed):
        if len(accepted) == d:
            break
        tried += 1
        theta = cand
        if mode == "magnify" and _is_convex(shape) and not isinstance(shape, Ball):
            try:
                theta = diameter_direction(shape, options.squeeze, cand)
            except ValueError:
                pass
        tv = theta.as_array()
        if any(abs(float(tv @ n)) > 1.0 - 1e-9 for n in normals):
            continue
        if accepted_dirs:
            m = np.stack(accepted_dirs + [tv])
            sv = np.linalg.svd(m, compute_uv=False)
            if sv[-1] < options.independence_min:
                continue
        try:
            profile = radon_profile(shape, theta, options.resolution)
        except NotImplementedError:
            continue
        power = options.screening_power if options.screening_power is not None else d - 1.0
        tails = ac_diagnostic(profile, power, options.cutoffs)
        if tails[-1] / max(tails[-2], 1e-300) >= options.plateau_ratio:
            continue
        s0, s1 = profile.support
        rad = max(abs(s0), abs(s1))
        bmax = options.translate_radius * math.sqrt(d) + 1.0
        try:
            if mode == "translate":
                win = Window.of(-int(math.ceil(bmax + rad + 1)), int(math.ceil(bmax + rad + 1)))
                T, cert = translate_test_set(profile, win, rate=options.rate)
            else:
                reach = options.a_max * rad + bmax
                win = Window.of(-int(math.ceil(reach + 1)), int(math.ceil(reach + 1)))
                T, cert = magnify_test_set(
                    profile, win, MagnifyConfig(a_max=options.a_max)
                )
        except GrowthCertificateError:
            continue
        accepted.append(
            SlabTestSet(theta, T, cert.effective_window, certificate=cert)
        )
        accepted_dirs.append(tv)
    if len(accepted) < d:
        raise SearchBudgetError(
            f"only {len(accepted)} of {d} directions passed screening after "
            f"{tried} candidates"
        )
    if mode == "magnify":
        accepted.append(SlabTestSet.full())
    return accepted
