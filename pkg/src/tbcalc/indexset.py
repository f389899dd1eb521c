"""Exact algebra of polyhomogeneous index sets.

An index set is an infinite subset of C x N0 that is closed under raising
the exponent by nonnegative integers and lowering the log power, and that
has finitely many elements below any real-part cutoff.  We store the finite
minimal generator antichain with exact rational-complex exponents; every
operation here is a pure function on that representation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

RatLike = Fraction | int | str


def as_fraction(x: RatLike | float) -> Fraction:
    """Coerce ints, strings like '3/2' or '-0.5', and floats to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        if x != x or x in (math.inf, -math.inf):
            raise ValueError(f"non-finite value {x!r}")
        return Fraction(x).limit_denominator(1 << 40)
    return Fraction(x)


class GapViolation(ValueError):
    """Composition precondition Re(E_right + F_left) > gap failed."""

    def __init__(self, message: str, face: str | None = None):
        super().__init__(message)
        self.face = face


@dataclass(frozen=True, order=True)
class Exponent:
    """Exact rational-complex exponent z = re + i*im."""

    re: Fraction
    im: Fraction = Fraction(0)

    @staticmethod
    def of(re: RatLike, im: RatLike = 0) -> "Exponent":
        return Exponent(as_fraction(re), as_fraction(im))

    def shifted(self, c: "Exponent") -> "Exponent":
        return Exponent(self.re + c.re, self.im + c.im)

    def conjugate(self) -> "Exponent":
        return Exponent(self.re, -self.im)

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        return f"{self.re}+({self.im})i"


@dataclass(frozen=True, order=True)
class IndexPoint:
    """A pair (z, k): exponent z and log power k >= 0."""

    z: Exponent
    k: int = 0

    def __post_init__(self):
        if self.k < 0:
            raise ValueError(f"log power must be >= 0, got {self.k}")

    @staticmethod
    def of(re: RatLike, k: int = 0, im: RatLike = 0) -> "IndexPoint":
        return IndexPoint(Exponent.of(re, im), k)

    def __str__(self) -> str:
        return f"({self.z},{self.k})"


def _dominates(g: IndexPoint, p: IndexPoint) -> bool:
    """True iff p lies in the closure generated by g: p.z - g.z in N0, p.k <= g.k."""
    if p.k > g.k or p.z.im != g.z.im:
        return False
    d = p.z.re - g.z.re
    return d >= 0 and d.denominator == 1


def _class_key(z: Exponent) -> tuple[int, int, int, int]:
    """Key identifying the residue class {z + j : j in Z} (equal im, re mod 1).

    Integer tuple (im as num/den, re mod 1 as num/den); both components stay
    in lowest terms, so equality of keys is equality of classes.
    """
    re = z.re
    return (z.im.numerator, z.im.denominator,
            re.numerator % re.denominator, re.denominator)


@dataclass(frozen=True)
class IndexSet:
    """Finite minimal generator antichain of an index set.

    Membership: p is in the realized set iff some generator (z, k) has
    p.z - z in N0 and p.k <= k.  Construct through ``from_points`` (which
    normalizes) rather than directly.

    ``truncated_at`` marks views produced by the closure operators: the
    realized set is only guaranteed faithful for Re z <= truncated_at.
    """

    generators: tuple[IndexPoint, ...] = ()
    truncated_at: Fraction | None = field(default=None, compare=False)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def empty() -> "IndexSet":
        return _EMPTY

    @staticmethod
    def n0() -> "IndexSet":
        return _N0

    @staticmethod
    def from_points(points: Iterable[IndexPoint],
                    truncated_at: Fraction | None = None) -> "IndexSet":
        return IndexSet(_normalize(points), truncated_at)

    @staticmethod
    def gen(*pts: tuple) -> "IndexSet":
        """Shorthand: IndexSet.gen((re, k), (re, k, im), ...)."""
        points = []
        for t in pts:
            re, k = t[0], t[1]
            im = t[2] if len(t) > 2 else 0
            points.append(IndexPoint.of(re, k, im))
        return IndexSet.from_points(points)

    # -- queries -----------------------------------------------------------

    @property
    def is_empty(self) -> bool:
        return not self.generators

    def contains(self, p: IndexPoint) -> bool:
        return any(_dominates(g, p) for g in self.generators)

    def min_re(self) -> Fraction | None:
        """Minimum real part over generators; None encodes +infinity (empty set)."""
        if not self.generators:
            return None
        return min(g.z.re for g in self.generators)

    def subset_of(self, other: "IndexSet") -> bool:
        return all(other.contains(g) for g in self.generators)

    def truncate(self, c: RatLike) -> list[IndexPoint]:
        """Exact finite list of maximal points (z, k_E(z)) with Re z <= c."""
        cut = as_fraction(c)
        out: dict[Exponent, int] = {}
        for g in self.generators:
            re = g.z.re
            while re <= cut:
                z = Exponent(re, g.z.im)
                if out.get(z, -1) < g.k:
                    out[z] = g.k
                re += 1
        return sorted(IndexPoint(z, k) for z, k in out.items())

    # -- algebra -----------------------------------------------------------

    def add(self, other: "IndexSet") -> "IndexSet":
        """Pointwise sum {(z+z', k+k')}; empty if either factor is empty.

        Pairs beyond the result's guarantee bound are pruned: a truncated
        view only promises its points below that bound.
        """
        if self.is_empty or other.is_empty:
            return IndexSet((), _sum_bound(self, other))
        bound = _sum_bound(self, other)
        if bound is None:
            pts = [IndexPoint(g.z.shifted(h.z), g.k + h.k)
                   for g in self.generators for h in other.generators]
        else:
            pts = [IndexPoint(g.z.shifted(h.z), g.k + h.k)
                   for g in self.generators for h in other.generators
                   if g.z.re + h.z.re <= bound]
        return IndexSet.from_points(pts, bound)

    def shift(self, c) -> "IndexSet":
        """Translate every exponent by c (rational or Exponent; may be negative)."""
        if not isinstance(c, Exponent):
            c = Exponent.of(c)
        bound = None if self.truncated_at is None else self.truncated_at + c.re
        return IndexSet(tuple(IndexPoint(g.z.shifted(c), g.k) for g in self.generators),
                        bound)

    def union(self, other: "IndexSet") -> "IndexSet":
        return IndexSet.from_points(self.generators + other.generators,
                                    _min_bound(self, other))

    def extended_union(self, other: "IndexSet") -> "IndexSet":
        """E cup-bar F: union plus (z, k_E(z)+k_F(z)+1) at common exponents.

        Per residue class shared by both sides, k_E and k_F are nondecreasing
        step functions of Re z with jumps only at generator exponents, so the
        extra contributions are generated exactly by emitting one point at
        every breakpoint inside the common support.
        """
        pts = list(self.generators + other.generators)
        mine = _group_by_class(self.generators)
        for key, theirs in _group_by_class(other.generators).items():
            ours = mine.get(key)
            if not ours:
                continue
            a_stair = _staircase(ours)
            b_stair = _staircase(theirs)
            im = ours[0].z.im
            start = max(a_stair[0][0], b_stair[0][0])
            breaks = sorted({re for re, _ in a_stair if re >= start}
                            | {re for re, _ in b_stair if re >= start})
            ia = ib = 0
            for b in breaks:
                while ia + 1 < len(a_stair) and a_stair[ia + 1][0] <= b:
                    ia += 1
                while ib + 1 < len(b_stair) and b_stair[ib + 1][0] <= b:
                    ib += 1
                pts.append(IndexPoint(Exponent(b, im),
                                      a_stair[ia][1] + b_stair[ib][1] + 1))
        return IndexSet.from_points(pts, _min_bound(self, other))

    def remove_origin(self) -> "IndexSet":
        """Largest index set contained in E \\ {(0,0)}.

        Any point with a nonpositive-integer real exponent (and zero imaginary
        part) regenerates (0,0) under the closure, so each such generator
        (z, k) is replaced by (1, k); all other generators survive unchanged.
        """
        if not self.contains(IndexPoint.of(0, 0)):
            return self
        pts = []
        for g in self.generators:
            if g.z.im == 0 and g.z.re.denominator == 1 and g.z.re <= 0:
                pts.append(IndexPoint.of(1, g.k))
            else:
                pts.append(g)
        return IndexSet.from_points(pts, self.truncated_at)

    def conjugate(self) -> "IndexSet":
        return IndexSet(
            _normalize(IndexPoint(g.z.conjugate(), g.k) for g in self.generators),
            self.truncated_at)

    def clip(self, c: RatLike) -> "IndexSet":
        """Truncated view: drop generators above Re = c, mark the bound."""
        cut = as_fraction(c)
        kept = tuple(g for g in self.generators if g.z.re <= cut)
        return IndexSet(kept, cut)

    # -- misc ----------------------------------------------------------------

    def __str__(self) -> str:
        if not self.generators:
            return "empty"
        return "gen{" + ",".join(str(g) for g in self.generators) + "}"

    __repr__ = __str__


def _group_by_class(gens: Sequence[IndexPoint]) -> dict[tuple, list[IndexPoint]]:
    out: dict[tuple, list[IndexPoint]] = {}
    for g in gens:
        out.setdefault(_class_key(g.z), []).append(g)
    return out


def _staircase(gens: list[IndexPoint]) -> list[tuple[Fraction, int]]:
    """Per-class running-max log power: sorted (re, max k at exponents <= re)."""
    items = sorted((g.z.re, g.k) for g in gens)
    out: list[tuple[Fraction, int]] = []
    mk = -1
    for re, k in items:
        mk = max(mk, k)
        if out and out[-1][0] == re:
            out[-1] = (re, mk)
        else:
            out.append((re, mk))
    return out


def _normalize(points: Iterable[IndexPoint]) -> tuple[IndexPoint, ...]:
    # staircase sweep per residue class: a point is dominated iff some class
    # mate at a lower-or-equal exponent carries a log power at least as high
    by_class: dict[tuple, dict[tuple[int, int], tuple[Fraction, Exponent, int]]] = {}
    for p in points:
        z = p.z
        best = by_class.setdefault(_class_key(z), {})
        rk = (z.re.numerator, z.re.denominator)
        cur = best.get(rk)
        if cur is None or cur[2] < p.k:
            best[rk] = (z.re, z, p.k)
    kept: list[IndexPoint] = []
    for best in by_class.values():
        max_k = -1
        for _, z, k in sorted(best.values(), key=lambda t: t[0]):
            if k > max_k:
                max_k = k
                kept.append(IndexPoint(z, k))
    return tuple(sorted(kept))


def _min_bound(a: IndexSet, b: IndexSet) -> Fraction | None:
    if a.truncated_at is None:
        return b.truncated_at
    if b.truncated_at is None:
        return a.truncated_at
    return min(a.truncated_at, b.truncated_at)


def _sum_bound(a: IndexSet, b: IndexSet) -> Fraction | None:
    """Guarantee bound for a+b: each side's bound is offset by the other's onset."""
    cands = []
    if a.truncated_at is not None and not b.is_empty:
        cands.append(a.truncated_at + b.min_re())
    if b.truncated_at is not None and not a.is_empty:
        cands.append(b.truncated_at + a.min_re())
    return min(cands) if cands else None


_EMPTY = IndexSet(())
_N0 = IndexSet((IndexPoint.of(0, 0),))


# -- helpers on optional minima (None = +infinity) ---------------------------

def min_re_sum(a: Fraction | None, b: Fraction | None) -> Fraction | None:
    if a is None or b is None:
        return None
    return a + b


def min_re_gt(value: Fraction | None, threshold: RatLike) -> bool:
    """value > threshold, where None means +infinity."""
    return value is None or value > as_fraction(threshold)


def min_re_ge(value: Fraction | None, threshold: RatLike) -> bool:
    return value is None or value >= as_fraction(threshold)


# -- closure operators --------------------------------------------------------

def closure0(e: IndexSet, c: RatLike) -> IndexSet:
    """Truncation to Re <= c of E^(0), the fixpoint of T -> E cupbar (T+1).

    Starting from T = E, each step only adds contributions whose real part
    exceeds the previous onset by 1, so iterating until the truncated view
    stabilizes below c is exact.
    """
    cut = as_fraction(c)
    if e.is_empty:
        return IndexSet((), cut)
    seed = e.clip(cut)
    t = seed
    for _ in range(_closure0_iter_cap(e, cut)):
        nxt = seed.extended_union(t.shift(1)).clip(cut)
        if nxt.generators == t.generators:
            return nxt
        t = nxt
    raise AssertionError("closure0 failed to stabilize within its iteration cap")


def _closure0_iter_cap(e: IndexSet, cut: Fraction) -> int:
    depth = cut - e.min_re()
    if depth < 0:
        return 2
    # one pass per unit of depth plus slack for log-power propagation
    return 3 * (int(math.ceil(depth)) + 2)


def _onset_slack(*sets: IndexSet) -> Fraction:
    """How far below zero the onsets reach; inflates internal work bounds so
    that sum pruning never bites below the requested truncation."""
    slack = Fraction(0)
    for s in sets:
        m = s.min_re()
        if m is not None and -m > slack:
            slack = -m
    return slack


def pxind0(eplus: IndexSet, eminus: IndexSet, c: RatLike) -> IndexSet:
    """Front-face set N0 cup ((E^{+,(0)} + E^{-,(0)}) cupbar (N0+1)), truncated.

    Raises GapViolation unless Re(E+ + E-) > 0.
    """
    _require_gap(eplus, eminus)
    cut = as_fraction(c)
    inner = cut + _onset_slack(eplus, eminus)
    cp = closure0(eplus, inner)
    cm = closure0(eminus, inner)
    mid = cp.add(cm).extended_union(IndexSet.n0().shift(1).clip(inner))
    return IndexSet.n0().clip(cut).union(mid).clip(cut)


def _require_gap(eplus: IndexSet, eminus: IndexSet) -> None:
    s = min_re_sum(eplus.min_re(), eminus.min_re())
    if not (s is None or s > 0):
        raise GapViolation(
            f"need Re(E+ + E-) > 0, got min_re sum {s}")


def closure0_prime(eplus: IndexSet, eminus: IndexSet, c: RatLike) -> IndexSet:
    """E^{(0)'} = E^{(0)} minus (0,0) = (E^{+,(0)}+E^{-,(0)}) cupbar (N0+1)."""
    return pxind0(eplus, eminus, c).remove_origin()


def closure12(eplus: IndexSet, eminus: IndexSet, c: RatLike
              ) -> tuple[IndexSet, IndexSet, IndexSet]:
    """Truncated (E^{+,(2)}, E^{-,(2)}, E^{(2)}) of the transition-calculus closure.

    Seeds are E^{+/-,(0)} and E^{(0)'}; the (1)-iterates gain at least
    eps = min over the seeds' onsets per step, so the iteration stops once the
    newest iterates lie entirely above the cutoff.
    """
    _require_gap(eplus, eminus)
    cut = as_fraction(c)
    w_in = cut + _onset_slack(eplus, eminus) + 1
    ep0 = closure0(eplus, w_in)
    em0 = closure0(eminus, w_in)
    e0 = pxind0(eplus, eminus, w_in)
    e0p = e0.remove_origin()

    # (1)-iterates relative to the seeds (E^{+,(0)}, E^{-,(0)}, E^{(0)'})
    p_j, m_j, z_j = ep0, em0, e0p
    p_acc, m_acc, z_acc = p_j, m_j, z_j
    for _ in range(_closure12_iter_cap(ep0, em0, e0p, w_in)):
        if all(s.is_empty or s.min_re() > cut for s in (p_j, m_j, z_j)):
            break
        p_next = ep0.add(z_j).extended_union(e0p.add(p_j)).clip(w_in)
        m_next = em0.add(z_j).extended_union(e0p.add(m_j)).clip(w_in)
        z_next = (ep0.add(m_j).union(em0.add(p_j))
                  .extended_union(e0p.add(z_j)).clip(w_in))
        p_j, m_j, z_j = p_next, m_next, z_next
        p_acc = p_acc.union(p_j)
        m_acc = m_acc.union(m_j)
        z_acc = z_acc.union(z_j)
    else:
        raise AssertionError("closure12 failed to stabilize within its iteration cap")
    e_p1, e_m1, e_1 = p_acc, m_acc, z_acc

    e_p2 = (ep0.union(e_p1)
            .union(ep0.add(e_1).extended_union(e_p1.add(e0))).clip(cut))
    e_m2 = (em0.union(e_m1)
            .union(em0.add(e_1).extended_union(e_m1.add(e0))).clip(cut))
    cross = (e0.add(e_1).extended_union(ep0.add(e_m1))
             .union(e0.add(e_1).extended_union(em0.add(e_p1))))
    e_2 = e0.union(e_1).union(cross).clip(cut)
    return e_p2, e_m2, e_2


def _closure12_iter_cap(ep0: IndexSet, em0: IndexSet, e0p: IndexSet,
                        cut: Fraction) -> int:
    # the (1)-iterates' onsets grow by at least min(Re E^{(0)'}, Re(E+ + E-)/2)
    # per step and start no lower than -max(|Re E+|, |Re E-|)
    mins = [s.min_re() for s in (ep0, em0) if not s.is_empty]
    alpha = max((abs(m) for m in mins), default=Fraction(0))
    gain_cands = [m for m in (e0p.min_re(),) if m is not None]
    pair = min_re_sum(ep0.min_re(), em0.min_re())
    if pair is not None:
        gain_cands.append(pair / 2)
    if not gain_cands:
        return 4
    gain = min(gain_cands)
    if gain <= 0:
        raise GapViolation(f"closure12 iteration gain must be positive, got {gain}")
    return 2 * int(math.ceil((max(cut, 0) + alpha + 2) / gain)) + 8
