"""Index-set collections on boundary hypersurfaces and their composition laws.

Four double spaces appear: the b-double space (3 faces), the transition
double space (4 faces), the semiclassical-cone double space (4 faces), and
the 3b-double space (9 faces).  Each composition law below transcribes the
corresponding displayed formulas; preconditions are strict inequalities on
exact rational onsets.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from fractions import Fraction

from .indexset import GapViolation, IndexPoint, IndexSet, min_re_gt, min_re_sum


def _eu(*sets: IndexSet) -> IndexSet:
    """Left fold of the extended union (associative)."""
    out = sets[0]
    for s in sets[1:]:
        out = out.extended_union(s)
    return out


class _Collection:
    """Shared plumbing for face-keyed index-set tuples."""

    FACE_KEYS: tuple[str, ...] = ()

    def faces(self) -> dict[str, IndexSet]:
        return {key: getattr(self, f.name)
                for key, f in zip(self.FACE_KEYS, fields(self))}

    def union(self, other):
        cls = type(self)
        return cls(*(a.union(b) for a, b in
                     zip(self._values(), other._values())))

    def clip(self, c):
        cls = type(self)
        return cls(*(s.clip(c) for s in self._values()))

    def _values(self) -> tuple[IndexSet, ...]:
        return tuple(getattr(self, f.name) for f in fields(self))

    def to_json(self) -> dict:
        return {key: [[[int(g.z.re.numerator), int(g.z.re.denominator),
                        int(g.z.im.numerator), int(g.z.im.denominator)], g.k]
                      for g in s.generators]
                for key, s in self.faces().items()}

    @classmethod
    def from_json(cls, data: dict):
        sets = []
        for key in cls.FACE_KEYS:
            pts = []
            for (re_n, re_d, im_n, im_d), k in data.get(key, []):
                pts.append(IndexPoint.of(Fraction(re_n, re_d), k,
                                         Fraction(im_n, im_d)))
            sets.append(IndexSet.from_points(pts))
        return cls(*sets)

    def __str__(self) -> str:
        inner = ", ".join(f"{k}={s}" for k, s in self.faces().items())
        return f"{type(self).__name__}({inner})"


@dataclass(frozen=True)
class BCollection(_Collection):
    lb: IndexSet
    ff: IndexSet
    rb: IndexSet

    FACE_KEYS = ("lb", "ff", "rb")

    @staticmethod
    def identity() -> "BCollection":
        return BCollection(IndexSet.empty(), IndexSet.n0(), IndexSet.empty())


@dataclass(frozen=True)
class ScbtCollection(_Collection):
    lb0: IndexSet
    rb0: IndexSet
    tf: IndexSet
    zf: IndexSet

    FACE_KEYS = ("lb0", "rb0", "tf", "zf")

    @staticmethod
    def identity() -> "ScbtCollection":
        e = IndexSet.empty()
        return ScbtCollection(e, e, IndexSet.n0(), IndexSet.n0())


@dataclass(frozen=True)
class ChCollection(_Collection):
    lb: IndexSet
    ff: IndexSet
    rb: IndexSet
    tf: IndexSet

    FACE_KEYS = ("lb", "ff", "rb", "tf")

    @staticmethod
    def identity() -> "ChCollection":
        e = IndexSet.empty()
        return ChCollection(e, IndexSet.n0(), e, IndexSet.n0())


@dataclass(frozen=True)
class TbCollection(_Collection):
    ffD: IndexSet
    ffT: IndexSet
    lf: IndexSet
    rf: IndexSet
    lbD: IndexSet
    rbD: IndexSet
    lbT: IndexSet
    rbT: IndexSet
    if_: IndexSet

    FACE_KEYS = ("ffD", "ffT", "lf", "rf", "lbD", "rbD", "lbT", "rbT", "if")

    @staticmethod
    def identity() -> "TbCollection":
        e = IndexSet.empty()
        return TbCollection(IndexSet.n0(), IndexSet.n0(), e, e, e, e, e, e, e)

    @staticmethod
    def of(**kw) -> "TbCollection":
        """Build from face names, missing faces empty; 'if' may be spelled 'if_'."""
        kw = dict(kw)
        if "if" in kw:
            kw["if_"] = kw.pop("if")
        e = IndexSet.empty()
        names = [f.name for f in fields(TbCollection)]
        unknown = set(kw) - set(names)
        if unknown:
            raise TypeError(f"unknown faces: {sorted(unknown)}")
        return TbCollection(*(kw.get(n, e) for n in names))

    def reflect(self) -> "TbCollection":
        """Adjoint reflection: swap lf/rf, lbD/rbD, lbT/rbT, conjugate exponents."""
        return TbCollection(
            ffD=self.ffD.conjugate(), ffT=self.ffT.conjugate(),
            lf=self.rf.conjugate(), rf=self.lf.conjugate(),
            lbD=self.rbD.conjugate(), rbD=self.lbD.conjugate(),
            lbT=self.rbT.conjugate(), rbT=self.lbT.conjugate(),
            if_=self.if_.conjugate())


def _check_gap(left: IndexSet, right: IndexSet, gap: int, face: str) -> None:
    s = min_re_sum(left.min_re(), right.min_re())
    if not min_re_gt(s, gap):
        raise GapViolation(
            f"composition needs Re(E_{face} + F_{face.replace('r', 'l', 1)}) > {gap}, "
            f"got {s}", face=face)


def compose_b(e: BCollection, f: BCollection) -> BCollection:
    """Composition law on the b-double space; needs Re(E_rb + F_lb) > 0."""
    _check_gap(e.rb, f.lb, 0, "rb")
    return BCollection(
        lb=_eu(e.lb, e.ff.add(f.lb)),
        ff=_eu(e.ff.add(f.ff), e.lb.add(f.rb)),
        rb=_eu(e.rb.add(f.ff), f.rb))


def compose_scbt(e: ScbtCollection, f: ScbtCollection) -> ScbtCollection:
    """Composition law on the transition double space (no stated precondition)."""
    return ScbtCollection(
        lb0=_eu(e.lb0.add(f.zf), e.tf.add(f.lb0)),
        rb0=_eu(e.zf.add(f.rb0), e.rb0.add(f.tf)),
        tf=_eu(e.lb0.add(f.rb0), e.tf.add(f.tf)),
        zf=_eu(e.zf.add(f.zf), e.rb0.add(f.lb0)))


def compose_ch(e: ChCollection, f: ChCollection) -> ChCollection:
    """Composition law on the semiclassical-cone double space; Re(E_rb+F_lb) > 0."""
    _check_gap(e.rb, f.lb, 0, "rb")
    return ChCollection(
        lb=_eu(e.lb, e.ff.add(f.lb)),
        ff=_eu(e.ff.add(f.ff), e.lb.add(f.rb)),
        rb=_eu(e.rb.add(f.ff), f.rb),
        tf=e.tf.add(f.tf))


def compose_3b(e: TbCollection, f: TbCollection) -> TbCollection:
    """Nine-face composition law on the 3b-double space.

    Preconditions: Re(E_rbD + F_lbD) > 0 and Re(E_rbT + F_lbT) > 1.  Note the
    -1 shifts on every cross term involving if, lf, or rf pairings.
    """
    _check_gap(e.rbD, f.lbD, 0, "rbD")
    _check_gap(e.rbT, f.lbT, 1, "rbT")
    return TbCollection(
        ffD=_eu(e.ffD.add(f.ffD), e.lbD.add(f.rbD), e.rf.add(f.lf).shift(-1)),
        ffT=_eu(e.ffT.add(f.ffT), e.if_.add(f.if_).shift(-1),
                e.lf.add(f.rf), e.lbT.add(f.rbT)),
        lf=_eu(e.ffT.add(f.lf), e.if_.add(f.lf).shift(-1),
               e.lf.add(f.ffD), e.lbT.add(f.rbD)),
        rf=_eu(e.rf.add(f.ffT), e.rf.add(f.if_).shift(-1),
               e.ffD.add(f.rf), e.lbD.add(f.rbT)),
        lbD=_eu(e.lbD, e.ffD.add(f.lbD), e.rf.add(f.lbT).shift(-1)),
        rbD=_eu(e.rbD.add(f.ffD), f.rbD, e.rbT.add(f.lf).shift(-1)),
        lbT=_eu(e.lbT, e.ffT.add(f.lbT), e.if_.add(f.lbT).shift(-1),
                e.lf.add(f.lbD)),
        rbT=_eu(e.rbT.add(f.ffT), f.rbT, e.rbT.add(f.if_).shift(-1),
                e.rbD.add(f.rf)),
        if_=_eu(e.if_.add(f.if_).shift(-1), e.ffT.add(f.if_),
                e.if_.add(f.ffT), e.lf.add(f.rf), e.lbT.add(f.rbT)))


def fully_residual_to_3b(ld: IndexSet, lt: IndexSet,
                         rd: IndexSet, rt: IndexSet) -> TbCollection:
    """Lift a 4-face collection on the plain product space to the 9-face space.

    A kernel polyhomogeneous on M x M with sets (L_D, L_T, R_D, R_T) at
    D x M, T x M, M x D, M x T lifts to the 3b-double space with the face
    sets below (unit shifts at ffT, rf, rbT, if come from the density change).
    """
    return TbCollection(
        ffD=ld.add(rd),
        ffT=lt.add(rt).shift(1),
        lf=lt.add(rd),
        rf=ld.add(rt).shift(1),
        lbD=ld,
        rbD=rd,
        lbT=lt,
        rbT=rt.shift(1),
        if_=lt.add(rt).shift(1))
