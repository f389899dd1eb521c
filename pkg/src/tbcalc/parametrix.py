"""Replay of the elliptic parametrix index-set ledgers with machine-checked bounds.

The constructions covered: the b-parametrix collection, the transition- and
semiclassical-cone inverse collections, the edge-b normal-operator inverse,
and the full nine-face ledger (normal-operator inverses, the weight-ladder
improvement at the left boundary, the asymptotic Neumann series, the final
right/left parametrix collections, and the generalized-inverse bounds).
Every displayed lower bound is re-verified on the computed truncated sets;
any discrepancy is recorded and surfaces as a BoundViolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .faces import (
    BCollection,
    ChCollection,
    ScbtCollection,
    TbCollection,
    compose_3b,
    fully_residual_to_3b,
)
from .indexset import IndexSet, as_fraction, closure0, closure12, pxind0
from .model import ForbiddenWeight


class BoundViolation(AssertionError):
    """A printed ledger bound failed on the computed sets."""

    def __init__(self, message: str, face: str, stage: str, j: int | None = None):
        super().__init__(message)
        self.face = face
        self.stage = stage
        self.j = j


# -- simple inverse collections --------------------------------------------------

def b_parametrix_sets(eplus: IndexSet, eminus: IndexSet, c) -> BCollection:
    """(E^{+,(0)}, E^{(0)}, E^{-,(0)}) at the faces (lb, ff, rb), truncated."""
    return BCollection(lb=closure0(eplus, c),
                       ff=pxind0(eplus, eminus, c),
                       rb=closure0(eminus, c))


def scbt_inverse_sets(eplus: IndexSet, eminus: IndexSet, c) -> ScbtCollection:
    """(E^{+,(2)}, E^{-,(2)}, E^{(2)}, E^{(2)}) at the faces (lb0, rb0, tf, zf)."""
    p2, m2, z2 = closure12(eplus, eminus, c)
    return ScbtCollection(lb0=p2, rb0=m2, tf=z2, zf=z2)


def ch_inverse_sets(eplus: IndexSet, eminus: IndexSet, c) -> ChCollection:
    """(E^{+,(0)}, E^{(0)}, E^{-,(0)}, N0) at the faces (lb, ff, rb, tf)."""
    b = b_parametrix_sets(eplus, eminus, c)
    return ChCollection(lb=b.lb, ff=b.ff, rb=b.rb,
                        tf=IndexSet.n0().clip(c))


@dataclass(frozen=True)
class EbDCollection:
    """Six-face collection of the edge-b normal-operator inverse."""

    lb_b: IndexSet
    ff_b: IndexSet
    rb_b: IndexSet
    lb_e: IndexSet
    ff_e: IndexSet
    rb_e: IndexSet

    def faces(self) -> dict[str, IndexSet]:
        return {"lb_b": self.lb_b, "ff_b": self.ff_b, "rb_b": self.rb_b,
                "lb_e": self.lb_e, "ff_e": self.ff_e, "rb_e": self.rb_e}


def ebD_inverse_sets(ed_plus: IndexSet, ed_minus: IndexSet,
                     er_plus: IndexSet, er_minus: IndexSet, c) -> EbDCollection:
    """(E_D^+, N0, E_D^-, E_R^{+,(0)}, N0 cupbar (E_R^{(0)}+1), E_R^{-,(0)}+1)."""
    cut = as_fraction(c)
    er0 = pxind0(er_plus, er_minus, cut + 1)
    return EbDCollection(
        lb_b=ed_plus.clip(cut),
        ff_b=IndexSet.n0().clip(cut),
        rb_b=ed_minus.clip(cut),
        lb_e=closure0(er_plus, cut),
        ff_e=IndexSet.n0().clip(cut).extended_union(er0.shift(1)).clip(cut),
        rb_e=closure0(er_minus, cut + 1).shift(1).clip(cut))


# -- bound records -------------------------------------------------------------------

@dataclass(frozen=True)
class BoundCheck:
    bound_id: str
    face: str
    j: int | None
    required: Fraction | None      # None encodes an emptiness requirement
    achieved: Fraction | None      # None encodes an empty face (+infinity onset)
    strict: bool
    passed: bool

    def to_json(self) -> dict:
        def enc(v):
            return None if v is None else {"num": v.numerator, "den": v.denominator}
        return {"bound_id": self.bound_id, "face": self.face, "j": self.j,
                "required": enc(self.required), "achieved": enc(self.achieved),
                "strict": self.strict, "pass": self.passed}


@dataclass
class LedgerTrace:
    """Per-stage collections plus the verified-bound records of one ledger run."""

    c: Fraction
    stages: dict = field(default_factory=dict)
    checks: list[BoundCheck] = field(default_factory=list)

    @property
    def failed(self) -> bool:
        return any(not ch.passed for ch in self.checks)

    def first_failure(self) -> BoundCheck | None:
        for ch in self.checks:
            if not ch.passed:
                return ch
        return None

    def record(self, stage: str, value) -> None:
        self.stages[stage] = value

    def check(self, bound_id: str, face: str, s: IndexSet,
              required: Fraction | None, j: int | None = None,
              strict: bool = False, drop_origin: bool = False) -> None:
        achieved = (s.remove_origin() if drop_origin else s).min_re()
        if required is None:
            passed = achieved is None
        elif achieved is None:
            passed = True
        else:
            passed = achieved > required if strict else achieved >= required
        self.checks.append(BoundCheck(bound_id, face, j, required, achieved,
                                      strict, passed))

    def check_collection(self, bound_id: str, col: TbCollection,
                         bounds: dict, j: int | None = None,
                         strict_faces: frozenset = frozenset(),
                         drop_origin_faces: frozenset = frozenset()) -> None:
        for face, req in bounds.items():
            self.check(bound_id, face, col.faces()[face], req, j,
                       strict=face in strict_faces,
                       drop_origin=face in drop_origin_faces)

    def raise_on_failure(self) -> None:
        bad = self.first_failure()
        if bad is not None:
            raise BoundViolation(
                f"ledger bound {bad.bound_id} failed at face {bad.face}"
                f" (j={bad.j}): required {'empty' if bad.required is None else bad.required}"
                f"{' strictly' if bad.strict else ''},"
                f" achieved {'empty' if bad.achieved is None else bad.achieved}",
                face=bad.face, stage=bad.bound_id, j=bad.j)

    def to_json(self) -> dict:
        def stage_json(v):
            if isinstance(v, list):
                return [stage_json(x) for x in v]
            return {face: [[[g.z.re.numerator, g.z.re.denominator,
                             g.z.im.numerator, g.z.im.denominator], g.k]
                           for g in s.clip(self.c).generators]
                    for face, s in v.faces().items()}
        return {
            "C": {"num": self.c.numerator, "den": self.c.denominator},
            "stages": {k: stage_json(v) for k, v in self.stages.items()},
            "checks": [ch.to_json() for ch in self.checks],
            "failed": self.failed,
        }


# -- parameters ------------------------------------------------------------------------

@dataclass
class ParametrixParams:
    """Inputs of the nine-face ledger.

    The seed sets come from the boundary spectra of the two normal operators;
    ``ed_plus``/``ed_minus`` map an admissible dilation weight to the
    corresponding side of its boundary spectrum.  ``forbidden`` answers
    whether a weight is excluded; the ladder weights alpha_D + j*eps must
    avoid it over the whole run.
    """

    et_plus: IndexSet
    et_minus: IndexSet
    ed_plus: Callable[[Fraction], IndexSet]
    ed_minus: Callable[[Fraction], IndexSet]
    alphaD: Fraction
    beta: Fraction
    betaT_minus: Fraction
    betaT_plus: Fraction
    epsilon: Fraction
    c: Fraction
    forbidden: Callable[[Fraction], bool]

    @property
    def alphaT(self) -> Fraction:
        return self.alphaD - self.beta

    @property
    def betaT_delta(self) -> Fraction:
        return min(self.betaT_plus - self.betaT_minus, Fraction(1))

    @property
    def b_margin(self) -> Fraction:
        return min(self.beta - self.betaT_minus, self.betaT_plus - self.beta)

    @property
    def work_bound(self) -> Fraction:
        return self.c + max(self.alphaD, 0) + 3

    def validate(self, ladder_down: bool = False) -> None:
        if not self.betaT_minus < self.beta < self.betaT_plus:
            raise ForbiddenWeight(
                f"beta={self.beta} outside ({self.betaT_minus}, {self.betaT_plus})")
        if not (0 < self.epsilon <= self.betaT_delta / 2):
            raise ForbiddenWeight(f"epsilon={self.epsilon} violates (0, betaT_delta/2]")
        if not self.epsilon < self.b_margin:
            raise ForbiddenWeight(f"epsilon={self.epsilon} >= window margin "
                                  f"{self.b_margin}")
        horizon = self.ladder_horizon()
        j = 0
        while j * self.epsilon <= horizon:
            if self.forbidden(self.alphaD + j * self.epsilon):
                raise ForbiddenWeight(
                    f"ladder weight {self.alphaD + j * self.epsilon} is forbidden")
            if ladder_down and self.forbidden(self.alphaD - j * self.epsilon):
                raise ForbiddenWeight(
                    f"descending ladder weight {self.alphaD - j * self.epsilon} "
                    f"is forbidden")
            j += 1

    def ladder_horizon(self) -> Fraction:
        return self.c + abs(self.alphaD) + abs(self.betaT_minus) + 3

    def iteration_cap(self) -> int:
        return int(math.ceil((self.c + abs(self.alphaD) + abs(self.betaT_minus) + 2)
                             / self.epsilon)) + 2

    def adjoint(self) -> "ParametrixParams":
        """Parameters of the adjoint problem (smooth-operator-density convention):
        weights negate with a unit shift at the translation face."""
        ed_plus, ed_minus = self.ed_plus, self.ed_minus
        return ParametrixParams(
            et_plus=self.et_minus.conjugate().shift(-1),
            et_minus=self.et_plus.conjugate().shift(1),
            ed_plus=lambda a: ed_minus(-a).conjugate(),
            ed_minus=lambda a: ed_plus(-a).conjugate(),
            alphaD=-self.alphaD,
            beta=-self.beta - 1,
            betaT_minus=-self.betaT_plus - 1,
            betaT_plus=-self.betaT_minus - 1,
            epsilon=self.epsilon,
            c=self.c,
            forbidden=lambda a, f=self.forbidden: f(-a))


def select_epsilon(alphaD: Fraction, beta: Fraction, betaT_minus: Fraction,
                   betaT_plus: Fraction, c: Fraction,
                   forbidden: Callable[[Fraction], bool],
                   both_directions: bool = True, max_den: int = 400) -> Fraction:
    """Largest step 1/m meeting the ladder constraints.

    Dyadic steps cannot avoid integer-spaced forbidden sets from half-integer
    weights, so the search runs over all unit fractions: the largest 1/m with
    1/m <= betaT_delta/2, 1/m < the window margin, and the ladder
    alphaD +/- j/m clear of the forbidden set over the whole horizon.
    """
    delta = min(betaT_plus - betaT_minus, Fraction(1))
    margin = min(beta - betaT_minus, betaT_plus - beta)
    horizon = c + abs(alphaD) + abs(betaT_minus) + 3
    for m in range(2, max_den + 1):
        eps = Fraction(1, m)
        if eps > delta / 2 or eps >= margin:
            continue
        j, ok = 0, True
        while j * eps <= horizon:
            if forbidden(alphaD + j * eps) or \
                    (both_directions and forbidden(alphaD - j * eps)):
                ok = False
                break
            j += 1
        if ok:
            return eps
    raise ForbiddenWeight("no admissible ladder step 1/m found "
                          f"for alphaD={alphaD} up to 1/{max_den}")


# -- the nine-face ledger -----------------------------------------------------------------

@dataclass(frozen=True)
class _TSide:
    """Translation-face derived sets, computed once per run."""

    et0: IndexSet
    etp0: IndexSet
    etm0: IndexSet
    et2: IndexSet
    etp2: IndexSet
    etm2: IndexSet
    et2p: IndexSet


def _t_side(p: ParametrixParams, w: Fraction) -> _TSide:
    etp0 = closure0(p.et_plus, w)
    etm0 = closure0(p.et_minus, w)
    et0 = pxind0(p.et_plus, p.et_minus, w)
    etp2, etm2, et2 = closure12(p.et_plus, p.et_minus, w)
    return _TSide(et0, etp0, etm0, et2, etp2, etm2, et2.remove_origin())


def tb_normal_inverse_collections(p: ParametrixParams
                                  ) -> tuple[TbCollection, TbCollection]:
    """The two normal-operator inverse collections (E_T^Q, E_D^Q(alpha_D))."""
    p.validate()
    t = _t_side(p, p.work_bound)
    return (_et_q(t, p.work_bound), _ed_q(t, p, p.alphaD, p.work_bound))


def _et_q(t: _TSide, w: Fraction) -> TbCollection:
    e = IndexSet.empty()
    return TbCollection(
        ffD=t.et2, ffT=IndexSet.n0().clip(w), lf=t.etm2,
        rf=t.etp2.shift(1).clip(w),
        lbD=e, rbD=e, lbT=e, rbT=e,
        if_=t.et2p.shift(1).clip(w))


def _ed_q(t: _TSide, p: ParametrixParams, alpha: Fraction, w: Fraction) -> TbCollection:
    edp, edm = p.ed_plus(alpha), p.ed_minus(alpha)
    n0 = IndexSet.n0().clip(w)
    return TbCollection(
        ffD=n0,
        ffT=n0.extended_union(t.et0.shift(1)).clip(w),
        lf=t.etm0,
        rf=t.etp0.shift(1).clip(w),
        lbD=edp.clip(w),
        rbD=edm.clip(w),
        lbT=t.etm0.add(edp).clip(w),
        rbT=IndexSet.empty(),
        if_=t.etp0.add(t.etm0).shift(1).clip(w))


def tb_q1_r1(p: ParametrixParams, alpha_prime,
             _t: _TSide | None = None) -> tuple[TbCollection, TbCollection]:
    """The rough-parametrix and remainder collections (E^Q, E^R) at one
    dilation weight; raises ForbiddenWeight off the admissible set."""
    a = as_fraction(alpha_prime)
    if p.forbidden(a):
        raise ForbiddenWeight(f"weight {a} lies in the forbidden set")
    w = p.work_bound
    t = _t_side(p, w) if _t is None else _t
    eq = _et_q(t, w).union(_ed_q(t, p, a, w))
    edp, edm = p.ed_plus(a), p.ed_minus(a)
    n1 = IndexSet.n0().shift(1).clip(w)
    er = TbCollection(
        ffD=t.et2p,
        ffT=n1.extended_union(t.et0.shift(1)).clip(w),
        lf=t.etm2,
        rf=t.etp2.shift(1).clip(w),
        lbD=edp.shift(1).clip(w),
        rbD=edm.clip(w),
        lbT=t.etm0.add(edp).clip(w),
        rbT=IndexSet.empty(),
        if_=t.et2p.shift(1).clip(w))
    return eq, er


def _a_d(p: ParametrixParams, alpha: Fraction, sign: int) -> Fraction | None:
    """a_D^+/-(alpha) = +/- the onset of the matching dilation seed set."""
    s = p.ed_plus(alpha) if sign > 0 else p.ed_minus(alpha)
    m = s.min_re()
    return None if m is None else sign * m if sign > 0 else -m


def _qr_seed_bounds(p: ParametrixParams, alpha: Fraction,
                    remainder: bool) -> dict:
    adp = _a_d(p, alpha, +1)
    adm = _a_d(p, alpha, -1)
    one = Fraction(1)
    bounds = {
        "ffD": p.betaT_delta if remainder else Fraction(0),
        "ffT": one if remainder else Fraction(0),
        "lf": -p.betaT_minus,
        "rf": p.betaT_plus + 1,
        "lbD": None if adp is None else adp + (1 if remainder else 0),
        "rbD": None if adm is None else -adm,
        "lbT": None if adp is None else adp - p.betaT_minus,
        "rbT": None,                       # must be empty
        "if": one + p.betaT_delta,
    }
    # empty dilation seeds make the corresponding faces empty
    for face in ("lbD", "rbD", "lbT"):
        if bounds[face] is None:
            bounds[face] = Fraction(10**6)  # unreachable: face must be empty too
    return bounds


def tb_improve_left(p: ParametrixParams, trace: LedgerTrace | None = None,
                    stage_prefix: str = "") -> LedgerTrace:
    """Weight-ladder removal of the left-boundary error.

    Iterates E^{R(j)} = E^R(alphaD + j eps) o E^{R(j-1)} (and the parametrix
    increments E^{Q(j),Delta}) until every left/front face clears the cutoff,
    verifying at each step the nine-component inductive lower bound; then
    assembles E_2^Q as the face-wise union of the increments with the right
    boundary faces forced empty, and verifies its bound list.
    """
    p.validate()
    trace = trace or LedgerTrace(p.c)
    sp = stage_prefix
    eps, a0, c = p.epsilon, p.alphaD, p.c
    t = _t_side(p, p.work_bound)

    eq0, er0 = tb_q1_r1(p, a0, t)
    trace.check_collection(sp + "EqQseed", eq0, _qr_seed_bounds(p, a0, False), j=0)
    trace.check_collection(sp + "EqRseed", er0, _qr_seed_bounds(p, a0, True), j=0)

    er_list = [er0]
    eq_delta: list[TbCollection] = []
    grow_faces = ("ffD", "ffT", "lf", "rf", "lbD", "lbT", "if")
    cap = p.iteration_cap()
    for j in range(1, cap + 1):
        aj = a0 + j * eps
        if p.forbidden(aj):
            raise ForbiddenWeight(f"ladder weight {aj} lies in the forbidden set")
        eqj, erj_seed = tb_q1_r1(p, aj, t)
        trace.check_collection(sp + "EqQseed", eqj, _qr_seed_bounds(p, aj, False), j=j)
        trace.check_collection(sp + "EqRseed", erj_seed,
                               _qr_seed_bounds(p, aj, True), j=j)
        er_j = compose_3b(erj_seed, er_list[-1])
        eq_j = compose_3b(eqj, er_list[-1])
        trace.check_collection(
            sp + "EqImprIndR", er_j,
            {"ffD": (j + 1) * eps, "ffT": 1 + j * eps,
             "lf": -p.betaT_minus + j * eps, "rf": p.betaT_plus + j * eps + 1,
             "lbD": a0 + (j + 1) * eps, "rbD": -a0,
             "lbT": a0 - p.betaT_minus + j * eps,
             "rbT": -a0 + p.betaT_plus + 1 - eps,
             "if": 1 + (j + 1) * eps},
            j=j)
        trace.check_collection(
            sp + "EqQ2IndBd-term", eq_j,
            {"ffD": eps, "ffT": Fraction(1), "lf": -p.betaT_minus,
             "rf": 1 + p.betaT_plus, "lbD": a0 + eps,
             "lbT": a0 - p.betaT_minus, "if": 1 + eps,
             "rbD": -a0, "rbT": -a0 + p.betaT_plus + 1 - eps},
            j=j, strict_faces=frozenset({"lbD"}))
        er_list.append(er_j)
        eq_delta.append(eq_j)
        done = all(
            s.is_empty or s.min_re() > c
            for col in (er_j, eq_j)
            for face, s in col.faces().items() if face in grow_faces)
        if done:
            break
    else:
        trace.check(sp + "termination", "all", IndexSet.empty(), Fraction(0), j=cap)
        trace.checks[-1] = BoundCheck(sp + "termination", "all", cap,
                                      Fraction(0), None, False, False)
        trace.raise_on_failure()

    # E_2^Q: face-wise union of the increments, right boundary forced empty
    faces = {name: IndexSet.empty() for name in
             ("ffD", "ffT", "lf", "rf", "lbD", "lbT", "if")}
    for col in eq_delta:
        for name in faces:
            faces[name] = faces[name].union(col.faces()[name])
    eq2 = TbCollection.of(
        **{("if_" if k == "if" else k): v.clip(p.work_bound)
           for k, v in faces.items()})
    trace.check_collection(
        sp + "EqQ2IndBd", eq2,
        {"ffD": eps, "ffT": Fraction(1), "lf": -p.betaT_minus,
         "rf": 1 + p.betaT_plus, "lbD": a0 + eps, "lbT": a0 - p.betaT_minus,
         "if": 1 + eps, "rbD": None, "rbT": None},
        strict_faces=frozenset({"lbD"}))

    trace.record(sp + "EQseed", eq0)
    trace.record(sp + "ER", er_list)
    trace.record(sp + "EQdelta", eq_delta)
    trace.record(sp + "EQ2", eq2)
    trace.raise_on_failure()
    return trace


def _right_parametrix(p: ParametrixParams, trace: LedgerTrace,
                      stage_prefix: str = "") -> tuple[TbCollection, TbCollection]:
    """Improvement ladder, Neumann series, and final right-parametrix assembly.

    Returns (E_Q, E_R) and extends the trace with the Neumann stages and the
    final bound lists.
    """
    sp = stage_prefix
    if sp + "EQ2" not in trace.stages:
        tb_improve_left(p, trace, sp)
    eps, a0, c = p.epsilon, p.alphaD, p.c
    eq_seed: TbCollection = trace.stages[sp + "EQseed"]
    er0: TbCollection = trace.stages[sp + "ER"][0]
    eq2: TbCollection = trace.stages[sp + "EQ2"]
    e = IndexSet.empty()

    er2 = TbCollection(
        ffD=er0.ffD.union(eq2.ffD), ffT=er0.ffT.union(eq2.ffT),
        lf=er0.lf.union(eq2.lf), rf=er0.rf.union(eq2.rf),
        lbD=e, rbD=er0.rbD, lbT=e, rbT=e,
        if_=er0.if_.union(eq2.if_))
    er2_bounds = {"ffD": eps, "ffT": Fraction(1), "lf": -p.betaT_minus,
                  "rf": 1 + p.betaT_plus, "rbD": -a0, "if": 1 + eps,
                  "lbD": None, "lbT": None, "rbT": None}
    trace.check_collection(sp + "EqR2IndBd", er2, er2_bounds,
                           strict_faces=frozenset({"rbD"}))

    delta = None
    if er2.rbD.min_re() is not None:
        delta = er2.rbD.min_re() - (-a0)
    powers = [er2]
    grow = ("ffD", "ffT", "lf", "rf", "if")
    cap = int(math.ceil((c + 2) / eps)) + 3
    for j in range(2, cap + 2):
        nxt = compose_3b(er2, powers[-1])
        powers.append(nxt)
        trace.check_collection(
            sp + "EqNeumann", nxt,
            {"ffD": j * eps, "ffT": 1 + (j - 1) * eps,
             "lf": -p.betaT_minus + (j - 1) * eps,
             "rf": 1 + p.betaT_plus + (j - 1) * eps,
             "lbD": None, "lbT": None,
             "rbD": -a0 if delta is None else -a0 + delta,
             "rbT": -a0 + p.betaT_plus + 1,
             "if": 1 + j * eps},
            j=j)
        if all(s.is_empty or s.min_re() > c
               for f, s in nxt.faces().items() if f in grow):
            break
    else:
        trace.checks.append(BoundCheck(sp + "neumann-termination", "all", cap,
                                       Fraction(0), None, False, False))
        trace.raise_on_failure()

    er3 = powers[0]
    for col in powers[1:]:
        er3 = er3.union(col)
    er3 = er3.clip(p.work_bound)
    trace.check_collection(sp + "EqNeumannE3", er3,
                           dict(er2_bounds, rbT=-a0 + p.betaT_plus + 1),
                           strict_faces=frozenset({"rbD"}))

    base = eq_seed.union(eq2)
    e_q = base.union(compose_3b(base, er3))
    e_r = TbCollection.of(rbD=er3.rbD, rbT=er3.rbT)
    trace.check_collection(
        sp + "EqEPxInd", e_q,
        {"ffD": eps, "ffT": Fraction(1), "lf": -p.betaT_minus,
         "rf": 1 + p.betaT_plus, "lbD": a0, "rbD": -a0,
         "lbT": a0 - p.betaT_minus, "rbT": -a0 + p.betaT_plus + 1 - eps,
         "if": 1 + eps},
        strict_faces=frozenset({"lbD", "rbD"}),
        drop_origin_faces=frozenset({"ffD", "ffT"}))
    # the error is fully residual: (empty, empty, E_rbD, E_rbT - 1)
    for face in ("ffD", "ffT", "lf", "rf", "lbD", "lbT", "if"):
        trace.check(sp + "EqEPx-R-empty", face, e_r.faces()[face], None)
    trace.check(sp + "EqEPx-R", "rbD", e_r.rbD, -a0, strict=True)
    trace.check(sp + "EqEPx-R", "rbT", e_r.rbT, -a0 + p.betaT_plus + 1)

    trace.record(sp + "ER2", er2)
    trace.record(sp + "ER2powers", powers)
    trace.record(sp + "ER3", er3)
    trace.record(sp + "EQ", e_q)
    trace.record(sp + "ERfinal", e_r)
    trace.raise_on_failure()
    return e_q, e_r


def tb_neumann_final(p: ParametrixParams,
                     trace: LedgerTrace | None = None) -> LedgerTrace:
    """Complete the ledger: Neumann stage, final collections, the reflected
    left-parametrix collection from the adjoint run, and the bounds of the
    generalized inverse."""
    p.validate(ladder_down=True)
    trace = trace or LedgerTrace(p.c)
    e_q, e_r = _right_parametrix(p, trace)
    eps, a0, c = p.epsilon, p.alphaD, p.c

    # left parametrix: right ledger for the adjoint problem, star-reflected
    adj = p.adjoint()
    adj.validate()
    eq_sharp, _ = _right_parametrix(adj, trace, stage_prefix="adj:")
    e_q_left = eq_sharp.reflect()
    trace.check_collection(
        "EqEPxInd-left", e_q_left,
        {"ffD": eps, "ffT": Fraction(1), "lf": -p.betaT_minus,
         "rf": 1 + p.betaT_plus, "lbD": a0, "rbD": -a0,
         "lbT": a0 - p.betaT_minus - eps, "rbT": -a0 + p.betaT_plus + 1,
         "if": 1 + eps},
        strict_faces=frozenset({"lbD", "rbD"}),
        drop_origin_faces=frozenset({"ffD", "ffT"}))
    trace.record("EQleft", e_q_left)

    # generalized-inverse assembly from the projector and error collections
    alphaT = p.alphaT
    e_rbD, e_rbT = e_q.rbD, e_q.rbT
    ep_lbD, ep_lbT = e_q_left.lbD, e_q_left.lbT
    proj_ker = fully_residual_to_3b(ep_lbD, ep_lbT,
                                    ep_lbD.shift(-2 * a0), ep_lbT.shift(-2 * alphaT))
    proj_ran = fully_residual_to_3b(e_rbD.shift(2 * a0),
                                    e_rbT.shift(-1 + 2 * alphaT),
                                    e_rbD, e_rbT.shift(-1))
    r_res = fully_residual_to_3b(IndexSet.empty(), IndexSet.empty(),
                                 e_rbD, e_rbT.shift(-1))
    rgr = fully_residual_to_3b(ep_lbD, ep_lbT, e_rbD, e_rbT.shift(-1))

    g = e_q
    g = g.union(compose_3b(proj_ran, e_q))
    g = g.union(compose_3b(e_q_left, r_res))
    g = g.union(compose_3b(e_q_left, compose_3b(proj_ker, r_res)))
    g = g.union(rgr)
    b = p.b_margin
    beta = p.beta
    trace.check_collection(
        "EqPFredIndG", g,
        {"ffD": Fraction(0), "ffT": Fraction(1), "lf": -beta + b - eps,
         "rf": beta + b + 1 - eps, "lbD": a0, "rbD": -a0,
         "lbT": alphaT + b - eps, "rbT": -alphaT + b + 1 - eps,
         "if": Fraction(1)},
        strict_faces=frozenset({"ffD", "lf", "rf", "lbD", "rbD",
                                "lbT", "rbT", "if"}),
        drop_origin_faces=frozenset({"ffD", "ffT"}))
    trace.record("Ginv", g)
    trace.raise_on_failure()
    return trace


def _memoized(fn: Callable[[Fraction], object]) -> Callable[[Fraction], object]:
    cache: dict[Fraction, object] = {}

    def wrapped(a: Fraction):
        if a not in cache:
            cache[a] = fn(a)
        return cache[a]

    return wrapped


def params_from_model(op, w, c, epsilon=None, bound_extra=4) -> ParametrixParams:
    """Build ledger parameters from a model operator and admissible weights."""
    from .model import is_forbidden_D, seed_index_sets, weight_window_T

    c = as_fraction(c)
    lo, hi = weight_window_T(op.n)
    horizon = c + abs(w.alphaD) + abs(lo) + 4
    enum_bound = c + max(abs(w.alphaD), 1) + horizon + bound_extra
    et_p, et_m, ed_p, ed_m = seed_index_sets(op, w, bound=enum_bound)

    forbidden = _memoized(lambda a: is_forbidden_D(op.n, op.VD, a))
    eps = as_fraction(epsilon) if epsilon is not None else select_epsilon(
        w.alphaD, w.beta, lo, hi, c, forbidden)
    return ParametrixParams(
        et_plus=et_p, et_minus=et_m,
        ed_plus=_memoized(ed_p), ed_minus=_memoized(ed_m),
        alphaD=w.alphaD, beta=w.beta, betaT_minus=lo, betaT_plus=hi,
        epsilon=eps, c=c, forbidden=forbidden)
