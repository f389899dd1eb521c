"""Tests for the parametrix ledger: inverse collections, improvement ladder,
Neumann stage, final bounds, and the generalized-inverse assembly."""

from __future__ import annotations

import json
import random
from fractions import Fraction

import pytest

from tbcalc.indexset import GapViolation, IndexPoint, IndexSet, closure0
from tbcalc.model import (
    ForbiddenWeight,
    ModelOperator,
    RadialPotential,
    WeightPair,
)
from tbcalc.parametrix import (
    BoundViolation,
    LedgerTrace,
    ParametrixParams,
    b_parametrix_sets,
    ch_inverse_sets,
    ebD_inverse_sets,
    params_from_model,
    scbt_inverse_sets,
    select_epsilon,
    tb_improve_left,
    tb_neumann_final,
    tb_normal_inverse_collections,
    tb_q1_r1,
)

F = Fraction
E = IndexSet.empty
N0 = IndexSet.n0
P = IndexPoint.of


def gens(*pts):
    return IndexSet.gen(*pts)


def model(n=4, vd=0, vt=None):
    return ModelOperator(n, vt or RadialPotential.zero(), F(vd))


def workhorse_params(c=3, n=4, vd=0, alphaD=F(1, 2), alphaT=F(0), epsilon=None):
    return params_from_model(model(n, vd), WeightPair(alphaD, alphaT), c,
                             epsilon=epsilon)


def empty_seed_params(c=3) -> ParametrixParams:
    return ParametrixParams(
        et_plus=E(), et_minus=E(),
        ed_plus=lambda a: E(), ed_minus=lambda a: E(),
        alphaD=F(1, 2), beta=F(1, 2), betaT_minus=F(0), betaT_plus=F(1),
        epsilon=F(1, 3), c=F(c), forbidden=lambda a: False)


# -- simple inverse collections -------------------------------------------------------

def test_b_parametrix_sets():
    g = b_parametrix_sets(E(), E(), 5)
    assert g.lb.is_empty and g.rb.is_empty
    assert g.ff.truncate(5) == N0().truncate(5)

    g2 = b_parametrix_sets(gens((1, 0)), N0(), 2)
    assert g2.ff.truncate(2) == [P(0, 0), P(1, 1), P(2, 2)]


def test_b_parametrix_preserves_leading_onset():
    rng = random.Random(301)
    for _ in range(20):
        ep = gens(*[(F(rng.randint(1, 10), 4), rng.randint(0, 2))
                    for _ in range(rng.randint(1, 3))])
        g = b_parametrix_sets(ep, N0(), 4)
        assert g.lb.min_re() == ep.min_re()


def test_scbt_inverse_sets():
    g = scbt_inverse_sets(E(), E(), 5)
    assert g.lb0.is_empty and g.rb0.is_empty
    assert g.tf.truncate(5) == N0().truncate(5)
    assert g.zf == g.tf

    g2 = scbt_inverse_sets(gens((1, 0)), N0(), 3)
    assert g2.lb0.min_re() == 1


def test_scbt_inverse_paper_bound_random():
    rng = random.Random(307)
    done = 0
    while done < 20:
        ap = F(rng.randint(1, 8), 4)
        am = F(rng.randint(-3, 8), 4)
        if ap + am <= 0:
            continue
        g = scbt_inverse_sets(gens((ap, rng.randint(0, 1))),
                              gens((am, rng.randint(0, 1))), 3)
        tfp = g.tf.remove_origin()
        assert tfp.is_empty or tfp.min_re() >= min(ap + am, F(1))
        done += 1


def test_ch_inverse_sets():
    g = ch_inverse_sets(E(), E(), 4)
    assert (g.lb.is_empty and g.rb.is_empty
            and g.ff.truncate(4) == N0().truncate(4)
            and g.tf.truncate(4) == N0().truncate(4))
    g2 = ch_inverse_sets(gens((1, 0)), N0(), 2)
    assert g2.ff.truncate(2) == [P(0, 0), P(1, 1), P(2, 2)]
    assert g2.tf.truncate(2) == N0().truncate(2)


def test_ebD_inverse_sets():
    g = ebD_inverse_sets(gens((1, 0)), N0(), E(), E(), 4)
    assert g.lb_b == gens((1, 0)) and g.rb_b.truncate(4) == N0().truncate(4)
    assert g.ff_b.truncate(4) == N0().truncate(4)
    assert g.lb_e.is_empty and g.rb_e.is_empty
    # the front-face formula N0 cupbar (E_R^(0)+1) always logs at 1,
    # as E_R^(0) contains N0 even for empty seeds
    assert g.ff_e.truncate(4) == N0().extended_union(
        N0().shift(1)).truncate(4)

    g2 = ebD_inverse_sets(gens((1, 0)), N0(), gens((1, 0)), N0(), 2)
    assert g2.ff_e.contains(P(0, 0))
    want = closure0(N0(), 3).shift(1).truncate(2)
    assert g2.rb_e.truncate(2) == want == [P(1, 0), P(2, 1)]


# -- normal-operator inverse collections ------------------------------------------------

def test_tb_normal_inverse_empty_seeds():
    p = empty_seed_params()
    etq, edq = tb_normal_inverse_collections(p)
    c = p.c
    assert etq.ffD.truncate(c) == N0().truncate(c)
    assert etq.ffT.truncate(c) == N0().truncate(c)
    for face in ("lf", "rf", "lbD", "rbD", "lbT", "rbT"):
        assert etq.faces()[face].is_empty
    # trailing face is (N0 minus origin + 1)-style, i.e. starts at 2
    assert etq.if_.min_re() == 2
    assert edq.ffD.truncate(c) == N0().truncate(c)


def test_tb_normal_inverse_model_seeds():
    p = workhorse_params()
    etq, edq = tb_normal_inverse_collections(p)
    assert etq.rf.min_re() == p.betaT_plus + 1
    assert edq.ffD.truncate(p.c) == N0().truncate(p.c)
    assert edq.lbD.min_re() == 2      # smallest forbidden value above 1/2
    assert edq.rbT.is_empty


def test_tb_q1_r1_matches_display():
    from tbcalc.parametrix import _t_side

    p = workhorse_params()
    w = p.work_bound
    t = _t_side(p, w)
    eq, er = tb_q1_r1(p, p.alphaD)
    n0 = N0().clip(w)
    display_q = {
        "ffD": t.et2, "ffT": n0.extended_union(t.et0.shift(1)),
        "lf": t.etm2, "rf": t.etp2.shift(1),
        "lbD": p.ed_plus(p.alphaD), "rbD": p.ed_minus(p.alphaD),
        "lbT": t.etm0.add(p.ed_plus(p.alphaD)), "rbT": E(),
        "if": t.et2p.shift(1)}
    for face, want in display_q.items():
        assert eq.faces()[face].truncate(p.c) == want.truncate(p.c), face
    # remainder drops the origin at ffD and gains one power at lbD
    assert er.ffD.truncate(p.c) == t.et2p.truncate(p.c)
    assert er.lbD.min_re() == eq.lbD.min_re() + 1
    assert er.ffT.min_re() == 1


def test_tb_q1_r1_empty_seeds_ffT():
    p = empty_seed_params()
    _, er = tb_q1_r1(p, p.alphaD)
    assert er.ffT == gens((1, 1))


def test_tb_q1_r1_forbidden():
    p = workhorse_params()
    with pytest.raises(ForbiddenWeight):
        tb_q1_r1(p, F(2))


# -- epsilon selection ---------------------------------------------------------------------

def test_select_epsilon_avoids_integer_ladder():
    from tbcalc.model import is_forbidden_D

    eps = select_epsilon(F(1, 2), F(1, 2), F(0), F(1), F(4),
                         lambda a: is_forbidden_D(4, 0, a))
    assert eps == F(1, 3)
    # dyadic steps from a half-integer weight always hit the integer spectrum
    assert eps.denominator % 2 == 1


def test_select_epsilon_respects_margin():
    eps = select_epsilon(F(1, 2), F(1, 8), F(0), F(1), F(3), lambda a: False)
    assert eps < F(1, 8)


# -- improvement ladder ----------------------------------------------------------------------

def test_improve_left_empty_seeds_structure():
    p = empty_seed_params()
    trace = tb_improve_left(p)
    assert not trace.failed
    ers = trace.stages["ER"]
    prev = None
    for er in ers[1:]:
        for face in ("lf", "rf", "lbD", "rbD", "lbT", "rbT"):
            assert er.faces()[face].is_empty
        for face in ("ffD", "ffT", "if"):
            m = er.faces()[face].min_re()
            assert m is not None
        if prev is not None:
            assert er.ffD.min_re() >= prev.ffD.min_re() + p.epsilon
        prev = er
    assert len(ers) - 1 <= p.iteration_cap()


def test_improve_left_workhorse():
    p = workhorse_params()
    assert p.epsilon == F(1, 3)
    trace = tb_improve_left(p)
    assert not trace.failed
    eq2 = trace.stages["EQ2"]
    assert eq2.rbD.is_empty and eq2.rbT.is_empty
    assert eq2.lbD.min_re() > p.alphaD + p.epsilon
    assert len(trace.stages["ER"]) - 1 <= p.iteration_cap()


def test_improve_left_detects_wrong_window():
    # lying about the window makes the printed bounds fail, not crash
    p = workhorse_params()
    bad = ParametrixParams(
        et_plus=p.et_plus, et_minus=p.et_minus,
        ed_plus=p.ed_plus, ed_minus=p.ed_minus,
        alphaD=p.alphaD, beta=p.beta,
        betaT_minus=F(-1), betaT_plus=F(3, 2),   # wrong: true window is (0, 1)
        epsilon=F(1, 3), c=F(3), forbidden=p.forbidden)
    with pytest.raises(BoundViolation) as err:
        tb_improve_left(bad)
    assert err.value.face in ("rf", "lf", "if", "ffD")


def test_forbidden_weight_at_seed_time():
    with pytest.raises(ForbiddenWeight):
        workhorse_params(alphaD=F(2), alphaT=F(3, 2))


# -- full ledger -------------------------------------------------------------------------------

def test_neumann_final_workhorse():
    p = workhorse_params()
    trace = tb_neumann_final(p)
    assert not trace.failed

    er = trace.stages["ERfinal"]
    nonempty = [f for f, s in er.faces().items() if not s.is_empty]
    assert nonempty == ["rbD", "rbT"]
    assert er.rbT.min_re() >= -p.alphaD + p.betaT_plus + 1

    eq = trace.stages["EQ"]
    assert eq.lbD.min_re() > p.alphaD
    assert eq.rbD.min_re() > -p.alphaD
    assert eq.ffD.contains(P(0, 0))
    assert eq.ffD.remove_origin().min_re() >= p.epsilon

    g = trace.stages["Ginv"]
    assert g.lbD.min_re() > p.alphaD
    assert g.ffT.remove_origin().min_re() >= 1


def test_neumann_final_continues_from_improve_trace():
    p = workhorse_params(c=2)
    trace = tb_improve_left(p)
    n_before = len(trace.stages["ER"])
    done = tb_neumann_final(p, trace)
    assert done is trace
    assert len(trace.stages["ER"]) == n_before
    assert "Ginv" in trace.stages


def test_ledger_determinism():
    p1 = workhorse_params()
    p2 = workhorse_params()
    t1 = json.dumps(tb_neumann_final(p1).to_json(), sort_keys=True)
    t2 = json.dumps(tb_neumann_final(p2).to_json(), sort_keys=True)
    assert t1 == t2


def test_ledger_truncation_prefix_consistency():
    small = workhorse_params(c=2, epsilon=F(1, 3))
    large = workhorse_params(c=3, epsilon=F(1, 3))
    ts = tb_improve_left(small)
    tl = tb_improve_left(large)
    faces = ("ffD", "ffT", "lf", "rf", "lbD", "lbT", "if")
    n_common = min(len(ts.stages["ER"]), len(tl.stages["ER"]))
    for a, b in zip(ts.stages["ER"][:n_common], tl.stages["ER"][:n_common]):
        for face in faces:
            assert a.faces()[face].truncate(2) == b.faces()[face].truncate(2), face
        assert a.rbD.min_re() == b.rbD.min_re()
    for face in faces:
        assert (ts.stages["EQ2"].faces()[face].truncate(2)
                == tl.stages["EQ2"].faces()[face].truncate(2))


def test_double_root_seeds_run_clean():
    p = workhorse_params(c=2, vd=-1)
    trace = tb_neumann_final(p)
    assert not trace.failed


def test_adjoint_params_consistency():
    p = workhorse_params()
    adj = p.adjoint()
    adj.validate()
    assert adj.alphaD == -p.alphaD
    assert adj.beta == -p.beta - 1
    assert adj.betaT_plus == -p.betaT_minus - 1
    assert adj.et_plus.min_re() == adj.betaT_plus
    assert adj.et_minus.min_re() == -adj.betaT_minus


def test_trace_json_shape():
    p = workhorse_params(c=2)
    data = tb_neumann_final(p).to_json()
    assert data["failed"] is False
    assert {"C", "stages", "checks"} <= set(data)
    assert all({"bound_id", "face", "j", "required", "achieved", "pass"}
               <= set(ch) for ch in data["checks"])
    assert any(ch["bound_id"] == "EqPFredIndG" for ch in data["checks"])
