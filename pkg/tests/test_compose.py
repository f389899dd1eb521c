"""Tests for the four boundary-face composition laws."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from tbcalc.faces import (
    BCollection,
    ChCollection,
    ScbtCollection,
    TbCollection,
    compose_3b,
    compose_b,
    compose_ch,
    compose_scbt,
    fully_residual_to_3b,
)
from tbcalc.indexset import GapViolation, IndexSet

F = Fraction
E = IndexSet.empty
N0 = IndexSet.n0


def gens(*pts):
    return IndexSet.gen(*pts)


def random_set(rng, lo=-8, max_gens=3) -> IndexSet:
    pts = [(F(rng.randint(lo, 12), 4), rng.randint(0, 2)) for _ in range(rng.randint(0, max_gens))]
    return IndexSet.gen(*pts) if pts else IndexSet.empty()


def random_b(rng) -> BCollection:
    return BCollection(random_set(rng), random_set(rng), random_set(rng))


def random_scbt(rng) -> ScbtCollection:
    return ScbtCollection(*(random_set(rng) for _ in range(4)))


def random_ch(rng) -> ChCollection:
    return ChCollection(*(random_set(rng) for _ in range(4)))


def random_tb(rng, lo=-8) -> TbCollection:
    return TbCollection(*(random_set(rng, lo) for _ in range(9)))


def faces_equal_below(a, b, c) -> bool:
    return all(x.truncate(c) == y.truncate(c)
               for x, y in zip(a._values(), b._values()))


# -- b-calculus -----------------------------------------------------------------

def test_b_small_identity():
    ident = BCollection.identity()
    assert compose_b(ident, ident) == ident


def test_b_example_derived():
    e = BCollection(gens((1, 0)), N0(), E())
    f = BCollection(E(), N0(), gens((2, 0)))
    g = compose_b(e, f)
    assert g.lb == gens((1, 0))
    assert g.ff == gens((0, 0), (3, 1))
    assert g.rb == gens((2, 0))


def test_b_gap_violation():
    e = BCollection(E(), E(), gens((0, 0)))
    f = BCollection(gens((0, 0)), E(), E())
    with pytest.raises(GapViolation):
        compose_b(e, f)


def test_b_identity_random():
    rng = random.Random(101)
    ident = BCollection.identity()
    for _ in range(50):
        f = random_b(rng)
        assert faces_equal_below(compose_b(ident, f), f, 5)
        assert faces_equal_below(compose_b(f, ident), f, 5)


# -- transition calculus ----------------------------------------------------------

def test_scbt_small_identity():
    ident = ScbtCollection.identity()
    assert compose_scbt(ident, ident) == ident


def test_scbt_examples_derived():
    e = ScbtCollection(gens((1, 0)), E(), N0(), N0())
    f = ScbtCollection(E(), gens((1, 0)), N0(), N0())
    assert compose_scbt(e, f).tf == gens((0, 0), (2, 1))

    e2 = ScbtCollection(E(), N0(), E(), E())
    f2 = ScbtCollection(N0(), E(), E(), E())
    assert compose_scbt(e2, f2).zf == N0()


def test_scbt_accepts_all_inputs():
    # no positivity precondition is stated for this law
    e = ScbtCollection(gens((-3, 0)), gens((-3, 0)), gens((-3, 0)), gens((-3, 0)))
    compose_scbt(e, e)


def test_scbt_identity_random():
    rng = random.Random(103)
    ident = ScbtCollection.identity()
    for _ in range(50):
        f = random_scbt(rng)
        assert faces_equal_below(compose_scbt(ident, f), f, 5)
        assert faces_equal_below(compose_scbt(f, ident), f, 5)


# -- semiclassical cone calculus ----------------------------------------------------

def test_ch_small_identity():
    ident = ChCollection.identity()
    assert compose_ch(ident, ident) == ident


def test_ch_formulas():
    e = ChCollection(E(), N0(), gens((1, 0)), N0())
    f = ChCollection(gens((F(1, 2), 0)), N0(), E(), N0())
    g = compose_ch(e, f)
    # ff pairs only (E_ff+F_ff) with (E_lb+F_rb); the rb x lb pairing is integrated out
    assert g.ff == N0()
    assert g.lb == gens((F(1, 2), 0))
    assert g.tf == N0()

    e2 = ChCollection(E(), E(), E(), gens((1, 0)))
    f2 = ChCollection(E(), E(), E(), gens((2, 0)))
    assert compose_ch(e2, f2).tf == gens((3, 0))


def test_ch_gap_violation():
    e = ChCollection(E(), E(), N0(), E())
    f = ChCollection(N0(), E(), E(), E())
    with pytest.raises(GapViolation):
        compose_ch(e, f)


def test_ch_identity_random():
    rng = random.Random(107)
    ident = ChCollection.identity()
    for _ in range(50):
        f = random_ch(rng)
        assert faces_equal_below(compose_ch(ident, f), f, 5)
        assert faces_equal_below(compose_ch(f, ident), f, 5)


# -- 3b calculus -----------------------------------------------------------------------

def test_3b_small_identity():
    ident = TbCollection.identity()
    assert compose_3b(ident, ident) == ident


def test_3b_identity_random():
    rng = random.Random(109)
    ident = TbCollection.identity()
    for _ in range(50):
        f = random_tb(rng)
        assert faces_equal_below(compose_3b(ident, f), f, 5)
        assert faces_equal_below(compose_3b(f, ident), f, 5)


def test_3b_gap_violation_identifies_face():
    e = TbCollection.of(rbT=gens((F(1, 2), 0)), ffD=N0(), ffT=N0())
    f = TbCollection.of(lbT=gens((F(1, 2), 0)), ffD=N0(), ffT=N0())
    with pytest.raises(GapViolation) as err:
        compose_3b(e, f)
    assert err.value.face == "rbT"

    e2 = TbCollection.of(rbD=gens((0, 0)))
    f2 = TbCollection.of(lbD=gens((0, 0)))
    with pytest.raises(GapViolation) as err2:
        compose_3b(e2, f2)
    assert err2.value.face == "rbD"


def test_3b_shifted_cross_terms():
    # if/lf/rf cross terms carry a -1 shift
    e = TbCollection.of(rf=gens((2, 0)))
    f = TbCollection.of(lf=gens((3, 0)))
    g = compose_3b(e, f)
    assert g.ffD == gens((4, 0))
    e2 = TbCollection.of(if_=gens((1, 0)))
    f2 = TbCollection.of(if_=gens((1, 1)))
    g2 = compose_3b(e2, f2)
    assert g2.ffT == gens((1, 1))
    assert g2.if_ == gens((1, 1))


def random_tb_composable(rng) -> TbCollection:
    """Random 9-face collection whose boundary faces respect both gap conditions."""
    col = random_tb(rng, lo=0)
    return TbCollection.of(
        ffD=col.ffD, ffT=col.ffT, lf=col.lf, rf=col.rf, if_=col.if_,
        lbD=random_set(rng, lo=1), rbD=random_set(rng, lo=1),
        lbT=random_set(rng, lo=3), rbT=random_set(rng, lo=3))


def test_3b_monotonicity_random():
    rng = random.Random(113)
    for _ in range(30):
        e, f = random_tb_composable(rng), random_tb_composable(rng)
        extra = random_tb_composable(rng)
        e_big = e.union(extra)
        g_small, g_big = compose_3b(e, f), compose_3b(e_big, f)
        for a, b in zip(g_small._values(), g_big._values()):
            assert a.subset_of(b)


def test_3b_gap_preservation_for_parametrix():
    # with E.rbT empty and nonnegative ffD sets, the rbD onset never drops
    rng = random.Random(127)
    for _ in range(40):
        a = F(rng.randint(-4, 4), 2)
        def rbd_set():
            return IndexSet.gen((a + F(rng.randint(0, 6), 2), rng.randint(0, 2)))
        e = TbCollection.of(ffD=random_set(rng, lo=0), ffT=N0(), rbD=rbd_set(),
                            lf=random_set(rng, lo=0))
        f = TbCollection.of(ffD=random_set(rng, lo=0), ffT=N0(), rbD=rbd_set(),
                            lf=random_set(rng, lo=0))
        g = compose_3b(e, f)
        assert g.rbD.min_re() is None or g.rbD.min_re() >= a


# -- serialization ------------------------------------------------------------------

def test_json_round_trip():
    rng = random.Random(131)
    col = random_tb(rng)
    data = col.to_json()
    assert set(data) == set(TbCollection.FACE_KEYS)
    assert TbCollection.from_json(data) == col

    b = random_b(rng)
    assert BCollection.from_json(b.to_json()) == b


def test_fully_residual_lift():
    lifted = fully_residual_to_3b(E(), E(), gens((1, 0)), gens((2, 0)))
    assert lifted.rbD == gens((1, 0))
    assert lifted.rbT == gens((3, 0))
    for face in ("ffD", "ffT", "lf", "rf", "lbD", "lbT", "if"):
        assert lifted.faces()[face].is_empty
