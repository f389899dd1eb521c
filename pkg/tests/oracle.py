"""Brute-force point-enumeration oracle for the exact index-set algebra.

Realized sets are materialized as finite sets of (re, im, k) triples below a
real-part cutoff with a log-power cap, and every operation is applied to the
point sets literally per its defining formula.  The oracle never calls into
the generator-based implementation it is checking.
"""

from __future__ import annotations

from fractions import Fraction

from tbcalc.indexset import IndexPoint, IndexSet

Pt = tuple[Fraction, Fraction, int]  # (re, im, k)

K_CAP = 12


def enum(s: IndexSet, c, kmax: int = K_CAP) -> set[Pt]:
    """All realized points with Re <= c and k <= kmax."""
    cut = Fraction(c)
    out: set[Pt] = set()
    for g in s.generators:
        re = g.z.re
        while re <= cut:
            for k in range(min(g.k, kmax) + 1):
                out.add((re, g.z.im, k))
            re += 1
    return out


def close_down(points: set[Pt]) -> set[Pt]:
    """Close a point set downward in k (the +j closure is handled by callers)."""
    out = set(points)
    for re, im, k in points:
        for kk in range(k):
            out.add((re, im, kk))
    return out


def maximal(points: set[Pt]) -> list[IndexPoint]:
    """Maximal-k representative per exponent, as sorted IndexPoints."""
    best: dict[tuple[Fraction, Fraction], int] = {}
    for re, im, k in points:
        key = (re, im)
        if best.get(key, -1) < k:
            best[key] = k
    return sorted(IndexPoint.of(re, k, im) for (re, im), k in best.items())


def o_add(a: set[Pt], b: set[Pt], c) -> set[Pt]:
    cut = Fraction(c)
    out = set()
    for (ra, ia, ka) in a:
        for (rb, ib, kb) in b:
            if ra + rb <= cut:
                out.add((ra + rb, ia + ib, ka + kb))
    return close_down(out)


def o_union(a: set[Pt], b: set[Pt]) -> set[Pt]:
    return a | b


def o_extended_union(a: set[Pt], b: set[Pt]) -> set[Pt]:
    out = a | b
    support_a = {}
    support_b = {}
    for re, im, k in a:
        support_a[(re, im)] = max(support_a.get((re, im), -1), k)
    for re, im, k in b:
        support_b[(re, im)] = max(support_b.get((re, im), -1), k)
    for z in set(support_a) & set(support_b):
        out.add((z[0], z[1], support_a[z] + support_b[z] + 1))
    return close_down(out)


def o_shift(a: set[Pt], dre, dim=0, c=None) -> set[Pt]:
    dre, dim = Fraction(dre), Fraction(dim)
    out = {(re + dre, im + dim, k) for re, im, k in a}
    if c is not None:
        out = {p for p in out if p[0] <= Fraction(c)}
    return out


def o_closure0(e: IndexSet, c, kmax: int = K_CAP) -> set[Pt]:
    """Fixpoint iteration of T -> E cupbar (T + 1) on truncated point sets."""
    cut = Fraction(c)
    base = enum(e, cut, kmax)
    t = set(base)
    while True:
        nxt = o_extended_union(base, o_shift(t, 1, 0, cut))
        nxt = {p for p in nxt if p[0] <= cut and p[2] <= kmax}
        if nxt == t:
            return t
        t = nxt


def o_pxind0(eplus: IndexSet, eminus: IndexSet, c, kmax: int = K_CAP) -> set[Pt]:
    cut = Fraction(c)
    cp = o_closure0(eplus, cut, kmax)
    cm = o_closure0(eminus, cut, kmax)
    n0 = enum(IndexSet.n0(), cut, kmax)
    n1 = o_shift(n0, 1, 0, cut)
    mid = o_extended_union(o_add(cp, cm, cut), n1)
    return {p for p in o_union(n0, mid) if p[2] <= kmax}


def same(engine: IndexSet, points: set[Pt], c, kmax: int = K_CAP) -> bool:
    """Engine truncation agrees with the oracle point set below (c, kmax)."""
    cut = Fraction(c)
    got = {(p.z.re, p.z.im, kk)
           for p in engine.truncate(cut) for kk in range(min(p.k, kmax) + 1)}
    want = {p for p in points if p[0] <= cut and p[2] <= kmax}
    return got == want
