from itertools import product
from math import gcd

import pytest
from hypothesis import given, strategies as st

from fraisse.classes import (abelian_groups, check_feuvrier, check_generic_element, equivalence_relations,
                             graphs, sets, vector_spaces, verify_pushout)
from fraisse.presentation import Presentation, smith_normal_form
from fraisse.structures import Structure, find_morphisms, generated

from oracles import cyclic_pushout_oracle

G, S, V2, AB = graphs(), sets(), vector_spaces(2), abelian_groups()


def path_amalgam():
    E = G.make(["a"])
    A = G.make(["a", "b"], [("a", "b")])
    B = G.make(["a", "c"], [("a", "c")])
    return G.free_amalgam(E, A, B, {"a": "a"}, {"a": "a"})


def test_graph_amalgam_is_path():
    D = path_amalgam().amalgam
    assert len(D) == 3
    edges = {frozenset(t) for t in D.relations["E"]}
    assert edges == {frozenset("ab"), frozenset("ac")}


def test_graph_amalgam_universal():
    assert verify_pushout(G, path_amalgam(), G.members(4)).ok


def test_corrupted_amalgam_is_caught():
    res = path_amalgam()
    D = res.amalgam
    bad = Structure(D.signature, D.carriers, {"E": set(D.relations["E"]) | {("b", "c"), ("c", "b")}})
    res.amalgam = bad
    res.into_A = type(res.into_A)(res.into_A.source, bad, res.into_A.mapping)
    res.into_B = type(res.into_B)(res.into_B.source, bad, res.into_B.mapping)
    rep = verify_pushout(G, res, G.members(3))
    assert not rep.ok and rep.violation == "no factoring morphism"


def test_sets_amalgam_is_union():
    E, A, B = S.make(["e"]), S.make(["e", "a"]), S.make(["e", "b"])
    res = S.free_amalgam(E, A, B, {"e": "e"}, {"e": "e"})
    assert len(res.amalgam) == 3
    assert verify_pushout(S, res, S.members(5)).ok


def test_f2_dimension_formula():
    """dim A + dim B - dim E, against a span count of the amalgam."""
    A = V2.space(["u", "w"])
    B = V2.space(["u", "v"])
    E = V2.space(["u"])
    res = V2.free_amalgam(E, A, B, {x: x for x in E.elements}, {x: x for x in E.elements})
    D = res.amalgam
    assert len(D) == 8
    gens = [res.into_A("u"), res.into_A("w"), res.into_B("v")]
    assert generated(D, gens) == set(D.elements)
    assert verify_pushout(V2, res, V2.members(4)).ok


def cyc_name(r, g):
    return "0" if r == 0 else (g if r == 1 else "%d%s" % (r, g))


def cyclic_configs(max_order=6):
    for m in range(1, max_order + 1):
        for n in range(1, max_order + 1):
            for d in range(1, gcd(m, n) + 1):
                if gcd(m, n) % d:
                    continue
                for k in range(max(d, 1)):
                    if gcd(k, d) == 1 or d == 1:
                        yield m, n, d, k
                        if d == 1:
                            break


def check_cyclic_pushout(m, n, d, k):
    A, B, E = AB.cyclic(m, "a"), AB.cyclic(n, "b"), AB.cyclic(d, "e")
    jA = {cyc_name(i, "e"): cyc_name(i * (m // d) % m, "a") for i in range(d)}
    jB = {cyc_name(i, "e"): cyc_name(i * k * (n // d) % n, "b") for i in range(d)}
    res = AB.free_amalgam(E, A, B, jA, jB)
    D = res.amalgam
    order, hist, qA, qB, add = cyclic_pushout_oracle(m, n, d, k)
    assert len(D) == order
    h = {}
    for a in range(m):
        for b in range(n):
            x = D.value("plus", (res.into_A(cyc_name(a, "a")), res.into_B(cyc_name(b, "b"))))
            c = add(qA[a], qB[b])
            assert h.setdefault(x, c) == c
    assert len(set(h.values())) == len(h) == order
    for x in D.elements:
        for y in D.elements:
            assert h[D.value("plus", (x, y))] == add(h[x], h[y])


def test_z4_z6_over_z2():
    check_cyclic_pushout(4, 6, 2, 1)


@pytest.mark.parametrize("m,n,d,k", list(cyclic_configs(4)))
def test_cyclic_pushouts_small(m, n, d, k):
    check_cyclic_pushout(m, n, d, k)


small_matrices = st.integers(1, 3).flatmap(
    lambda r: st.integers(1, 3).flatmap(
        lambda c: st.lists(st.lists(st.integers(-9, 9), min_size=c, max_size=c), min_size=r, max_size=r)))


def det(M):
    from sympy import Matrix
    return Matrix(M).det()


@given(small_matrices)
def test_smith_normal_form_against_sympy(M):
    from sympy import Matrix, ZZ
    from sympy.matrices.normalforms import smith_normal_form as sympy_snf
    D, U, V = smith_normal_form(M)
    assert Matrix(U) * Matrix(M) * Matrix(V) == Matrix(D)
    assert abs(det(U)) == 1 and abs(det(V)) == 1
    ref = sympy_snf(Matrix(M), domain=ZZ)
    k = min(len(M), len(M[0]))
    assert [abs(D[i][i]) for i in range(k)] == [abs(ref[i, i]) for i in range(k)]
    diag = [D[i][i] for i in range(k)]
    for a, b in zip(diag, diag[1:]):
        assert (b % a == 0) if a else b == 0


def test_presentation_invariants():
    P = Presentation(["g", "h"], [[2, 0], [0, 4]], "G")
    assert list(P.invariants) == [2, 4] and P.order() == 8
    Q = Presentation(["g", "h"], [[2, 0], [0, 3]], "G")
    assert list(Q.invariants) == [6]


def test_generic_elements():
    A = G.make(["a", "b"], [("a", "b")])
    B, x = G.generic_element("V", A)
    assert len(B) == 3 and not any(x in t for t in B.relations["E"])
    assert check_generic_element(G, A, B, x, G.members(3))
    C, y = V2.generic_element("V", V2.space(["u"]))
    assert len(C) == 4 and generated(C, ["u", y]) == set(C.elements)
    assert check_generic_element(V2, V2.space(["u"]), C, y, V2.members(4))


def test_abelian_generic_is_free_sum():
    A = AB.cyclic(2, "a")
    P, x = AB.generic_element("G", A)
    assert isinstance(P, Presentation) and not P.is_finite
    assert list(P.invariants) == [2, 0]


def test_abelian_generic_extension_property():
    """Every h: A -> T extends to A (+) Z with the new generator sent anywhere, for |T| <= 8."""
    A = AB.cyclic(2, "a")
    P, _ = AB.generic_element("G", A)
    PA = Presentation.from_structure(A, "G")
    new = [g for g in P.generators if g not in PA.generators]
    assert len(new) == 1
    for T in AB.members(8):
        zero = T.value("zero", ())
        for h in find_morphisms(A, T):
            for b in T.elements:
                val = {g: h(g) for g in PA.generators}
                val[new[0]] = b
                for row in P.rows:
                    acc = zero
                    for g, c in zip(P.generators, row):
                        step = val[g] if c >= 0 else T.value("neg", (val[g],))
                        for _ in range(abs(c)):
                            acc = T.value("plus", (acc, step))
                    assert acc == zero


@pytest.mark.parametrize("cls", [S, V2], ids=["sets", "vec2"])
def test_feuvrier_one_based(cls):
    assert check_feuvrier(cls, max_size=4).ok


def test_feuvrier_fails_on_graphs():
    """Adjacent points are algebraically but not freely independent."""
    rep = check_feuvrier(graphs(), max_size=3)
    assert not rep.ok and rep.counterexample is not None


def test_eqrel_membership():
    Q = equivalence_relations()
    M = Q.make([["a", "b"], ["c"]])
    assert Q.contains(M)
    bad = Structure(Q.signature, {"S": ["a", "b"]}, {"E": [("a", "b")]})
    assert not Q.contains(bad)


def test_one_point_extensions_graphs():
    A = G.make(["a", "b"])
    exts = list(G.one_point_extensions(A))
    assert len(exts) == 4           # one new vertex, any adjacency to a and to b


@pytest.mark.parametrize("cls,size", [(S, 3), (G, 3), (V2, 4)], ids=["sets", "graphs", "vec2"])
def test_members_are_members(cls, size):
    for M in cls.members(size):
        assert cls.contains(M)
