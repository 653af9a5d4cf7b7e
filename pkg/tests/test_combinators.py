from itertools import combinations

import pytest

from fraisse import parse_class
from fraisse.classes import ClassError, graphs, sets, vector_spaces, verify_pushout
from fraisse.combinators import CubeInput, three_amalgamation
from fraisse.independence import cube_configurations
from fraisse.structures import Structure, generated

G, S, V2 = graphs(), sets(), vector_spaces(2)


def ident(X):
    return {x: x for x in X.elements}


def span_subspaces(D):
    """All F2-subspaces of the table-backed space D, by brute force."""
    out = set()
    for k in range(len(D) + 1):
        for gens in combinations(D.elements, min(k, 3)):
            out.add(frozenset(generated(D, gens)))
    return out


# generic predicate ------------------------------------------------------------

def test_predicate_on_sets():
    K = parse_class("genpred(sets,S)")
    A = K.lift(S.make(["a"]), relations={"U": [("a",)]})
    B = K.lift(S.make(["b"]))
    E = K.lift(S.make([]))
    D = K.free_amalgam(E, A, B, {}, {}).amalgam
    assert D.relations["U"] == {("a",)}


def test_predicate_on_graphs_stays_empty():
    K = parse_class("genpred(graphs,V)")
    A = K.lift(G.make(["a", "b"], [("a", "b")]))
    B = K.lift(G.make(["a", "c"]))
    E = K.lift(G.make(["a"]))
    D = K.free_amalgam(E, A, B, {"a": "a"}, {"a": "a"}).amalgam
    assert not D.relations["U"]


def test_predicate_new_sum_not_in_U():
    K = parse_class("genpred(vec(2),V)")
    A = K.lift(V2.space(["u"]), relations={"U": [("u",)]})
    B = K.lift(V2.space(["v"]), relations={"U": [("v",)]})
    E = K.lift(V2.space([]))
    res = K.free_amalgam(E, A, B, ident(E), ident(E))
    D = res.amalgam
    assert len(D) == 4
    s = D.value("plus", (res.into_A("u"), res.into_B("v")))
    assert (s,) not in D.relations["U"]
    assert verify_pushout(K, res, K.members(4)).ok


def test_predicate_cubes_complete():
    K = parse_class("genpred(vec(2),V)")
    cubes = cube_configurations(K)
    assert cubes and all(three_amalgamation(K, c).ok for c in cubes)


# generic function -----------------------------------------------------------------

def fun_parts(depth):
    K = parse_class("genfun(sets,(S S)->S,depth=%d)" % depth)
    A = K.lift(S.make(["a"]), functions={"f": {("a", "a"): "a"}})
    B = K.lift(S.make(["b"]), functions={"f": {("b", "b"): "b"}})
    return K, K.lift(S.make([])), A, B


def test_function_depth_one_labels():
    K, E, A, B = fun_parts(1)
    D = K.free_amalgam(E, A, B, {}, {}).amalgam
    assert len(D) == 4
    c1, c2 = D.value("f", ("a", "b")), D.value("f", ("b", "a"))
    assert len({c1, c2, "a", "b"}) == 4
    front = set(D.frontier("f"))
    touching = {t for t in D.argument_tuples("f") if c1 in t or c2 in t}
    assert front == touching


def test_function_depth_zero():
    K, E, A, B = fun_parts(0)
    D = K.free_amalgam(E, A, B, {}, {}).amalgam
    assert set(D.elements) == {"a", "b"}
    assert set(D.frontier("f")) == {("a", "b"), ("b", "a")}


def test_function_on_abelian_groups():
    """f(0) = 0 on Z/2 with f(g) = 0; the amalgam over the zero group keeps both sides' values."""
    K = parse_class("genfun(abgrp,(G)->G,depth=1)")
    AB = K.base
    Z2 = AB.cyclic(2, "g")
    A = K.lift(Z2, functions={"f": {("0",): "0", ("g",): "0"}})
    B = K.lift(AB.cyclic(2, "h"), functions={"f": {("0",): "0", ("h",): "h"}})
    E = K.lift(AB.cyclic(1), functions={"f": {("0",): "0"}})
    res = K.free_amalgam(E, A, B, {"0": "0"}, {"0": "0"})
    D = res.amalgam
    assert len(D) >= 4
    g, h = res.into_A("g"), res.into_B("h")
    assert D.value("f", (g,)) == res.into_A("0") and D.value("f", (h,)) == h
    gh = D.value("plus", (g, h))
    # the sum is new: depth 1 gives it a fresh f-value, not one of the old elements
    val = D.value("f", (gh,))
    assert val is not None and val not in {res.into_A("0"), g, h, gh}
    assert not res.problems()


def test_function_generic_over_presentation_is_refused():
    K = parse_class("genfun(abgrp,(G G)->G,depth=1)")
    with pytest.raises(ClassError):
        K.generic_element("G", K.constants_structure())


# generic bijection --------------------------------------------------------------

def bij_lift(K, base):
    idt = {(x,): x for x in base.elements}
    return K.lift(base, functions={"pi": idt, "piinv": idt})


def test_bijection_already_total():
    K = parse_class("genbij(sets,S,window=2)")
    A = K.lift(S.make(["a"]), functions={"pi": {("a",): "a"}, "piinv": {("a",): "a"}})
    B = K.lift(S.make(["b"]), functions={"pi": {("b",): "b"}, "piinv": {("b",): "b"}})
    D = K.free_amalgam(K.lift(S.make([])), A, B, {}, {}).amalgam
    assert set(D.elements) == {"a", "b"}
    assert all(D.value("pi", (x,)) == x for x in "ab")


def test_bijection_window_orbit():
    K = parse_class("genbij(vec(2),V,window=2)")
    A, B, E = (bij_lift(K, V2.space(n)) for n in (["u"], ["v"], []))
    res = K.free_amalgam(E, A, B, ident(E), ident(E))
    D = res.amalgam
    s = D.value("plus", (res.into_A("u"), res.into_B("v")))
    orbit = [s]
    for _ in range(2):
        orbit.append(D.value("pi", (orbit[-1],)))
    back = [s]
    for _ in range(2):
        back.append(D.value("piinv", (back[-1],)))
    chain = back[::-1] + orbit[1:]
    assert len(set(chain)) == 5 and None not in chain
    assert D.value("pi", (chain[-1],)) is None and D.value("piinv", (chain[0],)) is None
    assert len(D) == 4 + 4


def test_bijection_window_zero():
    K = parse_class("genbij(vec(2),V,window=0)")
    A, B, E = (bij_lift(K, V2.space(n)) for n in (["u"], ["v"], []))
    res = K.free_amalgam(E, A, B, ident(E), ident(E))
    D = res.amalgam
    s = D.value("plus", (res.into_A("u"), res.into_B("v")))
    assert len(D) == 4 and D.value("pi", (s,)) is None


# equivalence with quotient ----------------------------------------------------------

def quotient(K, elems, blocks, extra_points=()):
    pts = ["w%d" % i for i in range(len(blocks))] + list(extra_points)
    proj = {(x,): "w%d" % i for i, b in enumerate(blocks) for x in b}
    E = [(x, y) for b in blocks for x in b for y in b]
    return Structure(K.signature, {"S": elems, "W": pts}, {"E": E}, {"p": proj})


def test_quotient_two_singletons():
    K = parse_class("eqrel-q")
    E = quotient(K, [], [])
    A = quotient(K, ["a"], [["a"]])
    B = quotient(K, ["b"], [["b"]])
    D = K.free_amalgam(E, A, B, {}, {}).amalgam
    assert len(D.carriers["W"]) == 2 and ("a", "b") not in D.relations["E"]


def test_quotient_merge_through_base():
    K = parse_class("eqrel-q")
    E = quotient(K, ["e"], [["e"]])
    A = quotient(K, ["e", "a"], [["e", "a"]])
    B = quotient(K, ["e", "b"], [["e", "b"]])
    D = K.free_amalgam(E, A, B, ident(E), ident(E)).amalgam
    assert ("a", "b") in D.relations["E"] and len(D.carriers["W"]) == 1
    C = quotient(K, ["e", "c"], [["e"], ["c"]])
    D2 = K.free_amalgam(E, A, C, ident(E), ident(E)).amalgam
    assert ("a", "c") not in D2.relations["E"]


def test_quotient_empty_fiber_survives():
    K = parse_class("eqrel-q")
    E = quotient(K, [], [])
    A = quotient(K, [], [], extra_points=["lonely"])
    B = quotient(K, ["b"], [["b"]])
    res = K.free_amalgam(E, A, B, {}, {})
    D = res.amalgam
    img = res.into_A("lonely")
    assert img in D.carriers["W"] and not any(v == img for v in D.functions["p"].values())


# generic substructure ------------------------------------------------------------------

def test_substructure_on_sets_is_predicate_like():
    K = parse_class("gensub(sets)")
    A = K.lift(S.make(["a"]), relations={K.symbol: [("a",)]})
    B = K.lift(S.make(["b"]))
    D = K.free_amalgam(K.lift(S.make([])), A, B, {}, {}).amalgam
    assert D.relations[K.symbol] == {("a",)}


def test_subspace_amalgam_is_span_of_images():
    K = parse_class("gensub(vec(2))")
    A = K.lift(V2.space(["u"]), relations={"R": [("0",), ("u",)]})
    B = K.lift(V2.space(["v"]), relations={"R": [("0",), ("v",)]})
    E = K.lift(V2.space([]), relations={"R": [("0",)]})
    res = K.free_amalgam(E, A, B, ident(E), ident(E))
    D = res.amalgam
    R = {t[0] for t in D.relations["R"]}
    assert R == generated(D.reduct(V2.signature), [res.into_A("u"), res.into_B("v")])


def test_subspace_cube_refuted_by_four_vectors():
    """The completion of the refuted cube has no admissible subspace R at all."""
    K = parse_class("gensub(vec(2))")
    bad = [(c, r) for c in cube_configurations(K) for r in [three_amalgamation(K, c)] if not r.ok]
    assert bad
    cube, r = bad[0]
    R = lambda X: {t[0] for t in X.relations["R"]}
    assert r.status == "fail"
    # not R(a0+b0) in D0, R(a1+b1) in D1, R(b0+b1) in B
    assert cube.D0.value("plus", (cube.a0["a0"], cube.b0["b0"])) not in R(cube.D0)
    a1 = cube.a1["a0"]
    assert any(cube.D1.value("plus", (a1, cube.b1[y])) in R(cube.D1) for y in cube.B1.elements if y != "0")
    assert R(cube.B) - {"0"}
    # brute force: every subspace of the completion that restricts correctly to D0, D1 and B
    D = r.D.reduct(V2.signature)
    ok = []
    for W in span_subspaces(D):
        good = True
        for X, m in ((cube.D0, r.d0), (cube.D1, r.d1), (cube.B, r.b)):
            for x in X.elements:
                if (m[x] in W) != (x in R(X)):
                    good = False
        ok.append(good)
    assert not any(ok)


def test_cube_input_invariants():
    E = S.make([])
    A, B0, B1 = S.make(["a"]), S.make(["b"]), S.make(["c"])
    D0, D1, B = S.make(["a", "b"]), S.make(["a", "c"]), S.make(["b", "c"])
    cube = CubeInput(E, A, B0, B1, D0, D1, B, {}, {}, {}, {"a": "a"}, {"a": "a"}, {"b": "b"}, {"c": "c"},
                     {"b": "b"}, {"c": "c"})
    assert not cube.problems()
    r = three_amalgamation(S, cube)
    assert r.ok and len(r.D) == 3
    clash = CubeInput(E, A, B0, B1, S.make(["a"]), D1, B, {}, {}, {}, {"a": "a"}, {"a": "a"}, {"b": "a"},
                      {"c": "c"}, {"b": "b"}, {"c": "c"})
    assert clash.problems()


def test_vector_cube_intersections():
    """dim E = 0, dims A, B0, B1 = 1: the completion is 3-dimensional and the meets are exact."""
    E = V2.space([])
    A, B0, B1 = V2.space(["a"]), V2.space(["b"]), V2.space(["c"])
    D0, D1, B = V2.space(["a", "b"]), V2.space(["a", "c"]), V2.space(["b", "c"])
    i = lambda X: {x: x for x in X.elements}
    cube = CubeInput(E, A, B0, B1, D0, D1, B, i(E), i(E), i(E), i(A), i(A), i(B0), i(B1), i(B0), i(B1))
    r = three_amalgamation(V2, cube)
    assert r.ok and len(r.D) == 8
    im = lambda m: set(m.values())
    assert im(r.d0) & im(r.b) == {r.b[x] for x in B0.elements}
    assert im(r.d1) & im(r.b) == {r.b[x] for x in B1.elements}
    assert im(r.d0) & im(r.d1) == {r.d0[x] for x in A.elements}


# parameterization -----------------------------------------------------------------------

def test_param_sets_union():
    K = parse_class("param(sets,sets)")
    E = K.make(["p"])
    A = K.make(["p"], objects=["a"])
    B = K.make(["p", "q"], objects=["b"])
    D = K.free_amalgam(E, A, B, ident(E), ident(E)).amalgam
    assert len(D.carriers["S"]) == 2 and len(D.carriers["P"]) == 2


def test_param_graph_no_new_edge():
    K = parse_class("param(graphs,sets)")
    E = K.make(["p"])
    A = K.make(["p"], objects=["a"])
    B = K.make(["p"], objects=["b"])
    res = K.free_amalgam(E, A, B, ident(E), ident(E))
    assert not res.amalgam.relations["E"]
    assert verify_pushout(K, res, K.members(4)).ok


def test_param_vector_fibers():
    K = parse_class("param(vec(2),sets)")
    E = K.make(["p"], {"p": V2.space([])})
    A = K.make(["p"], {"p": V2.space(["u"])})
    B = K.make(["p"], {"p": V2.space(["v"])})
    res = K.free_amalgam(E, A, B, ident(E), ident(E))
    D = res.amalgam
    assert len(K.fiber_core(D, "p")) == 4
    M, q = K.new_parameter(D)
    # at a fresh parameter u and v are free generators: no q-sum is decided
    assert M.value("plus", (q, "u", "v")) is None
    assert verify_pushout(K, res, K.members(8)).ok
