import random
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from fraisse import parse_class
from fraisse.classes import ClassError, graphs, vector_spaces
from fraisse.independence import (AXIOMS, IndepQuery, a_indep, axiom_suite, check_it_witness,
                                  full_existence_witness, gamma_indep, generated_subsets,
                                  independence_configurations, independence_theorem_witness, m_indep,
                                  m_indep_oracle, search_it_witness)
from fraisse.sexpr import parse_one
from fraisse.structures import generated

G, V2 = graphs(), vector_spaces(2)
PG = parse_class("param(graphs,sets)")
PG_POOL = PG.members(4)


def test_a_indep_spans():
    M = V2.space(["u", "v"])
    assert a_indep(IndepQuery(M, {"u"}, {"v"}))
    r = a_indep(IndepQuery(M, {"u"}, {"u+v", "u"}))
    assert not r and r.witness == "u"


def test_a_indep_graph_points():
    M = G.make(["a", "b", "c"], [("a", "b")])
    assert a_indep(IndepQuery(M, {"a"}, {"b"}, {"c"}))


def test_gamma_indep_edges():
    M = G.make(["a", "b", "c"], [("a", "b")])
    assert gamma_indep(G, IndepQuery(M, {"a"}, {"c"}))
    assert not gamma_indep(G, IndepQuery(M, {"a"}, {"b"}))


def test_gamma_indep_collapse():
    M = V2.space(["u"])
    r = gamma_indep(V2, IndepQuery(M, {"u"}, {"u"}))
    assert not r and r.witness[0] == "collapse"


def test_gamma_indep_parameterized_no_edge():
    M = PG.make(["p"], objects=["a", "b"])
    assert gamma_indep(PG, IndepQuery(M, {"p", "a"}, {"p", "b"}, {"p"}))


def test_query_rejects_unknown_elements():
    with pytest.raises(ClassError):
        IndepQuery(G.make(["a"]), {"a"}, {"zz"})


def test_m_indep_trivial_when_B_inside_base():
    M = V2.space(["u", "v"])
    assert m_indep(IndepQuery(M, {"u"}, {"v"}, {"v"}))


def test_modularity_dim3():
    """In F2-spaces algebraic independence already implies M-independence."""
    M = V2.space(["u", "v", "w"])
    subs = generated_subsets(M)
    for A in subs:
        for B in subs:
            for C in subs:
                q = IndepQuery(M, A, B, C)
                if a_indep(q):
                    assert m_indep(q)


@given(st.randoms(use_true_random=False))
def test_modularity_dim4_sampled(rnd):
    M = V2.space(["u", "v", "w", "t"])
    pick = lambda: rnd.sample(M.elements, rnd.randint(0, 2))
    q = IndepQuery(M, pick(), pick(), pick())
    if a_indep(q):
        assert m_indep(q)


def discrepancy_ambient():
    K = parse_class("param(vec(2),sets)")
    Fp = V2.space(["o", "b"]).rename({"0": "0_p", "o+b": "e"})
    Fq = V2.space(["e", "o"]).rename({"0": "0_q", "e+o": "d"})
    return K.make(["p", "q"], {"p": Fp, "q": Fq})


def test_m_indep_discrepancy():
    M = discrepancy_ambient()
    q = IndepQuery(M, {"o"}, {"p", "q", "b", "d"})
    assert a_indep(q)
    r = m_indep(q)
    assert not r and m_indep_oracle(q) is False
    assert m_indep(q, generator_bound=1).verdict == "true-up-to-bound"


def random_graph(rnd, n):
    vs = ["v%d" % i for i in range(n)]
    return G.make(vs, [(a, b) for a, b in combinations(vs, 2) if rnd.random() < 0.5])


@given(st.randoms(use_true_random=False), st.integers(1, 7))
def test_m_indep_matches_oracle_graphs(rnd, n):
    M = random_graph(rnd, n)
    pick = lambda: rnd.sample(M.elements, rnd.randint(0, min(3, n)))
    q = IndepQuery(M, pick(), pick(), pick())
    assert bool(m_indep(q)) == m_indep_oracle(q)


@given(st.randoms(use_true_random=False))
def test_m_indep_matches_oracle_param_graphs(rnd):
    M = rnd.choice(PG_POOL)
    pick = lambda: rnd.sample(M.elements, rnd.randint(0, min(3, len(M))))
    q = IndepQuery(M, pick(), pick(), pick())
    assert bool(m_indep(q)) == m_indep_oracle(q)


def test_full_existence_graphs():
    E = G.make(["e"])
    A = G.make(["e", "a"], [("e", "a")])
    B = G.make(["e", "b"], [("e", "b")])
    w = full_existence_witness(G, E, A, B)
    assert w.A_prime & w.B_image == w.E_image
    assert not any(x in w.A_prime - w.E_image and y in w.B_image - w.E_image
                   for x, y in w.ambient.relations["E"])


def test_full_existence_vector_complement():
    """A' spans a complement of B over E: dimensions add up."""
    E, A, B = V2.space(["e"]), V2.space(["e", "a"]), V2.space(["e", "b", "c"])
    w = full_existence_witness(V2, E, A, B)
    assert len(w.ambient) == 2 ** (2 + 3 - 1)
    assert w.A_prime & w.B_image == w.E_image
    assert generated(w.ambient, w.A_prime | w.B_image) == set(w.ambient.elements)


def test_full_existence_generic_function():
    K = parse_class("genfun(sets,(S S)->S,depth=1)")
    E = K.lift(K.base.make([]))
    A = K.lift(K.base.make(["a"]), functions={"f": {("a", "a"): "a"}})
    B = K.lift(K.base.make(["b"]), functions={"f": {("b", "b"): "b"}})
    w = full_existence_witness(K, E, A, B)
    x, y = next(iter(w.A_prime)), next(iter(w.B_image))
    assert w.ambient.value("f", (x, y)) not in w.A_prime | w.B_image


@pytest.fixture(scope="module")
def graph_configs():
    return independence_configurations(G, max_component=1)


def test_it_graph_singletons_match_search(graph_configs):
    assert graph_configs
    for cfg in graph_configs:
        w = independence_theorem_witness(G, cfg)
        assert w.found
        if w.D is not None and w.maps[1]:
            assert check_it_witness(G, w) == []
        assert search_it_witness(G, cfg) is not None


def test_it_vector_dim1():
    cfgs = independence_configurations(V2, max_component=1)
    assert cfgs
    for cfg in cfgs:
        w = independence_theorem_witness(V2, cfg)
        assert w.found
        if w.maps[1]:
            assert check_it_witness(V2, w) == []


def test_it_degenerate():
    cfgs = [c for c in independence_configurations(G, max_component=1) if not (c.A0 - c.E)]
    assert cfgs
    w = independence_theorem_witness(G, cfgs[0])
    assert w.found and w.A == cfgs[0].E


def test_eqrel_raw_has_no_witness_and_search_agrees():
    Q = parse_class("eqrel-raw")
    none = 0
    for cfg in independence_configurations(Q, max_component=1):
        w = independence_theorem_witness(Q, cfg)
        found = search_it_witness(Q, cfg) is not None
        assert w.found == found
        none += not found
    assert none > 0


def test_axiom_suite_graphs_small():
    rep = axiom_suite(G, max_size=3, random_cases=20, seed=1)
    assert rep.ok, rep.failures()[:3]
    assert set(rep.counts) >= set(AXIOMS) - {"independence_theorem"}


def test_axiom_suite_negative_control():
    Q = parse_class("eqrel-raw")
    rep = axiom_suite(Q, max_size=3, it_configs=independence_configurations(Q, max_component=1))
    assert not rep.ok
    assert rep.counts["independence_theorem"][1] > 0
    block = rep.summary_block()
    form, _ = parse_one("\n".join(block[:block.index(")") + 1]))
    assert form[0] == "summary"
    assert [row for row in form[1:] if row[0] == "independence_theorem"][0][2] != "0"
