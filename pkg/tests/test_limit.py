import pytest

from fraisse import parse_class
from fraisse.classes import ClassError, graphs, sets, vector_spaces
from fraisse.formulas import Rel
from fraisse.limit import (SaturationConfig, acl_duplication_check, back_and_forth_check, check_extension_property,
                           ip_witness, saturate, settled_audit, tree_witness, verify_ip_witness,
                           verify_tree_witness)
from fraisse.structures import App, Var, format_structure, generated, parse_structure
from fraisse.registry import resolver_for

from scenarios import NOT_ADJACENT, PLUS_TERM, graphs_saturated, param_graphs_saturated, param_vec_saturated

G, V2 = graphs(), vector_spaces(2)


def test_sets_one_round():
    S = sets()
    res = saturate(SaturationConfig(S, n=1, rounds=1), S.constants_structure())
    assert len(res.structure) >= 1


def test_graphs_n2_clean():
    res = saturate(SaturationConfig(G, n=2, rounds=3), G.constants_structure())
    assert check_extension_property(res.structure, G, 2, within=res.core(1)).clean


def test_settled_audit_graphs_n3():
    K, res = graphs_saturated()
    rep = settled_audit(res)
    assert rep.clean and rep.checked > 1000


def test_saturation_text_is_deterministic():
    a = saturate(SaturationConfig(G, n=3, rounds=3, seed=11), G.constants_structure()).text()
    b = saturate(SaturationConfig(G, n=3, rounds=3, seed=11), G.constants_structure()).text()
    assert a == b
    assert a.startswith(";;")
    body = "\n".join(l for l in a.splitlines() if not l.startswith(";;"))
    S = parse_structure(body, resolver=resolver_for(G))
    assert G.contains(S)


def test_saturation_preserves_membership():
    K, res = param_graphs_saturated()
    assert K.contains(res.structure)


def test_carrier_cap_reports_deficit():
    res = saturate(SaturationConfig(G, n=3, rounds=5, carrier_cap=10), G.constants_structure())
    assert not res.complete and res.deficit


def test_five_cycle_extension_levels():
    """Level 2 only needs a neighbour and a non-neighbour; level 3 needs common neighbours of edges."""
    vs = ["c%d" % i for i in range(5)]
    C5 = G.make(vs, [(vs[i], vs[(i + 1) % 5]) for i in range(5)])
    assert check_extension_property(C5, G, 2).clean
    rep = check_extension_property(C5, G, 3)
    assert not rep.clean
    # no triangle embeds at all, and no edge has a common neighbour
    assert any(len(A) == 0 and len(B) == 3 for A, B in rep.failures)
    assert any(len(A) == 2 and len(B) == 3 for A, B in rep.failures)


def test_vacuous_extension_property():
    rep = check_extension_property(G.make([]), G, 0)
    assert rep.clean


def test_param_graphs_patterns_n2():
    """Over each parameter, every adjacency pattern to an existing vertex is realized."""
    K, res = param_graphs_saturated()
    M = res.structure
    E = M.relations["E"]
    for p in ["p0", "p1", "p2"]:
        adj = any((p, "b", x) in E for x in M.carriers["V"])
        non = any((p, "b", x) not in E and x != "b" for x in M.carriers["V"])
        assert adj and non


def test_back_and_forth_isolated_pair():
    K, res = graphs_saturated()
    rep = back_and_forth_check(res.structure, K, depth=1, samples=10, within=res.core(1))
    assert rep.clean


def test_back_and_forth_depth_zero():
    rep = back_and_forth_check(G.make(["a"]), G, depth=0)
    assert rep.clean


def test_acl_graph_one_amalgam():
    D = G.make(["a", "x"])
    n, M, found = acl_duplication_check(G, D, {"a"}, "x", rounds=1)
    assert n == 2


def test_acl_vector_copies():
    D = V2.space(["u", "v"])
    n, M, found = acl_duplication_check(V2, D, {"u"}, "v", rounds=1)
    assert n >= 2
    base = generated(M, {"u"})
    assert all(y not in base for y in found) and len(set(found)) == n


def test_acl_rejects_generated():
    with pytest.raises(ClassError):
        acl_duplication_check(V2, V2.space(["u", "v"]), {"u"}, "u")


def test_ip_witness_k0_and_k2():
    K, res = param_graphs_saturated()
    M = res.structure
    w0 = ip_witness(M, K, NOT_ADJACENT, 0, env={"b": "b"})
    assert w0.params == []
    w = ip_witness(M, K, NOT_ADJACENT, 2, env={"b": "b"})
    assert len(w.objects) == 4
    ok, n = verify_ip_witness(M, w, NOT_ADJACENT, env={"b": "b"})
    assert ok and n == 8


def test_tree_depth_zero_and_rejection():
    K, res = param_vec_saturated()
    w = tree_witness(res.structure, K, PLUS_TERM, 0)
    assert list(w.paths) == [()]
    P = parse_class("param(sets,sets)")
    with pytest.raises(ClassError):
        tree_witness(P.make(["p"], objects=["a"]), P, App("f", ()), 1)


def test_tree_depth_one():
    K, res = param_vec_saturated()
    w = tree_witness(res.structure, K, PLUS_TERM, 1, 2)
    assert w is not None and verify_tree_witness(res.structure, K, PLUS_TERM, w) == []
