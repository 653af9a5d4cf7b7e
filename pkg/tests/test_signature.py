import pytest
from hypothesis import given, strategies as st

from fraisse.sexpr import ParseError, dumps, parse, parse_one
from fraisse.signature import (Bijection, EquivalenceWithQuotient, Function, FunctionSymbol, Predicate,
                               RelationSymbol, Signature, SignatureError, Sort, extend_signature_generic,
                               format_signature, parameterize_signature, parse_signature,
                               unparameterize_signature)
from fraisse.classes import abelian_groups, graphs, sets


atoms = st.from_regex(r"[a-z][a-z0-9+_']{0,5}", fullmatch=True)
sexprs = st.recursive(atoms, lambda inner: st.lists(inner, max_size=4), max_leaves=15)


@given(sexprs)
def test_sexpr_round_trip(tree):
    text = dumps(tree)
    back = parse_one(text)[0]
    assert dumps(back) == text


def test_sexpr_error_has_position():
    with pytest.raises(ParseError) as err:
        parse("(a (b c)\n  (d")
    assert err.value.line is not None


def test_signature_text_round_trip():
    text = "(signature (sort V object) (sort P parameter) (rel E (P V V)) (fun plus (V V) V))"
    sig = parse_signature(text)
    assert parse_signature(format_signature(sig)) == sig
    assert sig.parameter_sort == "P"


def test_two_parameter_sorts_rejected():
    with pytest.raises(SignatureError):
        Signature((Sort("P", "parameter"), Sort("Q", "parameter")))


def test_dangling_sort_rejected():
    with pytest.raises(SignatureError):
        Signature((Sort("V"),), (), (RelationSymbol("E", ("V", "W")),))


def test_parameterize_graphs():
    L = parameterize_signature(graphs().signature, sets("P").signature)
    assert L.relation("E").args == ("P", "V", "V")
    assert L.sort("P").kind == "parameter"


def test_parameterize_empty():
    empty = Signature()
    L = parameterize_signature(empty, sets("P").signature)
    assert L.sort_names == ("P",)
    assert not L.functions and not L.relations


def test_parameterize_abelian():
    L = parameterize_signature(abelian_groups().signature, sets("P").signature)
    assert L.function("zero").args == ("P",)
    assert L.function("plus").args == ("P", "G", "G")
    assert L.function("neg").args == ("P", "G")
    assert L.function("zero").result == "G"


@pytest.mark.parametrize("base", [graphs(), abelian_groups(), sets()])
def test_unparameterize_inverts(base):
    L = parameterize_signature(base.signature, sets("P").signature)
    objects, params = unparameterize_signature(L)
    assert objects == base.signature
    assert params.sort_names == ("P",)


def test_generic_extensions():
    S = sets().signature
    assert extend_signature_generic(S, Predicate("S", 1)).relation("U").args == ("S",)
    B = extend_signature_generic(S, Bijection("S"))
    assert B.function("pi").args == ("S",) and B.function("piinv").result == "S"
    Q = extend_signature_generic(graphs().signature, EquivalenceWithQuotient("V"))
    assert Q.sort(Q.function("p").result).kind == "quotient"
    assert len(Q.relations) == 2       # the graph edge keeps its name, the equivalence gets a fresh one
    F = extend_signature_generic(S, Function(("S", "S"), "S"))
    assert F.function("f").arity == 2


def test_explicit_name_collision():
    with pytest.raises(SignatureError):
        extend_signature_generic(graphs().signature, Predicate("V", 1, name="E"))
