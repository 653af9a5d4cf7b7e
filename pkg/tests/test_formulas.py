import pytest
from hypothesis import given, strategies as st

from fraisse import parse_class
from fraisse.classes import graphs, vector_spaces
from fraisse.formulas import (And, Eq, FormulaError, Not, Rel, check_forbidden, evaluate, flatten_parameterized,
                              format_formula, parse_formula)
from fraisse.structures import App, Structure, Var

from oracles import (atom_parameters, flattening_mismatch, is_object_atom, random_conjunction, total_param_vec2)

G = graphs()
V2 = vector_spaces(2)
x, y = Var("x", "V"), Var("y", "V")
PV2 = parse_class("param(vec(2),sets)")


def test_relation_atom():
    S = G.make(["a", "b"], [("a", "b")])
    assert evaluate(Rel("E", (x, y)), S, {"x": "a", "y": "b"}) is True


def test_characteristic_two():
    S = V2.space(["u"])
    phi = Eq(App("plus", (x, y)), App("zero"))
    assert evaluate(phi, S, {"x": "u", "y": "u"}) is True


KF = parse_class("genfun(sets,(S S)->S)")
s_, t_ = Var("s", "S"), Var("t", "S")


def partial(table):
    return Structure(KF.signature, {"S": ["a", "b"]}, {}, {"f": table})


def test_frontier_gives_undefined():
    S = partial({("a", "a"): "a"})
    f = App("f", (s_, t_))
    assert evaluate(Eq(f, s_), S, {"s": "a", "t": "b"}) is None
    assert evaluate(Eq(f, s_), S, {"s": "a", "t": "a"}) is True
    # a decided conjunct still settles the conjunction
    assert evaluate(And((Eq(f, s_), Eq(s_, t_))), S, {"s": "a", "t": "b"}) is False


def test_check_forbidden_loops():
    loop = Rel("E", (x, x))
    simple = G.make(["a", "b"], [("a", "b")])
    assert check_forbidden(simple, [loop]).clean
    looped = Structure(G.signature, {"V": ["a"]}, {"E": [("a", "a")]})
    rep = check_forbidden(looped, [loop])
    assert not rep.clean


def test_commutativity_clean_on_space():
    S = V2.space(["u", "v"])
    phi = Not(Eq(App("plus", (x, y)), App("plus", (y, x))))
    assert check_forbidden(S, [phi]).clean


def test_text_round_trip():
    text = "(and (rel E p x y) (not (= (fun plus p x y) (fun zero p))))"
    K = parse_class("param(graphs,sets)")
    sig = parse_formula("(rel E p x y)", K.signature, {"p": "P", "x": "V", "y": "V"})
    assert format_formula(sig) == "(rel E p x y)"
    phi = parse_formula("(and (= (fun plus p x y) (fun zero p)) (not (= x y)))", PV2.signature,
                        {"p": "P", "x": "V", "y": "V"})
    assert format_formula(parse_formula(format_formula(phi), PV2.signature,
                                        {"p": "P", "x": "V", "y": "V"})) == format_formula(phi)


def test_flatten_names_foreign_subterm():
    K = parse_class("param(genfun(sets,(S)->S),sets)")
    P, S = "P", "S"
    p, q, a = Var("p", P), Var("q", P), Var("a", S)
    rel_sig = parse_class("param(genpred(genfun(sets,(S)->S),S),sets)").signature
    phi = And((Rel("U", (p, App("f", (q, a)))),))
    fl = flatten_parameterized(phi, rel_sig)
    assert len(fl.introduced) == 1
    z, t = fl.introduced[0]
    assert t == App("f", (q, a))
    assert fl.components["q"].items == (Eq(z, App("f", (q, a))),)
    assert fl.components["p"].items == (Rel("U", (p, z)),)


def test_flatten_parameter_free():
    phi = And((Eq(x, y),))
    fl = flatten_parameterized(phi, PV2.signature)
    assert fl.phi_P.items == ()
    assert list(fl.components) == [None] and fl.components[None] == phi


def test_flatten_two_fibers():
    p, q = Var("p", "P"), Var("q", "P")
    phi = And((Eq(App("plus", (p, x, x)), App("zero", (p,))),
               Not(Eq(App("plus", (q, x, x)), App("zero", (q,))))))
    fl = flatten_parameterized(phi, PV2.signature)
    assert set(fl.components) == {"p", "q"}
    assert not fl.introduced
    small = total_param_vec2(PV2.signature, max_params=2, max_objects=2)
    assert flattening_mismatch(phi, fl, small) is None


def test_flatten_rejects_disjunction():
    from fraisse.formulas import Or
    with pytest.raises(FormulaError):
        flatten_parameterized(Or((Eq(x, y), Not(Eq(x, y)))), PV2.signature)


@given(st.integers(0, 10 ** 6))
def test_flatten_equivalent_and_one_parameter(seed):
    phi = random_conjunction(seed)
    fl = flatten_parameterized(phi, PV2.signature)
    P = PV2.signature.parameter_sort
    for nu, part in fl.components.items():
        for lit in part.items:
            if is_object_atom(lit, PV2.signature):
                assert atom_parameters(lit, P) == (set() if nu is None else {nu})
    for lit in fl.phi_P.items:
        assert not is_object_atom(lit, PV2.signature)
    small = total_param_vec2(PV2.signature, max_params=2, max_objects=2)
    assert flattening_mismatch(phi, fl, small) is None


tables = st.fixed_dictionaries({}, optional={k: st.sampled_from("ab") for k in
                                              [("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")]})


@given(tables, tables, st.sampled_from("ab"), st.sampled_from("ab"))
def test_frontier_refinement_is_monotone(t1, t2, a, b):
    """Filling in frontier entries only resolves undefined values."""
    finer = dict(t2)
    finer.update(t1)
    coarse, fine = partial(t1), partial(finer)
    phi = And((Eq(App("f", (s_, App("f", (t_, s_)))), t_), Not(Eq(App("f", (s_, s_)), t_))))
    v1 = evaluate(phi, coarse, {"s": a, "t": b})
    v2 = evaluate(phi, fine, {"s": a, "t": b})
    if v1 is not None:
        assert v1 == v2
