"""Saturated structures shared by the limit tests and the acceptance run."""

from functools import lru_cache

from fraisse import parse_class
from fraisse.classes import sets, vector_spaces
from fraisse.combinators import parameterize_class
from fraisse.formulas import Not, Rel
from fraisse.limit import SaturationConfig, saturate
from fraisse.structures import App, Var

PLUS_TERM = App("plus", (Var("x", "V"), Var("y", "V")))
NOT_ADJACENT = Not(Rel("E", (Var("p", "P"), Var("b", "V"), Var("x", "V"))))


@lru_cache(maxsize=None)
def param_graphs_saturated():
    K = parse_class("param(graphs,sets)")
    start = K.make(["p0", "p1", "p2"], {}, objects=["b"])
    res = saturate(SaturationConfig(K, n=5, rounds=1), start)
    return K, res


@lru_cache(maxsize=None)
def param_vec_saturated():
    """Three fibers sharing u, v, w; in r the sum u+v+w is the shared z, in s and t z is new."""
    K = parameterize_class(vector_spaces(2), sets("P"),
                           catalogue=lambda cls, A: cls.identification_extensions(A))
    V = K.K0
    shared = {"u", "v", "w", "z"}

    def fiber(basis, p, extra=None):
        S = V.space(basis)
        ren = {x: (x if x in shared else x + "@" + p) for x in S.elements}
        ren.update(extra or {})
        return S.rename(ren)

    start = K.make(["r", "s", "t"], {"r": fiber(["u", "v", "w"], "r", {"u+v+w": "z"}),
                                     "s": fiber(["u", "v", "w", "z"], "s"),
                                     "t": fiber(["u", "v", "w", "z"], "t")})
    res = saturate(SaturationConfig(K, n=4, rounds=1, carrier_cap=300, max_pairs=10), start)
    return K, res


@lru_cache(maxsize=None)
def graphs_saturated(rounds=5, seed=7):
    K = parse_class("graphs")
    res = saturate(SaturationConfig(K, n=3, rounds=rounds, seed=seed), K.constants_structure())
    return K, res
