"""Free amalgams in a few classes, printed as s-expressions."""

from fraisse import parse_class
from fraisse.classes import abelian_groups, graphs, vector_spaces
from fraisse.structures import format_structure


def ident(X):
    return {x: x for x in X.elements}


def main():
    G = graphs()
    E = G.make(["a"])
    res = G.free_amalgam(E, G.make(["a", "b"], [("a", "b")]), G.make(["a", "c"], [("a", "c")]),
                         ident(E), ident(E))
    print(";; two edges glued at a vertex")
    print(format_structure(res.amalgam))

    V2 = vector_spaces(2)
    E = V2.space(["u"])
    res = V2.free_amalgam(E, V2.space(["u", "v"]), V2.space(["u", "w"]), ident(E), ident(E))
    print(";; F2^2 + F2^2 over a common line: %d vectors" % len(res.amalgam))

    AB = abelian_groups()
    E = AB.cyclic(2, "e")
    res = AB.free_amalgam(E, AB.cyclic(4, "a"), AB.cyclic(6, "b"), {"0": "0", "e": "2a"}, {"0": "0", "e": "3b"})
    print(";; Z4 + Z6 over Z2: order %d" % len(res.amalgam))

    K = parse_class("param(graphs,sets)")
    E = K.make(["p"], {"p": G.make(["x"])})
    A = K.make(["p", "q"], {"p": G.make(["x", "y"], [("x", "y")])})
    B = K.make(["p"], {"p": G.make(["x", "z"], [("x", "z")])})
    res = K.free_amalgam(E, A, B, ident(E), ident(E))
    print(";; parameterized graphs")
    print(format_structure(res.amalgam))


if __name__ == "__main__":
    main()
