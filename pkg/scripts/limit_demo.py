"""Saturate the class of graphs, audit it, and exhibit an IP pattern over parameters."""

import sys

from fraisse import parse_class
from fraisse.formulas import Not, Rel
from fraisse.limit import SaturationConfig, ip_witness, saturate, settled_audit, verify_ip_witness
from fraisse.structures import Var


def main(rounds=5):
    G = parse_class("graphs")
    res = saturate(SaturationConfig(G, n=3, rounds=rounds, seed=7), G.constants_structure())
    rep = settled_audit(res)
    print("graphs: %d vertices after %d rounds, settled audit %s (%d pairs)"
          % (len(res.structure), rounds, "clean" if rep.clean else "FAILED", rep.checked))

    K = parse_class("param(graphs,sets)")
    start = K.make(["p0", "p1", "p2"], {}, objects=["b"])
    M = saturate(SaturationConfig(K, n=5, rounds=1), start).structure
    psi = Not(Rel("E", (Var("p", "P"), Var("b", "V"), Var("x", "V"))))
    w = ip_witness(M, K, psi, 3, env={"b": "b"})
    ok, n = verify_ip_witness(M, w, psi, env={"b": "b"})
    print("not E_p(b, x) shatters %s: %s (%d evaluations)" % (w.params, ok, n))
    for I, a in sorted(w.objects.items(), key=lambda kv: sorted(kv[0])):
        print("  %-14s %s" % (sorted(I), a))


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 5)
