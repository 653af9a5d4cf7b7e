"""Command-line front end.

Exit codes: 0 success, 1 property failure or refused witness (a
counterexample block is printed), 2 usage or parse error, 3 budget deficit.
"""

import argparse
import sys

from .classes import ClassError
from .formulas import FormulaError, flatten_parameterized, format_formula, parse_formula
from .registry import ClassExprError, parse_class, resolver_for
from .sexpr import ParseError
from .structures import (App, BudgetExceeded, StructureError, Var, format_morphism, format_structure,
                         parse_morphism, parse_structure)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
DEFAULT_SEED = 20240229


class UsageError(Exception):
    pass


def parse_structure_file(path, cls):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError("cannot read %s: %s" % (path, exc.strerror)) from None
    try:
        S = parse_structure(text, signature=None, resolver=resolver_for(cls))
    except ParseError as exc:
        raise UsageError("%s:%s" % (path, exc)) from None
    except (StructureError, ClassExprError, ValueError) as exc:
        raise UsageError("%s: %s" % (path, exc)) from None
    if S.signature != cls.signature:
        raise UsageError("%s: signature does not match class %s" % (path, cls.name))
    return S


def _elements(text, S, what):
    names = [x for x in text.replace(",", " ").split()] if text else []
    for x in names:
        if x not in S.sort_of:
            raise UsageError("%s: unknown element id %s" % (what, x))
    return set(names)


def _out(lines):
    for line in lines:
        print(line)


# verbs ----------------------------------------------------------------------------

def cmd_amalgamate(args, cls):
    if not (args.base and args.left and args.right):
        raise UsageError("amalgamate needs --base, --left and --right")
    E = parse_structure_file(args.base, cls)
    A = parse_structure_file(args.left, cls)
    B = parse_structure_file(args.right, cls)
    jA = parse_morphism(open(args.left_map).read(), E, A, True).mapping if args.left_map else None
    jB = parse_morphism(open(args.right_map).read(), E, B, True).mapping if args.right_map else None
    for j, X, tag in ((jA, A, "left"), (jB, B, "right")):
        if j is None:
            missing = [e for e in E.elements if e not in X.sort_of]
            if missing:
                raise UsageError("base element %s is not in the %s structure; give --%s-map" % (missing[0], tag, tag))
    jA = jA or {e: e for e in E.elements}
    jB = jB or {e: e for e in E.elements}
    res = cls.free_amalgam(E, A, B, jA, jB)
    bad = res.problems()
    sys.stdout.write(format_structure(res.amalgam, header=[]))
    if args.maps:
        sys.stdout.write(format_morphism(res.into_A))
        sys.stdout.write(format_morphism(res.into_B))
    if bad:
        print(";; amalgam check failed: %s" % bad[0])
        return EXIT_FAIL
    return EXIT_OK


def cmd_check_class(args, cls):
    from .conditions import check_class
    rep = check_class(cls, args.budget or 4)
    _out(rep.lines())
    if not rep.ok:
        _out(rep.counterexample_block())
        return EXIT_FAIL
    if any(r.status == "budget" for r in rep.results):
        return EXIT_BUDGET
    return EXIT_OK


def cmd_indep(args, cls):
    from .independence import IndepQuery, a_indep, gamma_indep, m_indep
    if args.config:
        return _replay_it(args, cls)
    if not args.ambient:
        raise UsageError("indep needs --ambient (or --config with a counterexample block)")
    M = parse_structure_file(args.ambient, cls)
    q = IndepQuery(M, _elements(args.left, M, "--left"), _elements(args.right, M, "--right"),
                   _elements(args.base, M, "--base"))
    a = a_indep(q)
    g = gamma_indep(cls, IndepQuery(M, q.A | q.C, q.B | q.C, q.C))
    m = m_indep(q, args.gen_bound)
    print("a_indep     %-16s %s%s" % (a.verdict, a.label, _wit(a)))
    print("gamma_indep %-16s %s%s" % (g.verdict, g.label, _wit(g)))
    print("m_indep     %-16s %s%s" % (m.verdict, m.label, _wit(m)))
    if m.verdict == "true-up-to-bound":
        return EXIT_BUDGET
    return EXIT_OK


def _replay_it(args, cls):
    """Re-run the independence theorem on a counterexample block printed by suite."""
    from .independence import independence_theorem_witness, read_it_config
    try:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError("cannot read %s: %s" % (args.config, exc.strerror)) from None
    try:
        cfg = read_it_config(text, resolver_for(cls))
    except (ParseError, StructureError) as exc:
        raise UsageError("%s: %s" % (args.config, exc)) from None
    w = independence_theorem_witness(cls, cfg)
    print("independence theorem  %s%s" % (w.status, "  (%s)" % w.reason if w.reason else ""))
    if w.status == "none":
        return EXIT_FAIL
    return EXIT_OK if w.found else EXIT_BUDGET


def _wit(r):
    return "" if r.witness is None else "  witness %s" % (r.witness,)


def cmd_suite(args, cls):
    from .independence import axiom_suite, independence_configurations
    size = args.budget or 4
    try:
        cfgs = independence_configurations(cls, 2)
        note = None
    except ClassError as exc:
        cfgs, note = [], str(exc)
    rep = axiom_suite(cls, max_size=size, random_cases=args.random, seed=args.seed,
                      it_configs=cfgs, workers=args.workers)
    _out(rep.lines())
    if note:
        print(";; independence theorem not enumerated: %s" % note)
    _out(rep.summary_block())
    if not rep.ok:
        return EXIT_FAIL
    if any(c[2] for c in rep.counts.values()):
        return EXIT_BUDGET
    return EXIT_OK


def cmd_saturate(args, cls):
    from .limit import SaturationConfig, saturate, settled_audit
    start = parse_structure_file(args.start, cls) if args.start else cls.constants_structure()
    cfg = SaturationConfig(cls, n=args.n, rounds=args.rounds, seed=args.seed,
                           carrier_cap=args.carrier_cap, budget=args.budget)
    res = saturate(cfg, start)
    sys.stdout.write(res.text())
    status = EXIT_OK
    if args.audit:
        rep = settled_audit(res)
        _out(";; " + line if not line.startswith(";;") else line for line in rep.lines())
        if rep.failures:
            status = EXIT_FAIL
    if not res.complete and status == EXIT_OK:
        status = EXIT_BUDGET
    return status


def cmd_witness(args, cls):
    from .limit import (acl_duplication_check, ip_witness, tree_witness, verify_ip_witness,
                        verify_tree_witness)
    kind = args.kind
    if kind == "existence":
        from .independence import full_existence_witness
        E = parse_structure_file(args.base, cls)
        A = parse_structure_file(args.left, cls)
        B = parse_structure_file(args.right, cls)
        w = full_existence_witness(cls, E, A, B)
        print(";; copy of the left structure: %s" % " ".join(sorted(w.A_prime, key=w.ambient.position.get)))
        sys.stdout.write(format_structure(w.ambient, header=[]))
        return EXIT_OK
    if not args.ambient:
        raise UsageError("witness --kind %s needs --ambient" % kind)
    M = parse_structure_file(args.ambient, cls)
    if kind == "acl":
        if not args.element:
            raise UsageError("witness --kind acl needs --element")
        base = _elements(args.base, M, "--base")
        a = args.element
        if a not in M.sort_of:
            raise UsageError("--element: unknown element id %s" % a)
        try:
            count, _, found = acl_duplication_check(cls, M, base, a, rounds=args.rounds)
        except ClassError as exc:
            print("refused: %s" % exc)
            return EXIT_FAIL
        print("realizations after %d rounds: %d (%s)" % (args.rounds, count, " ".join(found)))
        return EXIT_OK
    if kind == "ip":
        if not args.formula:
            raise UsageError("witness --kind ip needs --formula")
        sorts = dict(v.split(":", 1) for v in args.var)
        psi = parse_formula(args.formula, cls.signature, sorts)
        env = {}
        for b in args.bind:
            k, v = b.split("=", 1)
            env[k] = v
        w = ip_witness(M, cls, psi, args.k, env=env, budget=args.budget)
        if w is None:
            print("no configuration found in this structure (deficit, not a refutation)")
            return EXIT_BUDGET
        ok, count = verify_ip_witness(M, w, psi, env=env)
        _out(w.lines())
        print("verified %d evaluations: %s" % (count, "ok" if ok else "FAILED"))
        return EXIT_OK if ok else EXIT_FAIL
    if kind == "tree":
        sym = args.term or "plus"
        sort = cls.K0.signature.sort_names[0] if hasattr(cls, "K0") else None
        term = App(sym, (Var("x", sort), Var("y", sort)))
        try:
            w = tree_witness(M, cls, term, args.depth, args.branching, budget=args.budget)
        except ClassError as exc:
            print("refused: %s" % exc)
            return EXIT_FAIL
        if w is None:
            print("no tree configuration found in this structure (deficit, not a refutation)")
            return EXIT_BUDGET
        bad = verify_tree_witness(M, cls, term, w) if args.depth else []
        _out(w.lines())
        print("verified: %s" % ("ok" if not bad else bad[0]))
        return EXIT_OK if not bad else EXIT_FAIL
    raise UsageError("unknown witness kind %s" % kind)


def cmd_flatten(args, cls):
    if not args.formula:
        raise UsageError("flatten needs --formula")
    text = args.formula
    if text.startswith("@"):
        with open(text[1:], encoding="utf-8") as fh:
            text = fh.read()
    sorts = dict(v.split(":", 1) for v in args.var)
    phi = parse_formula(text, cls.signature, sorts)
    fl = flatten_parameterized(phi, cls.signature)
    print("(parameters %s)" % format_formula(fl.phi_P))
    for k, part in fl.components.items():
        print("(component %s %s)" % ("-" if k is None else k, format_formula(part)))
    for v, t in fl.introduced:
        print(";; %s := %s" % (v.name, t))
    return EXIT_OK


VERBS = {
    "amalgamate": cmd_amalgamate, "check-class": cmd_check_class, "indep": cmd_indep,
    "suite": cmd_suite, "saturate": cmd_saturate, "witness": cmd_witness, "flatten": cmd_flatten,
}


def build_parser():
    p = argparse.ArgumentParser(prog="fraisse", description="Free amalgamation classes: constructions and checks.")
    p.add_argument("verb", choices=sorted(VERBS))
    p.add_argument("--class", dest="klass", required=True, help="class expression, e.g. graphs or param(vec(2),sets)")
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--window", type=int, default=None, help="override the window of genbij classes")
    p.add_argument("--rounds", type=int, default=2)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--gen-bound", dest="gen_bound", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--carrier-cap", dest="carrier_cap", type=int, default=400)
    p.add_argument("--random", type=int, default=100, help="random cases for suite")
    p.add_argument("--base")
    p.add_argument("--left")
    p.add_argument("--right")
    p.add_argument("--left-map", dest="left_map")
    p.add_argument("--right-map", dest="right_map")
    p.add_argument("--maps", action="store_true", help="also print the two embeddings")
    p.add_argument("--ambient")
    p.add_argument("--config", help="counterexample block from suite, replayed by indep")
    p.add_argument("--start")
    p.add_argument("--audit", action="store_true")
    p.add_argument("--kind", choices=["ip", "tree", "acl", "existence"], default="ip")
    p.add_argument("--formula")
    p.add_argument("--var", action="append", default=[], help="name:sort for formula variables")
    p.add_argument("--bind", action="append", default=[], help="name=element for fixed variables")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--term", help="binary function symbol for tree witnesses (default plus)")
    p.add_argument("--branching", type=int, default=2)
    p.add_argument("--element")
    return p


def _with_window(text, window):
    if window is None or not text.startswith("genbij("):
        return text
    if "window=" in text:
        import re
        return re.sub(r"window=\d+", "window=%d" % window, text)
    return text[:-1] + ",window=%d)" % window


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cls = parse_class(_with_window(args.klass.strip(), args.window))
        return VERBS[args.verb](args, cls)
    except (UsageError, ClassExprError, ParseError, FormulaError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print("budget exhausted: %s" % exc)
        return EXIT_BUDGET
    except (ClassError, StructureError) as exc:
        print("refused: %s" % exc)
        return EXIT_FAIL


def main():
    sys.exit(run())
