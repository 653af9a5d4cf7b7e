"""Independent brute-force oracles shared by the test modules."""

import random
from itertools import permutations, product

from fraisse.formulas import And, Eq, Not, evaluate, free_vars, literals, term_vars
from fraisse.structures import App, Structure, Var, evaluate_term


# total parameterized F2-structures -----------------------------------------

def f2_tables(objects):
    """All distinct F2-space structures on `objects` (size 1, 2 or 4), as plus/zero/neg/s0/s1 tables."""
    n = len(objects)
    dim = {1: 0, 2: 1, 4: 2}[n]
    vectors = list(product((0, 1), repeat=dim))
    seen, out = set(), []
    for perm in permutations(objects):
        lab = dict(zip(vectors, perm))
        plus = {(lab[a], lab[b]): lab[tuple((x + y) % 2 for x, y in zip(a, b))] for a in vectors for b in vectors}
        key = frozenset(plus.items())
        if key in seen:
            continue
        seen.add(key)
        zero = lab[tuple([0] * dim)]
        out.append({"plus": plus, "zero": zero,
                    "neg": {x: x for x in objects},
                    "s0": {x: zero for x in objects},
                    "s1": {x: x for x in objects}})
    return out


def total_param_vec2(sig, max_params=2, max_objects=4):
    """Every total param(vec(2), sets) structure in which each parameter's fiber is a space on all objects."""
    out = []
    for np_ in range(1, max_params + 1):
        params = ["p%d" % i for i in range(np_)]
        for no in (1, 2, 4):
            if no > max_objects:
                continue
            objs = ["o%d" % i for i in range(no)]
            tables = f2_tables(objs)
            for choice in product(tables, repeat=np_):
                F = {"plus": {}, "zero": {}, "neg": {}, "s0": {}, "s1": {}}
                for p, t in zip(params, choice):
                    F["zero"][(p,)] = t["zero"]
                    for (a, b), c in t["plus"].items():
                        F["plus"][(p, a, b)] = c
                    for f in ("neg", "s0", "s1"):
                        for a, c in t[f].items():
                            F[f][(p, a)] = c
                out.append(Structure(sig, {"V": objs, "P": params}, {}, F))
    return out


# random literal conjunctions over param(vec(2), sets) -----------------------

OBJ_VARS = [Var("x", "V"), Var("y", "V"), Var("z", "V")]
PAR_VARS = [Var("p", "P"), Var("q", "P")]


def random_object_term(rnd, depth):
    if depth == 0 or rnd.random() < 0.35:
        return rnd.choice(OBJ_VARS)
    p = rnd.choice(PAR_VARS)
    kind = rnd.choice(["plus", "plus", "zero", "neg", "s0", "s1"])
    if kind == "zero":
        return App("zero", (p,))
    if kind == "plus":
        return App("plus", (p, random_object_term(rnd, depth - 1), random_object_term(rnd, depth - 1)))
    return App(kind, (p, random_object_term(rnd, depth - 1)))


def random_literal(rnd):
    r = rnd.random()
    if r < 0.1:
        atom = Eq(*rnd.sample(PAR_VARS, 2))
    elif r < 0.2:
        atom = Eq(*rnd.sample(OBJ_VARS, 2))
    else:
        atom = Eq(random_object_term(rnd, 2), random_object_term(rnd, 2))
    return Not(atom) if rnd.random() < 0.4 else atom


def random_conjunction(seed, max_literals=3):
    rnd = random.Random(seed)
    return And(tuple(random_literal(rnd) for _ in range(rnd.randint(1, max_literals))))


# semantic equivalence ------------------------------------------------------------

def _assignments(S, variables):
    names = sorted(variables)
    for vals in product(*(S.carriers[variables[n]] for n in names)):
        yield dict(zip(names, vals))


def exists_extension(conj, S, base, extra, brute_limit=2):
    """Whether some values for `extra` make conj true under base.

    Small `extra` sets are searched exhaustively.  Larger ones use the
    defining equalities v = t in conj, which force the value of v; any
    satisfying assignment must agree with the forced one.
    """
    if len(extra) <= brute_limit:
        return any(evaluate(conj, S, dict(base, **ext)) for ext in _assignments(S, extra))
    env = dict(base)
    defs = [lit for lit in literals(conj) if isinstance(lit, Eq)]
    pending = set(extra)
    progress = True
    while pending and progress:
        progress = False
        for lit in defs:
            for v, t in ((lit.left, lit.right), (lit.right, lit.left)):
                if isinstance(v, Var) and v.name in pending and set(term_vars(t, {})) <= set(env):
                    val = evaluate_term(t, S, env)
                    if val is not None:
                        env[v.name] = val
                        pending.discard(v.name)
                        progress = True
    if pending:
        raise AssertionError("introduced variables without a defining equality: %s" % sorted(pending))
    return bool(evaluate(conj, S, env))


def flattening_mismatch(phi, flat, structures):
    """First (structure, assignment) on which phi and the flattened conjunction disagree."""
    conj = flat.conjunction()
    original = free_vars(phi)
    extra = {k: v for k, v in free_vars(conj).items() if k not in original}
    for S in structures:
        for a in _assignments(S, original):
            lhs = bool(evaluate(phi, S, a))
            rhs = exists_extension(conj, S, a, extra)
            if lhs != rhs:
                return S, a, lhs, rhs
    return None


def term_parameters(t, P, out):
    if isinstance(t, Var):
        if t.sort == P:
            out.add(t.name)
    else:
        for a in t.args:
            term_parameters(a, P, out)
    return out


def atom_parameters(lit, P):
    atom = lit.body if isinstance(lit, Not) else lit
    terms = (atom.left, atom.right) if isinstance(atom, Eq) else atom.args
    out = set()
    for t in terms:
        term_parameters(t, P, out)
    return out


def is_object_atom(lit, sig):
    atom = lit.body if isinstance(lit, Not) else lit
    terms = (atom.left, atom.right) if isinstance(atom, Eq) else atom.args
    P = sig.parameter_sort
    for t in terms:
        s = t.sort if isinstance(t, Var) else sig.function(t.symbol).result
        if s != P:
            return True
    return False


# abelian pushouts by cokernel enumeration -------------------------------------

def cyclic_pushout_oracle(m, n, d, k):
    """Z/m (+)_{Z/d} Z/n where the generator of Z/d goes to (m/d) in A and k*(n/d) in B.

    Returns (order, element-order histogram, qA, qB) with qA, qB the quotient
    maps from residues into coset labels.
    """
    a_img, b_img = m // d, (k * (n // d)) % n
    rel = set()
    x = (0, 0)
    while True:
        rel.add(x)
        x = ((x[0] + a_img) % m, (x[1] - b_img) % n)
        if x == (0, 0):
            break
    coset = {}
    for a in range(m):
        for b in range(n):
            if (a, b) in coset:
                continue
            label = len(set(coset.values()))
            for (r, s) in rel:
                coset[((a + r) % m, (b + s) % n)] = label
    order = len(set(coset.values()))
    reps = {}
    for (a, b), c in coset.items():
        reps.setdefault(c, (a, b))

    def elem_order(c):
        a, b = reps[c]
        t, cur = 1, (a, b)
        while coset[cur] != coset[(0, 0)]:
            cur = ((cur[0] + a) % m, (cur[1] + b) % n)
            t += 1
        return t

    hist = {}
    for c in reps:
        o = elem_order(c)
        hist[o] = hist.get(o, 0) + 1
    qA = {a: coset[(a, 0)] for a in range(m)}
    qB = {b: coset[(0, b)] for b in range(n)}
    add = lambda c1, c2: coset[((reps[c1][0] + reps[c2][0]) % m, (reps[c1][1] + reps[c2][1]) % n)]
    return order, hist, qA, qB, add
