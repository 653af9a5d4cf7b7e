"""Finite approximations of the generic model and witnesses extracted from them."""

import random
from dataclasses import dataclass, field
from itertools import combinations, product

from .classes import ClassError
from .formulas import evaluate
from .structures import (BudgetExceeded, Structure, evaluate_term, find_embeddings, first, format_structure,
                         generated, is_isomorphic_over)

__all__ = [
    "SaturationConfig", "SaturationResult", "saturate", "ExtensionReport", "check_extension_property", "settled_audit",
    "extension_pairs", "back_and_forth_check", "BackForthReport", "acl_duplication_check",
    "ip_witness", "IPWitness", "verify_ip_witness", "tree_witness", "TreeWitness", "verify_tree_witness",
]


@dataclass
class SaturationConfig:
    cls: object
    n: int = 2                   # generators of the extension B
    rounds: int = 1
    seed: int = 0
    carrier_cap: int = 400
    budget: int = None           # per embedding search
    max_pairs: int = None        # amalgamations per round

    def __post_init__(self):
        if self.n < 1 or self.rounds < 1:
            raise ValueError("n and rounds must be positive")

    def header(self):
        return [";; saturate class=%s n=%d rounds=%d seed=%d carrier_cap=%d"
                % (self.cls.name, self.n, self.rounds, self.seed, self.carrier_cap)]


@dataclass
class SaturationResult:
    structure: Structure
    config: SaturationConfig
    layers: list = field(default_factory=list)      # element sets after each round, start first
    deficit: list = field(default_factory=list)     # (round, reason, count)
    added: list = field(default_factory=list)       # amalgamations per round

    def core(self, lag=None):
        """Elements present `lag` rounds before the end (default: n rounds)."""
        lag = self.config.n if lag is None else lag
        i = max(0, len(self.layers) - 1 - lag)
        return self.layers[i]

    @property
    def complete(self):
        return not self.deficit

    def report_lines(self):
        out = [";; rounds: %s amalgamations, final size %d" % (self.added, len(self.structure))]
        for r, why, count in self.deficit:
            out.append(";; deficit round %d: %s (%d pairs skipped)" % (r, why, count))
        return out

    def text(self):
        return format_structure(self.structure, header=self.config.header() + self.report_lines())


def _bases(M, elems, max_gens):
    """Generated subsets of M with at most max_gens generators from elems, fewest generators first."""
    seen = {}
    pool = sorted(elems, key=M.position.get)
    for k in range(max_gens + 1):
        for S in combinations(pool, k):
            A = frozenset(generated(M, S))
            if A not in seen:
                seen[A] = k
    return sorted(seen.items(), key=lambda kv: (kv[1], sorted(M.position[x] for x in kv[0])))


def saturate(config, start):
    """Iterated free amalgamation of one-point extensions over small substructures.

    Each round looks at substructures of the previous round's output generated
    by fewer than n elements and amalgamates every unrealized one-point
    extension into the current structure.
    """
    cls = config.cls
    v = cls.contains(start)
    if not v:
        raise ClassError("start is not a member: %s" % v.reason)
    rng = random.Random(config.seed)
    M = start
    res = SaturationResult(M, config, [frozenset(M.elements)])
    for r in range(1, config.rounds + 1):
        prev = M
        bases = _bases(prev, prev.elements, config.n - 1)
        by_gens = {}
        for A, k in bases:
            by_gens.setdefault(k, []).append(A)
        order = []
        for k in sorted(by_gens):
            grp = by_gens[k]
            rng.shuffle(grp)
            order += grp
        added = 0
        skipped = 0
        for i, A in enumerate(order):
            SA = prev.induced(A)
            for B, x in cls.one_point_extensions(SA):
                if len(M) >= config.carrier_cap or (config.max_pairs is not None and added >= config.max_pairs):
                    skipped += 1
                    continue
                ident = {a: a for a in A}
                try:
                    hit = first(find_embeddings(B, M, seed=ident, budget=config.budget))
                except BudgetExceeded:
                    hit = None
                if hit is not None:
                    continue
                out = cls.free_amalgam(SA, M, B, ident, ident, check=False)
                M = out.amalgam.with_name(M.name)
                added += 1
        if skipped:
            why = "carrier cap %d reached" % config.carrier_cap if len(M) >= config.carrier_cap else "pair budget"
            res.deficit.append((r, why, skipped))
        res.added.append(added)
        res.layers.append(frozenset(M.elements))
        if not added and not skipped:
            break
    res.structure = M
    return res


# extension property audit --------------------------------------------------------

@dataclass
class ExtensionReport:
    checked: int = 0
    failures: list = field(default_factory=list)     # (A, B)
    budget: int = 0

    @property
    def clean(self):
        return not self.failures

    def lines(self):
        out = ["extension property: %d pairs, %d failures, %d budget" % (self.checked, len(self.failures), self.budget)]
        for A, B in self.failures[:5]:
            out.append(";; no extension over %s" % sorted(A))
            out.extend(format_structure(B).rstrip("\n").split("\n"))
        return out


def settled_audit(result, budget=None):
    """Audit a saturation result on bases old enough to have had every extension step.

    A base on g generators is taken from the structure n - g rounds before the end.
    """
    n = result.config.n
    return check_extension_property(result.structure, result.config.cls, n,
                                    within=lambda g: result.core(n - g), budget=budget)


def extension_pairs(cls, SA, k):
    """Extensions of SA by chains of at most k one-point steps (SA itself excluded)."""
    level = [SA]
    out = []
    for _ in range(k):
        nxt = []
        for S in level:
            for B, x in cls.one_point_extensions(S):
                nxt.append(B)
        out += nxt
        level = nxt
    return out


def check_extension_property(M, cls, n, within=None, budget=None):
    """Every pair A <= B on <= n generators with A inside `within` extends into M.

    within may also be a function from the generator count of A to the
    allowed element set.
    """
    if callable(within):
        bases = [(A, g) for g in range(n) for A, h in _bases(M, within(g), g) if h == g]
    else:
        bases = _bases(M, M.elements if within is None else within, n - 1)
    rep = ExtensionReport()
    for A, g in bases:
        SA = M.induced(A)
        ident = {a: a for a in A}
        for B in extension_pairs(cls, SA, n - g):
            rep.checked += 1
            try:
                hit = first(find_embeddings(B, M, seed=ident, budget=budget))
            except BudgetExceeded:
                rep.budget += 1
                continue
            if hit is None:
                rep.failures.append((A, B))
    return rep


# back and forth -------------------------------------------------------------------

@dataclass
class BackForthReport:
    pairs: int = 0
    skipped: int = 0
    steps: int = 0
    failures: list = field(default_factory=list)

    @property
    def clean(self):
        return not self.failures


def _partial_iso(M, xs, ys):
    if len(set(xs)) != len(set(ys)):
        return False
    fix = {}
    for x, y in zip(xs, ys):
        if fix.get(x, y) != y:
            return False
        fix[x] = y
    GA = M.induced(generated(M, xs))
    GB = M.induced(generated(M, ys))
    return is_isomorphic_over(GA, GB, fix) is not None


def back_and_forth_check(M, cls, depth, samples=20, width=6, seed=0, length=2, within=None):
    """Sampled partial isomorphisms between tuples extend forth and back for `depth` steps.

    Tuples and the points to be matched are drawn from `within` (default all
    of M); matching points are searched in all of M.
    """
    rng = random.Random(seed)
    rep = BackForthReport()
    if depth <= 0:
        return rep
    elems = sorted(M.elements if within is None else within, key=M.position.get)
    for _ in range(samples):
        k = rng.randint(1, min(length, len(elems)))
        xs, ys = tuple(rng.sample(elems, k)), tuple(rng.sample(elems, k))
        if not _partial_iso(M, xs, ys):
            rep.skipped += 1
            continue
        rep.pairs += 1
        bad = _extend(M, xs, ys, depth, rng, width, rep, elems)
        if bad is not None:
            rep.failures.append(bad)
    return rep


def _extend(M, xs, ys, depth, rng, width, rep, pool):
    if depth == 0:
        return None
    elems = M.elements
    for direction in ("forth", "back"):
        src, dst = (xs, ys) if direction == "forth" else (ys, xs)
        for c in rng.sample(pool, min(width, len(pool))):
            rep.steps += 1
            d = next((d for d in elems if _partial_iso(M, src + (c,), dst + (d,))), None)
            if d is None:
                return (direction, xs, ys, c)
            nx, ny = (xs + (c,), ys + (d,)) if direction == "forth" else (xs + (d,), ys + (c,))
            bad = _extend(M, nx, ny, depth - 1, rng, max(1, width // 2), rep, pool)
            if bad is not None:
                return bad
    return None


# algebraic closure -----------------------------------------------------------------

def acl_duplication_check(cls, D, A, a, rounds=2):
    """Distinct realizations of the type of a over <A> after repeated self-amalgams over <A>.

    Returns (count, structure).
    """
    base = frozenset(generated(D, A))
    if a in base:
        raise ClassError("%s lies in the structure generated by A" % a)
    G = D.induced(generated(D, set(base) | {a}))
    E = D.induced(base)
    ident = {e: e for e in base}
    M = G
    for _ in range(rounds):
        M = cls.free_amalgam(E, M, M, ident, ident, check=False).amalgam
    GA = G
    found = []
    for y in M.elements:
        if y in base or M.sort_of[y] != D.sort_of[a]:
            continue
        Gy = M.induced(generated(M, set(base) | {y}))
        fix = dict(ident)
        fix[a] = y
        if is_isomorphic_over(GA, Gy, fix) is not None:
            found.append(y)
    return len(found), M, found


# independence property -------------------------------------------------------------

@dataclass
class IPWitness:
    params: list
    objects: dict           # frozenset(I) -> object
    evaluations: int = 0

    def lines(self):
        out = ["ip witness: parameters %s" % " ".join(self.params)]
        for I in sorted(self.objects, key=lambda s: (len(s), sorted(s))):
            out.append("  %s -> %s" % (sorted(I), self.objects[I]))
        return out


def _holds(M, psi, xvar, pvar, x, p, env):
    a = dict(env)
    a[xvar] = x
    a[pvar] = p
    return evaluate(psi, M, a) is True


def ip_witness(M, cls, psi, k, xvar="x", pvar="p", env=None, budget=None):
    """Parameters p_0..p_{k-1} and objects a_I with psi(a_I; p_i) iff i in I.

    psi is a quantifier-free formula in the object variable xvar and the
    parameter variable pvar; env binds any further variables.  Returns None
    when no configuration exists in M.
    """
    env = dict(env or {})
    if k == 0:
        return IPWitness([], {frozenset(): None})
    P = cls.P
    params = [p for p in M.carriers[P] if p not in env.values()]
    sort = M.signature.sort_names[0] if M.signature.sort_names[0] != P else M.signature.sort_names[1]
    objs = [x for x in M.carriers[sort] if x not in env.values()]
    table = {p: {x for x in objs if _holds(M, psi, xvar, pvar, x, p, env)} for p in params}
    tried = 0
    for ps in combinations(params, k):
        tried += 1
        if budget is not None and tried > budget:
            raise BudgetExceeded("ip witness", budget)
        pattern = {}
        for x in objs:
            I = frozenset(i for i, p in enumerate(ps) if x in table[p])
            pattern.setdefault(I, x)
        if len(pattern) == 2 ** k:
            return IPWitness(list(ps), pattern)
    return None


def verify_ip_witness(M, w, psi, xvar="x", pvar="p", env=None):
    """Re-evaluate every membership; returns (ok, evaluations)."""
    env = dict(env or {})
    k = len(w.params)
    if len(w.objects) != 2 ** k or len({frozenset(I) for I in w.objects}) != 2 ** k:
        return False, 0
    count = 0
    for I, x in w.objects.items():
        for i, p in enumerate(w.params):
            count += 1
            if _holds(M, psi, xvar, pvar, x, p, env) != (i in I):
                return False, count
    w.evaluations = count
    return True, count


# tree property ----------------------------------------------------------------------

@dataclass
class TreeWitness:
    depth: int
    branching: int
    params: dict            # internal node (tuple) -> parameter
    values: dict            # non-root node (tuple) -> object
    paths: dict             # leaf (tuple) -> (x, y) realizing the path

    def lines(self):
        out = ["tree witness: depth %d branching %d" % (self.depth, self.branching)]
        for mu in sorted(self.params, key=lambda t: (len(t), t)):
            out.append("  node %s: parameter %s" % ("".join(map(str, mu)) or "root", self.params[mu]))
        for nu in sorted(self.values, key=lambda t: (len(t), t)):
            out.append("  value %s = %s" % ("".join(map(str, nu)), self.values[nu]))
        for leaf in sorted(self.paths):
            out.append("  path %s realized by %s" % ("".join(map(str, leaf)), self.paths[leaf]))
        return out


def _term_table(M, cls, term, p, objs, xvar, yvar):
    F = cls.fiber(M, p)
    out = {}
    for x in objs:
        for y in objs:
            v = evaluate_term(term, F, {xvar: x, yvar: y})
            if v is not None:
                out[(x, y)] = v
    return out


def _qualifying_term(cls, term):
    K0 = getattr(cls, "K0", None)
    if K0 is None or not K0.signature.functions:
        raise ClassError("the object language has no function symbols, so no nontrivial term exists")
    if term is None:
        raise ClassError("a binary term is required")


def tree_witness(M, cls, term, depth, branching=2, xvar="x", yvar="y", budget=None):
    """Parameters p_mu and values a_nu on the tree where each node's family
    {t_{p_mu}(x, y) = a_{mu i}} has pairwise distinct values and every
    root-to-leaf path is realized by one pair (x, y)."""
    _qualifying_term(cls, term)
    P = cls.P
    sort = cls.K0.signature.sort_names[0]
    objs = list(M.carriers[sort])
    params = list(M.carriers[P])
    if depth == 0:
        return TreeWitness(0, branching, {}, {}, {(): None})
    tables = {p: _term_table(M, cls, term, p, objs, xvar, yvar) for p in params}
    steps = [0]

    def grow(mu, pairs):
        """Assign parameters and values below node mu using only the given pairs."""
        level = len(mu)
        if level == depth:
            return {}, {}, {mu: min(pairs)}
        for p in params:
            steps[0] += 1
            if budget is not None and steps[0] > budget:
                raise BudgetExceeded("tree witness", budget)
            groups = {}
            tab = tables[p]
            for pr in pairs:
                v = tab.get(pr)
                if v is not None:
                    groups.setdefault(v, []).append(pr)
            if len(groups) < branching:
                continue
            for vals in combinations(sorted(groups, key=M.position.get), branching):
                ps, vs, paths = {mu: p}, {}, {}
                ok = True
                for i, v in enumerate(vals):
                    sub = grow(mu + (i,), groups[v])
                    if sub is None:
                        ok = False
                        break
                    ps.update(sub[0])
                    vs.update(sub[1])
                    vs[mu + (i,)] = v
                    paths.update(sub[2])
                if ok:
                    return ps, vs, paths
        return None

    got = grow((), sorted(tables[params[0]]) if params else [])
    if got is None:
        got = grow((), sorted({pr for t in tables.values() for pr in t}))
    if got is None:
        return None
    return TreeWitness(depth, branching, *got)


def verify_tree_witness(M, cls, term, w, xvar="x", yvar="y"):
    """Independent re-check: distinct child values at each node; every leaf path has a realizing pair."""
    problems = []
    sort = cls.K0.signature.sort_names[0]
    objs = list(M.carriers[sort])
    fibers = {p: cls.fiber(M, p) for p in set(w.params.values())}
    for mu, p in w.params.items():
        kids = [w.values[mu + (i,)] for i in range(w.branching)]
        if len(set(kids)) != len(kids):
            problems.append("node %s: child values coincide" % (mu,))
    for leaf in product(range(w.branching), repeat=w.depth):
        want = [(w.params[leaf[:i]], w.values[leaf[:i + 1]]) for i in range(w.depth)]
        found = None
        for x, y in product(objs, repeat=2):
            if all(evaluate_term(term, fibers[p], {xvar: x, yvar: y}) == a for p, a in want):
                found = (x, y)
                break
        if found is None:
            problems.append("path %s is not realized" % (leaf,))
    return problems
