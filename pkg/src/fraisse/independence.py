"""Independence relations on finite instances and their axioms.

a_indep: <AC> and <BC> meet exactly in <C> (algebraic independence; in the
generic limits it coincides with Kim-independence).
gamma_indep: <AB> is canonically the free amalgam over C.
m_indep: algebraic independence over every intermediate base inside <BC>
(in the generic limits it coincides with forking independence).
"""

import random
from dataclasses import dataclass, field
from itertools import combinations, product

from .classes import ClassError, Graphs, RelationalClass, VectorSpaces, _combo_name, as_mapping
from .combinators import CubeInput, three_amalgamation
from .structures import (Morphism, Structure, StructureError, find_embeddings, find_morphisms, first,
                         format_structure, generated, is_isomorphic_over)

__all__ = [
    "IndepQuery", "IndepResult", "a_indep", "gamma_indep", "m_indep", "m_indep_oracle", "all_intermediates",
    "full_existence_witness", "FullExistence", "ITConfig", "ITWitness",
    "independence_theorem_witness", "independence_configurations", "cube_configurations", "search_it_witness",
    "axiom_suite", "SuiteReport", "generated_subsets", "random_member", "check_it_witness", "read_it_config", "labelled_members",
]


@dataclass
class IndepQuery:
    ambient: Structure
    A: frozenset
    B: frozenset
    C: frozenset = frozenset()

    def __post_init__(self):
        self.A, self.B, self.C = frozenset(self.A), frozenset(self.B), frozenset(self.C)
        missing = (self.A | self.B | self.C) - set(self.ambient.sort_of)
        if missing:
            raise ClassError("elements not in the ambient: %s" % ", ".join(sorted(missing)))


@dataclass
class IndepResult:
    value: bool
    witness: object = None
    verdict: str = ""
    label: str = ""

    def __bool__(self):
        return self.value

    def __post_init__(self):
        if not self.verdict:
            self.verdict = "true" if self.value else "false"


def _gen(q, *parts):
    return frozenset(generated(q.ambient, set().union(*parts)))


def a_indep(q):
    AC, BC, C = _gen(q, q.A, q.C), _gen(q, q.B, q.C), _gen(q, q.C)
    extra = (AC & BC) - C
    if extra:
        x = min(extra, key=q.ambient.position.get)
        return IndepResult(False, x, label="algebraic (Kim)")
    return IndepResult(True, label="algebraic (Kim)")


def gamma_indep(cls, q):
    """True iff the canonical map from <AC> (+)_<C> <BC> to the ambient is an embedding."""
    M = q.ambient
    A, B, C = _gen(q, q.A, q.C), _gen(q, q.B, q.C), _gen(q, q.C)
    if not C <= A or not C <= B:
        raise ClassError("base must lie in both sides")
    SA, SB, SC = M.induced(A), M.induced(B), M.induced(C)
    ident = {c: c for c in C}
    res = cls.free_amalgam(SC, SA, SB, ident, ident, check=False)
    seed = {}
    for x in A:
        seed[res.into_A(x)] = x
    for y in B:
        seed[res.into_B(y)] = y
    h = first(find_morphisms(res.amalgam, M, seed=seed))
    if h is None:
        return IndepResult(False, ("no canonical map",), label="free")
    inv = {}
    for d, m in h.mapping.items():
        if m in inv:
            return IndepResult(False, ("collapse", inv[m], d, m), label="free")
        inv[m] = d
    bad = h.problems(as_embedding=True)
    if bad:
        return IndepResult(False, ("not reflected", bad[0]), label="free")
    return IndepResult(True, label="free")


def _intermediates(M, low, high, bound=None):
    """Generated sets C' with low <= C' <= high, found by adding one element at a time.

    Returns (list, complete) where complete says the bound did not cut the sweep.
    """
    low = frozenset(generated(M, low))
    seen = {low}
    frontier = [low]
    depth = 0
    complete = True
    while frontier:
        if bound is not None and depth >= bound:
            complete = all(S == high for S in frontier) or not any(
                frozenset(generated(M, S | {x})) not in seen for S in frontier for x in high - S)
            break
        nxt = []
        for S in frontier:
            for x in sorted(high - S, key=M.position.get):
                T = frozenset(generated(M, S | {x}))
                if T not in seen:
                    seen.add(T)
                    nxt.append(T)
        frontier = nxt
        depth += 1
    return sorted(seen, key=lambda S: (len(S), sorted(M.position[x] for x in S))), complete


def all_intermediates(M, low, high):
    """Every closed subset between <low> and high, by plain subset enumeration."""
    low = frozenset(generated(M, low))
    rest = sorted(high - low, key=M.position.get)
    out = []
    for k in range(len(rest) + 1):
        for extra in combinations(rest, k):
            S = low | set(extra)
            if frozenset(generated(M, S)) == S:
                out.append(frozenset(S))
    return out


def m_indep(q, generator_bound=None):
    """Algebraic independence over every intermediate C <= C' <= <BC>.

    With a generator bound the sweep may be cut; a positive answer is then
    reported as "true-up-to-bound".
    """
    M = q.ambient
    BC = _gen(q, q.B, q.C)
    mids, complete = _intermediates(M, q.C, BC, generator_bound)
    for Cp in mids:
        r = a_indep(IndepQuery(M, q.A | Cp, BC, Cp))
        if not r:
            return IndepResult(False, (sorted(Cp, key=M.position.get), r.witness), label="M (forking)")
    return IndepResult(True, verdict="true" if complete else "true-up-to-bound", label="M (forking)")


def m_indep_oracle(q):
    """m_indep over all intermediate subsets, enumerated directly."""
    M = q.ambient
    BC = _gen(q, q.B, q.C)
    for Cp in all_intermediates(M, q.C, BC):
        AC = frozenset(generated(M, q.A | Cp))
        if (AC & BC) - Cp:
            return False
    return True


# full existence -----------------------------------------------------------------

@dataclass
class FullExistence:
    ambient: Structure
    A_prime: frozenset
    B_image: frozenset
    E_image: frozenset
    iso: dict                    # A -> A'
    into_B: dict                 # B -> ambient


def full_existence_witness(cls, E, A, B, jA=None, jB=None):
    """A copy A' of A over E with A' free from B over E, inside a fresh ambient."""
    jA = as_mapping(jA) if jA is not None else {e: e for e in E.elements}
    jB = as_mapping(jB) if jB is not None else {e: e for e in E.elements}
    res = cls.free_amalgam(E, A, B, jA, jB)
    D = res.amalgam
    return FullExistence(D, frozenset(res.into_A.image()), frozenset(res.into_B.image()),
                         frozenset(res.into_A(jA[e]) for e in E.elements),
                         dict(res.into_A.mapping), dict(res.into_B.mapping))


# independence theorem -------------------------------------------------------------

@dataclass
class ITConfig:
    """Two independent pairs (A_i, B_i) over E and an independent pair (B0, B1).

    D0 contains A0 and B0, D1 contains A1 and B1, DB contains B0 and B1, with
    element names of B0, B1 and E shared between the structures.  iso maps A0
    onto A1 fixing E.
    """
    E: frozenset
    D0: Structure
    A0: frozenset
    B0: frozenset
    D1: Structure
    A1: frozenset
    B1: frozenset
    DB: Structure
    iso: dict

    def cube(self):
        E, iso = self.E, self.iso
        ident = lambda S: {x: x for x in S}
        Es = self.D0.induced(E)
        As = self.D0.induced(self.A0)
        B0s = self.D0.induced(self.B0)
        B1s = self.D1.induced(self.B1)
        D0s = self.D0.induced(generated(self.D0, self.A0 | self.B0))
        D1s = self.D1.induced(generated(self.D1, self.A1 | self.B1))
        Bs = self.DB.induced(generated(self.DB, self.B0 | self.B1))
        return CubeInput(Es, As, B0s, B1s, D0s, D1s, Bs,
                         ident(E), ident(E), ident(E), ident(self.A0), {a: iso[a] for a in self.A0},
                         ident(self.B0), ident(self.B1), ident(self.B0), ident(self.B1))

    def problems(self):
        out = []
        for tag, D, X, Y in (("D0", self.D0, self.A0, self.B0), ("D1", self.D1, self.A1, self.B1),
                             ("DB", self.DB, self.B0, self.B1)):
            r = a_indep(IndepQuery(D, X, Y, self.E))
            if not r:
                out.append("%s: sides not algebraically independent over E (%s)" % (tag, r.witness))
        return out


@dataclass
class ITWitness:
    status: str                 # found | none | unsupported
    D: Structure = None
    A: frozenset = None
    maps: tuple = None          # (D0 -> D, D1 -> D, B -> D)
    reason: str = ""
    config: ITConfig = None

    @property
    def found(self):
        return self.status == "found"


def independence_theorem_witness(cls, cfg):
    bad = cfg.problems()
    if bad:
        raise ClassError("precondition violated: %s" % bad[0])
    cube = cfg.cube()
    bad = cube.problems()
    if bad:
        raise ClassError("configuration is not a valid cube: %s" % bad[0])
    if not (cfg.A0 - cfg.E):
        D = cube.B
        return ITWitness("found", D, frozenset(cfg.E), ({x: x for x in cfg.E}, {}, {y: y for y in D.elements}),
                         "degenerate: A = E", cfg)
    res = three_amalgamation(cls, cube)
    if res.status == "unsupported":
        return ITWitness("unsupported", reason=res.reason, config=cfg)
    if not res.ok:
        return ITWitness("none", res.D, reason=res.reason, config=cfg)
    A = frozenset(res.d0[cube.a0[a]] for a in cube.A.elements)
    return ITWitness("found", res.D, A, (res.d0, res.d1, res.b), config=cfg)


def check_it_witness(cls, w):
    """Independent re-check of a witness: A realizes both types and is free of <B0 B1> over E."""
    cfg, D = w.config, w.D
    d0, d1, b = w.maps
    out = []
    v = cls.contains(D)
    if not v:
        out.append("witness ambient is not a member")
    Bimg = frozenset(b[y] for y in generated(cfg.DB, cfg.B0 | cfg.B1))
    Eimg = frozenset(b[e] for e in cfg.E)
    r = a_indep(IndepQuery(D, w.A, Bimg, Eimg))
    if not r:
        out.append("A is not independent from B0 B1 over E (%s)" % (r.witness,))
    for tag, DS, AX, BX, m in (("0", cfg.D0, cfg.A0, cfg.B0, d0), ("1", cfg.D1, cfg.A1, cfg.B1, d1)):
        src = DS.induced(generated(DS, AX | BX))
        h = Morphism(src, D, {x: m[x] for x in src.elements}, True)
        if h.problems():
            out.append("type over B%s not realized: %s" % (tag, h.problems()[0]))
        for y in BX:
            if m[y] != b[y]:
                out.append("B%s is moved" % tag)
    return out


def search_it_witness(cls, cfg, extra=1):
    """Brute force: a member on <B0 B1> plus |A0 \\ E| new points realizing both types.

    Relational one-sorted classes only (used as an independent oracle).
    """
    DB = cfg.DB.induced(generated(cfg.DB, cfg.B0 | cfg.B1))
    newA = sorted(cfg.A0 - cfg.E, key=cfg.D0.position.get)
    names = {a: "A:" + a for a in newA}
    elems = list(DB.elements) + [names[a] for a in newA]
    for S in labelled_members(cls, elems):
        if S.induced(DB.elements).key() != DB.key():
            continue
        ok = True
        for DS, AX, BX, rename in ((cfg.D0, cfg.A0, cfg.B0, dict(names)),
                                   (cfg.D1, cfg.A1, cfg.B1, {cfg.iso[a]: names[a] for a in newA})):
            src = DS.induced(AX | BX)
            m = {x: rename.get(x, x) for x in src.elements}
            if Morphism(src, S, m, True).problems():
                ok = False
                break
        if ok:
            Aset = frozenset(cfg.E) | frozenset(names.values())
            if a_indep(IndepQuery(S, Aset, frozenset(DB.elements), cfg.E)):
                return S
    return None


def labelled_members(cls, names):
    """Members of a relational class with exactly the given element names."""
    from itertools import permutations
    seen = set()
    out = []
    for F in cls.members(len(names)):
        if len(F) != len(names):
            continue
        for perm in permutations(names):
            G = F.rename(dict(zip(F.elements, perm)))
            k = G.key()
            if k not in seen:
                seen.add(k)
                out.append(G)
    return out


def independence_configurations(cls, max_component=2):
    """All independence-theorem configurations with components of at most max_component elements.

    Supported: relational one-sorted classes and vector spaces.
    """
    if isinstance(cls, VectorSpaces):
        return list(_vec_configurations(cls, max_component))
    if isinstance(cls, RelationalClass) and len(cls.signature.sorts) == 1:
        return list(_relational_configurations(cls, max_component))
    raise ClassError("no configuration enumerator for %s" % cls.name)


def _relational_configurations(cls, k, dedup=True):
    for ne in range(k + 1):
        E = ["e%d" % i for i in range(ne)]
        for na, nb0, nb1 in product(range(k - ne + 1), repeat=3):
            A0 = E + ["a%d" % i for i in range(na)]
            A1 = E + ["a%d'" % i for i in range(na)]
            B0 = E + ["b%d" % i for i in range(nb0)]
            B1 = E + ["c%d" % i for i in range(nb1)]
            iso = {x: y for x, y in zip(A0, A1)}
            perms = _block_renamings(ne, na, nb0, nb1) if dedup else [{}]
            seen = set()
            D0s = labelled_members(cls, _uniq(A0 + B0))
            D1s = labelled_members(cls, _uniq(A1 + B1))
            DBs = labelled_members(cls, _uniq(B0 + B1))
            for D0 in D0s:
                for D1 in D1s:
                    if D1.induced(A1).rename({v: u for u, v in iso.items()}).key() != D0.induced(A0).key():
                        continue
                    for DB in DBs:
                        if DB.induced(B0).key() != D0.induced(B0).key():
                            continue
                        if DB.induced(B1).key() != D1.induced(B1).key():
                            continue
                        if dedup:
                            form = _config_form(D0, D1, DB, perms)
                            if form in seen:
                                continue
                            seen.add(form)
                        yield ITConfig(frozenset(E), D0, frozenset(A0), frozenset(B0),
                                       D1, frozenset(A1), frozenset(B1), DB, iso)


def _block_renamings(ne, na, nb0, nb1):
    """Renamings permuting the e, a (with a'), b and c names among themselves."""
    from itertools import permutations
    out = []
    for pe in permutations(range(ne)):
        for pa in permutations(range(na)):
            for pb in permutations(range(nb0)):
                for pc in permutations(range(nb1)):
                    m = {}
                    m.update({"e%d" % i: "e%d" % j for i, j in enumerate(pe)})
                    m.update({"a%d" % i: "a%d" % j for i, j in enumerate(pa)})
                    m.update({"a%d'" % i: "a%d'" % j for i, j in enumerate(pa)})
                    m.update({"b%d" % i: "b%d" % j for i, j in enumerate(pb)})
                    m.update({"c%d" % i: "c%d" % j for i, j in enumerate(pc)})
                    out.append(m)
    return out


def _config_form(D0, D1, DB, perms):
    """Smallest relation listing of the three structures over the block renamings."""
    tuples = [(tag, r, t) for tag, S in (("0", D0), ("1", D1), ("B", DB))
              for r, ts in S.relations.items() for t in ts]
    return min(tuple(sorted((tag, r, tuple(m.get(x, x) for x in t)) for tag, r, t in tuples))
               for m in perms)


def _uniq(xs):
    out = []
    for x in xs:
        if x not in out:
            out.append(x)
    return out


def _vec_configurations(cls, k):
    """E = 0; A, B0, B1 of dimension <= 1 (size <= k = 2), in general position."""
    dmax = 1 if k < cls.q ** 2 else 2
    for da, db0, db1 in product(range(dmax + 1), repeat=3):
        an = ["a%d" % i for i in range(da)]
        an1 = ["a%d'" % i for i in range(da)]
        b0 = ["b%d" % i for i in range(db0)]
        b1 = ["c%d" % i for i in range(db1)]
        D0 = cls.space(an + b0)
        D1 = cls.space(an1 + b1)
        DB = cls.space(b0 + b1)
        A0 = frozenset(generated(D0, an))
        A1 = frozenset(generated(D1, an1))
        B0 = frozenset(generated(D0, b0))
        B1 = frozenset(generated(D1, b1))
        iso = {_combo_name(c, an): _combo_name(c, an1) for c in product(range(cls.q), repeat=da)}
        E = frozenset(generated(D0, []))
        yield ITConfig(E, D0, A0, B0, D1, A1, B1, DB, iso)


def cube_configurations(cls, max_component=2):
    """Condition-5 cubes built from the independence-theorem configurations.

    For a generic predicate or generic substructure over a supported base,
    every interpretation of the new symbol on the three top structures is
    tried and the valid cubes kept.
    """
    from .combinators import GenericPredicate, GenericSubstructure
    if isinstance(cls, (GenericPredicate, GenericSubstructure)):
        if isinstance(cls, GenericPredicate) and cls.arity != 1:
            raise ClassError("cube enumeration handles unary predicates only")
        out = []
        for cfg in independence_configurations(cls.base, max_component):
            c = cfg.cube()
            options = [_interpretations(cls, S) for S in (c.D0, c.D1, c.B)]
            for D0, D1, B in product(*options):
                cube = CubeInput(D0.induced(c.E.elements), D0.induced(c.A.elements), D0.induced(c.B0.elements),
                                 D1.induced(c.B1.elements), D0, D1, B,
                                 c.eA, c.eB0, c.eB1, c.a0, c.a1, c.b0, c.b1, c.c0, c.c1)
                if not cube.problems():
                    out.append(cube)
        return out
    return [cfg.cube() for cfg in independence_configurations(cls, max_component)]


def _interpretations(cls, S):
    from .combinators import GenericSubstructure
    elems = S.carriers[cls.sort]
    if isinstance(cls, GenericSubstructure):
        subs = {frozenset(generated(S, gens)) for k in range(len(elems) + 1) for gens in combinations(elems, k)}
    else:
        subs = {frozenset(c) for k in range(len(elems) + 1) for c in combinations(elems, k)}
    subs = sorted(subs, key=lambda R: (len(R), sorted(S.position[x] for x in R)))
    return [cls.lift(S, {cls.symbol: {(x,) for x in R}}) for R in subs]


# the axiom suite -----------------------------------------------------------------

def generated_subsets(M, limit=None):
    seen = set()
    out = []
    elems = M.elements
    for k in range(len(elems) + 1):
        for S in combinations(elems, k):
            g = frozenset(generated(M, S))
            if g not in seen:
                seen.add(g)
                out.append(g)
                if limit is not None and len(out) > limit:
                    return out
    return out


def random_member(cls, rng, size):
    """A random member of roughly the given size (graphs, sets, vector spaces, plain equivalences)."""
    if isinstance(cls, Graphs):
        vs = ["v%d" % i for i in range(size)]
        return cls.make(vs, [(a, b) for a, b in combinations(vs, 2) if rng.random() < 0.5])
    if isinstance(cls, VectorSpaces):
        d = 0
        while cls.q ** (d + 1) <= size:
            d += 1
        return cls.space(["u%d" % i for i in range(d)])
    if hasattr(cls, "make") and cls.name == "sets":
        return cls.make(["s%d" % i for i in range(size)])
    if hasattr(cls, "classes_of"):
        blocks, xs = [], ["s%d" % i for i in range(size)]
        for x in xs:
            if blocks and rng.random() < 0.5:
                rng.choice(blocks).append(x)
            else:
                blocks.append([x])
        return cls.make(blocks)
    pool = cls.members(size)
    return rng.choice(pool)


def random_generated(M, rng, within=None, base=frozenset()):
    pool = sorted(within if within is not None else M.elements, key=M.position.get)
    k = rng.randint(0, min(3, len(pool)))
    return frozenset(generated(M, set(rng.sample(pool, k)) | set(base)))


AXIOMS = ("symmetry", "monotonicity", "base_monotonicity", "transitivity", "stationarity",
          "existence", "finite_character", "free_implies_algebraic", "independence_theorem")


@dataclass
class SuiteReport:
    klass: str
    counts: dict = field(default_factory=lambda: {a: [0, 0, 0] for a in AXIOMS})   # pass, fail, budget
    counterexamples: dict = field(default_factory=dict)
    configurations: int = 0
    random_cases: int = 0

    def record(self, axiom, ok, example=None):
        c = self.counts[axiom]
        if ok is None:
            c[2] += 1
        elif ok:
            c[0] += 1
        else:
            c[1] += 1
            self.counterexamples.setdefault(axiom, example)

    def merge(self, other):
        for a, c in other.counts.items():
            mine = self.counts[a]
            for i in range(3):
                mine[i] += c[i]
        for a, ex in other.counterexamples.items():
            self.counterexamples.setdefault(a, ex)
        self.configurations += other.configurations
        self.random_cases += other.random_cases

    @property
    def failures(self):
        return sum(c[1] for c in self.counts.values())

    @property
    def ok(self):
        return self.failures == 0

    def lines(self):
        out = ["suite %s: %d configurations, %d random" % (self.klass, self.configurations, self.random_cases)]
        for a in AXIOMS:
            p, f, b = self.counts[a]
            if p or f or b:
                out.append("%-24s pass=%d fail=%d budget=%d" % (a, p, f, b))
        return out

    def summary_block(self):
        out = ["(summary"]
        for a in AXIOMS:
            p, f, b = self.counts[a]
            if p or f or b:
                out.append("  (%s %d %d %d)" % (a, p, f, b))
        out.append(")")
        for a, ex in self.counterexamples.items():
            out.append(";; counterexample for %s" % a)
            out.extend(_show_example(ex))
        return out


def read_it_config(text, resolver):
    """Inverse of the counterexample block printed for the independence theorem."""
    import ast
    import re
    from .structures import parse_structure
    sets_, iso, chunks, tag = {}, None, {}, None
    for line in text.splitlines():
        if line.startswith(";; E = "):
            for name, val in re.findall(r"(\w+) = (\[[^\]]*\])", line):
                sets_[name] = frozenset(ast.literal_eval(val))
            tag = None
        elif line.startswith(";; iso = "):
            iso = dict(ast.literal_eval(line[len(";; iso = "):]))
            tag = None
        elif line.strip() in (";; D0", ";; D1", ";; DB"):
            tag = line.strip()[3:]
            chunks[tag] = []
        elif line.startswith(";;") or line.startswith("(summary"):
            tag = None
        elif tag is not None:
            chunks[tag].append(line)
    missing = [k for k in ("E", "A0", "B0", "A1", "B1") if k not in sets_]
    missing += [k for k in ("D0", "D1", "DB") if k not in chunks]
    if missing or iso is None:
        raise StructureError("not an independence-theorem block (missing %s)" % ", ".join(missing or ["iso"]))
    D = {k: parse_structure("\n".join(v), resolver=resolver) for k, v in chunks.items()}
    return ITConfig(sets_["E"], D["D0"], sets_["A0"], sets_["B0"], D["D1"], sets_["A1"], sets_["B1"],
                    D["DB"], iso)


def _show_example(ex):
    if isinstance(ex, ITConfig):
        lines = [";; E = %s, A0 = %s, B0 = %s, A1 = %s, B1 = %s" % tuple(
            sorted(s) for s in (ex.E, ex.A0, ex.B0, ex.A1, ex.B1))]
        lines.append(";; iso = %s" % sorted(ex.iso.items()))
        for tag, S in (("D0", ex.D0), ("D1", ex.D1), ("DB", ex.DB)):
            lines.append(";; %s" % tag)
            lines.extend(format_structure(S).rstrip("\n").split("\n"))
        return lines
    if isinstance(ex, tuple) and ex and isinstance(ex[0], Structure):
        M = ex[0]
        lines = [";; sets: %s" % " ".join(str(sorted(s)) for s in ex[1:])]
        lines.extend(format_structure(M).rstrip("\n").split("\n"))
        return lines
    return [";; %r" % (ex,)]


class _Ambient:
    """Cached relation values on one ambient."""

    def __init__(self, cls, M):
        self.cls, self.M = cls, M
        self.cache = {}
        self.subs = generated_subsets(M)
        self.bottom = frozenset(generated(M, ()))

    def gamma(self, A, B, C):
        key = (A, B, C)
        got = self.cache.get(key)
        if got is None:
            got = bool(gamma_indep(self.cls, IndepQuery(self.M, A, B, C)))
            self.cache[key] = got
        return got

    def gen(self, *parts):
        return frozenset(generated(self.M, set().union(*parts)))


def _ambient_part(job):
    cls, M, budget = job
    rep = SuiteReport(cls.name)
    amb = _Ambient(cls, M)
    n = 0
    for C in amb.subs:
        for A in amb.subs:
            if not C <= A:
                continue
            for B in amb.subs:
                if not C <= B:
                    continue
                n += 1
                if budget is not None and n > budget:
                    rep.record("symmetry", None)
                    continue
                rep.configurations += 1
                _check_triple(amb, rep, A, B, C)
    return rep


def _check_triple(amb, rep, A, B, C, stationarity=True):
    M = amb.M
    ex = (M, A, B, C)
    g = amb.gamma(A, B, C)
    rep.record("symmetry", g == amb.gamma(B, A, C), ex)
    rep.record("existence", amb.gamma(A, C, C), (M, A, C))
    a = bool(a_indep(IndepQuery(M, A, B, C)))
    rep.record("free_implies_algebraic", (not g) or a, ex)
    if g:
        for Bp in amb.subs:
            if C <= Bp <= B and Bp != B:
                rep.record("monotonicity", amb.gamma(A, Bp, C), (M, A, Bp, C))
        for Cp in amb.subs:
            if C <= Cp <= B and Cp != C:
                rep.record("base_monotonicity", amb.gamma(amb.gen(A, Cp), B, Cp), (M, A, B, Cp))
        if stationarity:
            _stationarity(amb, rep, A, B, C)
    else:
        rep.record("finite_character", _localizes(amb, A, B, C), ex)
    # transitivity: A free from C' over C and <AC'> free from B over C' give A free from B over C
    for Cp in amb.subs:
        if C <= Cp <= B and Cp != C and Cp != B:
            if amb.gamma(A, Cp, C) and amb.gamma(amb.gen(A, Cp), B, Cp):
                rep.record("transitivity", g, (M, A, B, C, Cp))


def _localizes(amb, A, B, C, k=2):
    """A failure of freeness is already visible on sets generated over C by <= k points."""
    M = amb.M
    pa = sorted(A - C, key=M.position.get)
    pb = sorted(B - C, key=M.position.get)
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            for xa in combinations(pa, min(i, len(pa))):
                for xb in combinations(pb, min(j, len(pb))):
                    if not amb.gamma(amb.gen(C, xa), amb.gen(C, xb), C):
                        return True
    return not pa or not pb


def _stationarity(amb, rep, A1, B, E, limit=8):
    M = amb.M
    SA1 = M.induced(A1)
    checked = 0
    for A2 in amb.subs:
        if A2 == A1 or len(A2) != len(A1) or not E <= A2 or not amb.gamma(A2, B, E):
            continue
        SA2 = M.induced(A2)
        for iso in find_embeddings(SA1, SA2, seed={e: e for e in E}):
            seed = dict(iso.mapping)
            seed.update({y: y for y in B})
            G1 = M.induced(amb.gen(A1, B))
            G2 = M.induced(amb.gen(A2, B))
            if any(seed.get(y, y) != y for y in B):
                continue
            ok = is_isomorphic_over(G1, G2, seed) is not None
            rep.record("stationarity", ok, (M, A1, A2, B, E))
            checked += 1
            if checked >= limit:
                return


def axiom_suite(cls, max_size=4, random_cases=0, seed=0, ambients=None, it_configs=None,
                random_size=6, budget=None, workers=None):
    """Check the axioms of free independence on exhaustive and random configurations.

    budget caps the number of exhaustive triples per ambient (extra triples are
    recorded as budget verdicts under symmetry).  With workers > 1 the ambients
    are checked in separate processes; merging is order-insensitive except for
    which counterexample is kept first.
    """
    rep = SuiteReport(cls.name)
    ambients = cls.members(max_size) if ambients is None else ambients
    if workers and workers > 1 and len(ambients) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_ambient_part, [(cls, M, budget) for M in ambients]))
    else:
        parts = [_ambient_part((cls, M, budget)) for M in ambients]
    for part in parts:
        rep.merge(part)
    rng = random.Random(seed)
    for _ in range(random_cases):
        M = random_member(cls, rng, rng.randint(2, random_size))
        amb = _Ambient(cls, M)
        C = random_generated(M, rng, within=None)
        C = amb.gen(rng.sample(sorted(C), min(len(C), rng.randint(0, 1))))
        A = random_generated(M, rng, base=C)
        B = random_generated(M, rng, base=C)
        rep.random_cases += 1
        _check_triple(amb, rep, A, B, C)
    for cfg in it_configs or ():
        w = independence_theorem_witness(cls, cfg)
        if w.status == "unsupported":
            rep.record("independence_theorem", None, cfg)
        else:
            rep.record("independence_theorem", w.found, cfg)
    return rep
