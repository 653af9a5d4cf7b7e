"""Executable Fraisse classes: membership, free amalgams, generic elements.

A ClassHandle bundles the operations a construction needs from a class.
Members may be partial: for classes with function symbols, elements that
occur in no table entry are "free" (no operation has been applied to them
yet) and every table is total on the remaining core.
"""

from dataclasses import dataclass, field
from itertools import combinations, product

from .formulas import And, Eq, Not, Rel, evaluate
from .presentation import Presentation, abelian_signature
from .signature import FunctionSymbol, RelationSymbol, Signature, Sort
from .structures import (App, BudgetExceeded, Morphism, Structure, StructureError, Var,
                         canonical_key, find_embeddings, first, fresh_name, generated,
                         generated_substructure, is_isomorphic_over)

__all__ = [
    "Verdict", "AmalgamResult", "ClassError", "ClassHandle",
    "Sets", "Graphs", "VectorSpaces", "AbelianGroups", "EquivalenceRelations",
    "sets", "graphs", "vector_spaces", "abelian_groups", "equivalence_relations",
    "verify_pushout", "PushoutReport", "check_feuvrier", "FeuvrierReport",
    "check_generic_element", "as_mapping", "dedup_iso", "core_elements",
]


class ClassError(ValueError):
    pass


@dataclass
class Verdict:
    ok: bool
    reason: str = ""
    witness: object = None

    def __bool__(self):
        return self.ok


@dataclass
class AmalgamResult:
    amalgam: Structure
    into_A: Morphism
    into_B: Morphism
    base: Structure = None
    notes: list = field(default_factory=list)

    def new_elements(self):
        img = self.into_A.image() | self.into_B.image()
        return [x for x in self.amalgam.elements if x not in img]

    def problems(self):
        out = []
        for tag, h in (("i_A", self.into_A), ("i_B", self.into_B)):
            out += ["%s: %s" % (tag, p) for p in h.problems(as_embedding=True)]
        if self.base is not None and self.base_maps is not None:
            jA, jB = self.base_maps
            for e in self.base.elements:
                if self.into_A(jA[e]) != self.into_B(jB[e]):
                    out.append("images of %s differ" % e)
            common = self.into_A.image() & self.into_B.image()
            expect = {self.into_A(jA[e]) for e in self.base.elements}
            if common != expect:
                out.append("images meet in %s, expected %s" % (sorted(common), sorted(expect)))
        gen = generated(self.amalgam, self.into_A.image() | self.into_B.image())
        if len(gen) != len(self.amalgam):
            out.append("amalgam not generated by the images")
        return out

    base_maps: tuple = None


def as_mapping(j):
    if j is None:
        return None
    if isinstance(j, Morphism):
        return dict(j.mapping)
    return dict(j)


def core_elements(S):
    """Elements touched by some function entry, plus constant values."""
    core = set()
    for tab in S.functions.values():
        for args, v in tab.items():
            core.update(args)
            core.add(v)
    return core


def dedup_iso(structures, limit=50000):
    out, seen = [], set()
    for S in structures:
        k = canonical_key(S, limit)
        if k not in seen:
            seen.add(k)
            out.append(S)
    return out


class ClassHandle:
    name = "class"
    locally_finite = True
    condition5_trusted = False
    provenance = ""

    def __init__(self, signature):
        self.signature = signature

    def __repr__(self):
        return "<class %s>" % self.name

    # membership -------------------------------------------------------------

    @property
    def forbidden(self):
        return []

    def contains(self, S):
        raise NotImplementedError

    def _sig_check(self, S):
        if S.signature != self.signature:
            return Verdict(False, "wrong signature")
        return None

    # constants and the base of amalgams ---------------------------------------

    def constants_structure(self):
        return Structure(self.signature, {}, name=self.name)

    def check_embedding(self, j, E, A, what):
        h = Morphism(E, A, j, True)
        bad = h.problems()
        if bad:
            raise ClassError("%s is not an embedding: %s" % (what, bad[0]))

    def normalize_base(self, E, A, B, jA, jB):
        """Enlarge E to contain the constant-generated part of A and B."""
        if not self.signature.constants:
            return E, jA, jB
        gA = generated(A, {jA[e] for e in E.elements})
        if len(gA) == len(E) and all(A.value(c.name, ()) in set(jA.values()) for c in self.signature.constants
                                     if A.value(c.name, ()) is not None):
            return E, jA, jB
        EA = A.induced(gA)
        gB = generated(B, {jB[e] for e in E.elements})
        EB = B.induced(gB)
        inv = {v: k for k, v in jA.items()}
        seed = {jA[e]: jB[e] for e in E.elements}
        iso = is_isomorphic_over(EA, EB, seed)
        if iso is None:
            raise ClassError("the constant-generated parts of the two sides disagree")
        del inv
        return EA, {x: x for x in EA.elements}, dict(iso.mapping)

    # amalgamation ----------------------------------------------------------

    def free_amalgam(self, E, A, B, jA, jB, check=True):
        jA, jB = as_mapping(jA), as_mapping(jB)
        if check:
            for S, tag in ((A, "A"), (B, "B")):
                v = self.contains(S)
                if not v:
                    raise ClassError("%s is not a member of %s: %s" % (tag, self.name, v.reason))
            self.check_embedding(jA, E, A, "j_A")
            self.check_embedding(jB, E, B, "j_B")
        E, jA, jB = self.normalize_base(E, A, B, jA, jB)
        res = self._amalgam(E, A, B, jA, jB)
        res.base = E
        res.base_maps = (jA, jB)
        return res

    def _amalgam(self, E, A, B, jA, jB):
        raise NotImplementedError

    def generic_element(self, sort, A):
        """A together with a new element x of the given sort, freely."""
        return self.free_element(sort, A)

    def free_element(self, sort, A, base="x"):
        """A plus an element on which nothing is defined."""
        self.signature.sort(sort)
        x = fresh_name(base, set(A.sort_of))
        carriers = {s: list(v) for s, v in A.carriers.items()}
        carriers[sort].append(x)
        return Structure(A.signature, carriers, A.relations, A.functions, name=A.name, check=False), x

    def one_point_extensions(self, A):
        """Catalogue of (B, x): B generated by A and one new element x."""
        return [self.generic_element(s, A) for s in self.signature.sort_names]

    def one_point_extension(self, A, description, env, var):
        """Extension realizing description(var; env) over A, or None (refusal)."""
        for B, x in self.one_point_extensions(A):
            full = dict(env)
            full[var.name] = x
            if var.sort == B.sort_of[x] and evaluate(description, B, full) is True:
                return B, x
        return None

    def members(self, max_size):
        raise NotImplementedError

    def complete_cube(self, cube):
        from .combinators import default_cube
        return default_cube(self, cube)

    # helpers shared by table-backed classes ------------------------------------

    def glue(self, E, A, B, jA, jB):
        """Carriers of A and B glued along E; returns (carriers, iA, iB, used)."""
        iA = {x: x for x in A.elements}
        used = set(A.sort_of)
        back = {jB[e]: jA[e] for e in E.elements}
        iB = {}
        carriers = {s: list(v) for s, v in A.carriers.items()}
        for s in self.signature.sort_names:
            for y in B.carriers[s]:
                if y in back:
                    iB[y] = back[y]
                else:
                    z = fresh_name(y, used)
                    used.add(z)
                    iB[y] = z
                    carriers[s].append(z)
        return carriers, iA, iB, used

    def result(self, D, A, B, iA, iB, notes=None):
        return AmalgamResult(D, Morphism(A, D, iA, True), Morphism(B, D, iB, True), notes=notes or [])


# relational classes ------------------------------------------------------------

class RelationalClass(ClassHandle):
    def _amalgam(self, E, A, B, jA, jB):
        carriers, iA, iB, _ = self.glue(E, A, B, jA, jB)
        rels = {r: set(A.relations[r]) | {tuple(iB[x] for x in t) for t in B.relations[r]}
                for r in A.relations}
        rels = self.close_relations(carriers, rels)
        D = Structure(self.signature, carriers, rels, {}, name=self.name, check=False)
        return self.result(D, A, B, iA, iB)

    def close_relations(self, carriers, rels):
        return rels


class Sets(RelationalClass):
    condition5_trusted = True
    provenance = "feuvrier: disjointness is the only constraint"

    def __init__(self, sort="S"):
        super().__init__(Signature([Sort(sort)]))
        self.sort = sort
        self.name = "sets"

    def contains(self, S):
        return self._sig_check(S) or Verdict(True)

    def one_point_extensions(self, A):
        return [self.generic_element(self.sort, A)]

    def generic_element(self, sort, A):
        return self.free_element(sort, A)

    def members(self, max_size):
        return [Structure(self.signature, {self.sort: ["s%d" % i for i in range(n)]}, name=self.name)
                for n in range(max_size + 1)]

    def make(self, elements):
        return Structure(self.signature, {self.sort: list(elements)}, name=self.name)


class Graphs(RelationalClass):
    """Simple undirected graphs: E symmetric and irreflexive."""
    condition5_trusted = False
    provenance = "direct: union of the three structures"

    def __init__(self, sort="V", rel="E"):
        super().__init__(Signature([Sort(sort)], [], [RelationSymbol(rel, (sort, sort))]))
        self.sort, self.rel = sort, rel
        self.name = "graphs"

    @property
    def forbidden(self):
        x, y = Var("x", self.sort), Var("y", self.sort)
        return [Rel(self.rel, (x, x)),
                And((Rel(self.rel, (x, y)), Not(Rel(self.rel, (y, x)))))]

    def contains(self, S):
        bad = self._sig_check(S)
        if bad:
            return bad
        E = S.relations[self.rel]
        for a, b in E:
            if a == b:
                return Verdict(False, "loop at %s" % a, (a,))
            if (b, a) not in E:
                return Verdict(False, "edge %s-%s not symmetric" % (a, b), (a, b))
        return Verdict(True)

    def make(self, vertices, edges=()):
        rel = set()
        for a, b in edges:
            rel.add((a, b))
            rel.add((b, a))
        return Structure(self.signature, {self.sort: list(vertices)}, {self.rel: rel}, name=self.name)

    def one_point_extensions(self, A):
        vs = list(A.carriers[self.sort])
        out = []
        for k in range(len(vs) + 1):
            for nbrs in combinations(vs, k):
                B, x = self.free_element(self.sort, A)
                rel = set(A.relations[self.rel])
                for v in nbrs:
                    rel |= {(x, v), (v, x)}
                out.append((Structure(self.signature, B.carriers, {self.rel: rel}, name=A.name, check=False), x))
        return out

    def members(self, max_size):
        out = []
        for n in range(max_size + 1):
            vs = ["v%d" % i for i in range(n)]
            pairs = list(combinations(vs, 2))
            graphs = []
            for bits in product((0, 1), repeat=len(pairs)):
                graphs.append(self.make(vs, [p for p, b in zip(pairs, bits) if b]))
            out.extend(dedup_iso(graphs))
        return out


class EquivalenceRelations(RelationalClass):
    """Plain equivalence relations, no quotient sort.

    Conditions 1-4 hold; Condition 5 fails (the merging-classes obstruction),
    so this handle is only a negative control.
    """
    condition5_trusted = False
    provenance = "negative control: no Condition-5 support"

    def __init__(self, sort="S", rel="E"):
        super().__init__(Signature([Sort(sort)], [], [RelationSymbol(rel, (sort, sort))]))
        self.sort, self.rel = sort, rel
        self.name = "eqrel-raw"

    @property
    def forbidden(self):
        x, y, z = (Var(n, self.sort) for n in "xyz")
        E = lambda a, b: Rel(self.rel, (a, b))
        return [Not(E(x, x)), And((E(x, y), Not(E(y, x)))), And((E(x, y), E(y, z), Not(E(x, z))))]

    def contains(self, S):
        bad = self._sig_check(S)
        if bad:
            return bad
        E = S.relations[self.rel]
        for x in S.carriers[self.sort]:
            if (x, x) not in E:
                return Verdict(False, "%s not reflexive" % x, (x,))
        for a, b in E:
            if (b, a) not in E:
                return Verdict(False, "not symmetric at %s,%s" % (a, b), (a, b))
        for a, b in E:
            for c in S.carriers[self.sort]:
                if (b, c) in E and (a, c) not in E:
                    return Verdict(False, "not transitive at %s,%s,%s" % (a, b, c), (a, b, c))
        return Verdict(True)

    def close_relations(self, carriers, rels):
        xs = carriers[self.sort]
        parent = {x: x for x in xs}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in rels[self.rel]:
            parent[find(a)] = find(b)
        return {self.rel: {(a, b) for a in xs for b in xs if find(a) == find(b)}}

    def make(self, blocks):
        xs = [x for b in blocks for x in b]
        rel = {(a, b) for blk in blocks for a in blk for b in blk}
        return Structure(self.signature, {self.sort: xs}, {self.rel: rel}, name=self.name)

    def classes_of(self, S):
        out = []
        for x in S.carriers[self.sort]:
            for blk in out:
                if (x, blk[0]) in S.relations[self.rel]:
                    blk.append(x)
                    break
            else:
                out.append([x])
        return out

    def generic_element(self, sort, A):
        B, x = self.free_element(sort, A)
        rel = set(A.relations[self.rel]) | {(x, x)}
        return Structure(self.signature, B.carriers, {self.rel: rel}, name=A.name, check=False), x

    def one_point_extensions(self, A):
        out = [self.generic_element(self.sort, A)]
        for blk in self.classes_of(A):
            B, x = self.free_element(self.sort, A)
            rel = set(A.relations[self.rel]) | {(x, x)} | {(x, y) for y in blk} | {(y, x) for y in blk}
            out.append((Structure(self.signature, B.carriers, {self.rel: rel}, name=A.name, check=False), x))
        return out

    def members(self, max_size):
        out = []
        for n in range(max_size + 1):
            for part in _integer_partitions(n):
                blocks, k = [], 0
                for size in part:
                    blocks.append(["s%d" % i for i in range(k, k + size)])
                    k += size
                out.append(self.make(blocks))
        return out

    def complete_cube(self, cube):
        from .combinators import relational_cube
        return relational_cube(self, cube)


def _integer_partitions(n, largest=None):
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in _integer_partitions(n - k, k):
            yield (k,) + rest


# classes with function symbols ---------------------------------------------------

class FunctionalClass(ClassHandle):
    """Members: a total core that is a class member, plus free elements."""

    def core_contains(self, C):
        raise NotImplementedError

    def contains(self, S):
        bad = self._sig_check(S)
        if bad:
            return bad
        core = core_elements(S)
        for c in self.signature.constants:
            if S.value(c.name, ()) is None:
                return Verdict(False, "constant %s undefined" % c.name)
        for f in self.signature.functions:
            for t in product(*([x for x in S.carriers[s] if x in core] for s in f.args)):
                if S.value(f.name, t) is None:
                    return Verdict(False, "core not closed: %s%s undefined" % (f.name, t), t)
        return self.core_contains(S.induced(core))

    def split(self, S):
        core = core_elements(S)
        return S.induced(core), [x for x in S.elements if x not in core]

    def _amalgam(self, E, A, B, jA, jB):
        Ec, _ = self.split(E)
        Ac, Af = self.split(A)
        Bc, Bf = self.split(B)
        res = self._core_amalgam(Ec, Ac, Bc, {e: jA[e] for e in Ec.elements},
                                 {e: jB[e] for e in Ec.elements})
        D = res.amalgam
        iA = dict(res.into_A.mapping)
        iB = dict(res.into_B.mapping)
        back = {jB[e]: jA[e] for e in E.elements}
        used = set(D.sort_of)
        carriers = {s: list(v) for s, v in D.carriers.items()}
        for x in Af:
            z = fresh_name(x, used)
            used.add(z)
            iA[x] = z
            carriers[A.sort_of[x]].append(z)
        for y in Bf:
            if y in back:
                iB[y] = iA[back[y]]
                continue
            z = fresh_name(y, used)
            used.add(z)
            iB[y] = z
            carriers[B.sort_of[y]].append(z)
        D2 = Structure(self.signature, carriers, D.relations, D.functions, name=self.name, check=False)
        return self.result(D2, A, B, iA, iB, res.notes)

    def _core_amalgam(self, E, A, B, jA, jB):
        raise NotImplementedError


# vector spaces ----------------------------------------------------------------

def _combo_name(coeffs, names):
    parts = []
    for c, n in zip(coeffs, names):
        if c == 1:
            parts.append(n)
        elif c:
            parts.append("%d%s" % (c, n))
    return "+".join(parts) if parts else "0"


class VectorSpaces(FunctionalClass):
    """Vector spaces over F_q (q prime); scalars are unary symbols s0..s{q-1}."""
    condition5_trusted = True
    provenance = "feuvrier: free and algebraic independence coincide (modularity)"

    def __init__(self, q=2, sort="V"):
        if q < 2 or any(q % d == 0 for d in range(2, int(q ** 0.5) + 1)):
            raise ClassError("vec(q) needs a prime q, got %s" % q)
        self.q, self.sort = q, sort
        funs = [FunctionSymbol("zero", (), sort), FunctionSymbol("plus", (sort, sort), sort),
                FunctionSymbol("neg", (sort,), sort)]
        funs += [FunctionSymbol("s%d" % a, (sort,), sort) for a in range(q)]
        super().__init__(Signature([Sort(sort)], funs))
        self.name = "vec(%d)" % q

    @property
    def forbidden(self):
        V = self.sort
        x, y, z = (Var(n, V) for n in "xyz")
        P = lambda a, b: App("plus", (a, b))
        S = lambda k, a: App("s%d" % (k % self.q), (a,))
        zero = App("zero")
        out = [Not(Eq(P(x, P(y, z)), P(P(x, y), z))), Not(Eq(P(x, y), P(y, x))),
               Not(Eq(P(x, zero), x)), Not(Eq(P(x, App("neg", (x,))), zero)),
               Not(Eq(S(1, x), x))]
        for a in range(self.q):
            out.append(Not(Eq(S(a, P(x, y)), P(S(a, x), S(a, y)))))
            for b in range(self.q):
                out.append(Not(Eq(S(a + b, x), P(S(a, x), S(b, x)))))
                out.append(Not(Eq(S(a * b, x), S(a, S(b, x)))))
        return out

    # coordinates ---------------------------------------------------------

    def combine(self, S, coeffs, basis):
        v = S.value("zero", ())
        for c, b in zip(coeffs, basis):
            w = S.value("s%d" % c, (b,))
            if w is None or v is None:
                return None
            v = S.value("plus", (v, w))
        return v

    def coordinates(self, S, initial=()):
        """(basis, coords) for a total space; basis extends initial."""
        basis = []
        coords = {}

        def rebuild():
            coords.clear()
            for c in product(range(self.q), repeat=len(basis)):
                v = self.combine(S, c, basis)
                if v is None or v in coords:
                    raise ClassError("not a vector space: combinations collide")
                coords[v] = c
        rebuild()
        for x in list(initial) + list(S.carriers[self.sort]):
            if x not in coords:
                basis.append(x)
                rebuild()
        return basis, coords

    def core_contains(self, C):
        if not C.elements:
            return Verdict(False, "empty structure lacks zero")
        try:
            basis, coords = self.coordinates(C)
        except ClassError as exc:
            return Verdict(False, str(exc))
        if len(coords) != len(C):
            return Verdict(False, "elements outside the span")
        q = self.q
        add = lambda a, b: tuple((x + y) % q for x, y in zip(a, b))
        for (a, b), v in C.functions["plus"].items():
            if coords[v] != add(coords[a], coords[b]):
                return Verdict(False, "plus(%s, %s) inconsistent" % (a, b), (a, b))
        for (a,), v in C.functions["neg"].items():
            if coords[v] != tuple((-x) % q for x in coords[a]):
                return Verdict(False, "neg(%s) inconsistent" % a, (a,))
        for k in range(q):
            for (a,), v in C.functions["s%d" % k].items():
                if coords[v] != tuple((k * x) % q for x in coords[a]):
                    return Verdict(False, "s%d(%s) inconsistent" % (k, a), (a,))
        if any(coords[C.value("zero", ())]):
            return Verdict(False, "zero is not the origin")
        return Verdict(True)

    def space(self, names, prefix=None):
        """The space with the given basis names; elements named by combinations."""
        q, d = self.q, len(names)
        vecs = list(product(range(q), repeat=d))
        label = {c: _combo_name(c, names) for c in vecs}
        return self.from_coordinates(vecs, label)

    def from_coordinates(self, vecs, label, name=None):
        q = self.q
        dim = len(vecs[0]) if vecs else 0
        add = lambda a, b: tuple((x + y) % q for x, y in zip(a, b))
        funs = {"zero": {(): label[(0,) * dim]},
                "plus": {(label[a], label[b]): label[add(a, b)] for a in vecs for b in vecs},
                "neg": {(label[a],): label[tuple((-x) % q for x in a)] for a in vecs}}
        for k in range(q):
            funs["s%d" % k] = {(label[a],): label[tuple((k * x) % q for x in a)] for a in vecs}
        return Structure(self.signature, {self.sort: [label[c] for c in vecs]}, {}, funs,
                         name=name or self.name)

    def _core_amalgam(self, E, A, B, jA, jB):
        q = self.q
        Eb, _ = self.coordinates(E)
        Ab, Ac = self.coordinates(A, [jA[e] for e in Eb])
        Bb, Bc = self.coordinates(B, [jB[e] for e in Eb])
        k, m, n = len(Eb), len(Ab) - len(Eb), len(Bb) - len(Eb)
        a_of = {c: x for x, c in Ac.items()}
        b_of = {c: y for y, c in Bc.items()}
        label, iA, iB = {}, {}, {}
        used = set()
        order = []
        for x in A.carriers[self.sort]:
            c = Ac[x]
            v = c[:k] + c[k:] + (0,) * n
            label[v] = x
            used.add(x)
            iA[x] = x
            order.append(v)
        for y in B.carriers[self.sort]:
            c = Bc[y]
            v = c[:k] + (0,) * m + c[k:]
            if v in label:
                iB[y] = label[v]
                continue
            z = fresh_name(y, used)
            used.add(z)
            label[v] = z
            iB[y] = z
            order.append(v)
        for v in product(range(q), repeat=k + m + n):
            if v in label:
                continue
            ce, ca, cb = v[:k], v[k:k + m], v[k + m:]
            left = a_of[ce + ca]
            right = b_of[(0,) * k + cb]
            z = fresh_name("%s+%s" % (left, iB[right]) if left != A.value("zero", ()) else iB[right], used)
            used.add(z)
            label[v] = z
            order.append(v)
        D = self.from_coordinates(order, label)
        return self.result(D, A, B, iA, iB)

    def generic_element(self, sort, A):
        self.signature.sort(sort)
        used = set(A.sort_of)
        x = fresh_name("x", used)
        line = self.space([x])
        E = self.constants_structure_for(A)
        jA = {E.elements[0]: A.value("zero", ())}
        jL = {E.elements[0]: line.value("zero", ())}
        res = self.free_amalgam(E, A, line, jA, jL, check=False)
        return res.amalgam, res.into_B(x)

    def constants_structure_for(self, A):
        return self.space([])

    def constants_structure(self):
        return self.space([])

    def one_point_extensions(self, A):
        return [self.generic_element(self.sort, A)]

    def members(self, max_size):
        names = ["u", "v", "w", "t", "r", "s"]
        out = []
        d = 0
        while self.q ** d <= max_size and d <= len(names):
            out.append(self.space(names[:d]))
            d += 1
        return out


# abelian groups ---------------------------------------------------------------

class AbelianGroups(FunctionalClass):
    """Abelian groups; finite members are table-backed, pushouts go through presentations."""
    condition5_trusted = True
    provenance = "feuvrier: free and algebraic independence coincide for abelian groups"
    locally_finite = False

    def __init__(self, sort="G", extension_bound=3):
        super().__init__(abelian_signature(sort))
        self.sort = sort
        self.extension_bound = extension_bound
        self.name = "abgrp"

    @property
    def forbidden(self):
        x, y, z = (Var(n, self.sort) for n in "xyz")
        P = lambda a, b: App("plus", (a, b))
        zero = App("zero")
        return [Not(Eq(P(x, P(y, z)), P(P(x, y), z))), Not(Eq(P(x, y), P(y, x))),
                Not(Eq(P(x, zero), x)), Not(Eq(P(x, App("neg", (x,))), zero))]

    def core_contains(self, C):
        xs = C.carriers[self.sort]
        if not xs:
            return Verdict(False, "empty structure lacks zero")
        p = C.functions["plus"]
        z = C.value("zero", ())
        for a in xs:
            if p[(a, z)] != a:
                return Verdict(False, "zero is not neutral for %s" % a, (a,))
            if p[(a, C.value("neg", (a,)))] != z:
                return Verdict(False, "neg(%s) is not an inverse" % a, (a,))
            for b in xs:
                if p[(a, b)] != p[(b, a)]:
                    return Verdict(False, "not commutative at %s,%s" % (a, b), (a, b))
                for c in xs:
                    if p[(a, p[(b, c)])] != p[(p[(a, b)], c)]:
                        return Verdict(False, "not associative at %s,%s,%s" % (a, b, c), (a, b, c))
        return Verdict(True)

    def cyclic(self, n, gen="g", name=None):
        P = Presentation([gen], [[n]] if n else [], self.sort)
        if not P.is_finite:
            raise ClassError("infinite cyclic group has no table")
        names = {P.value("zero", ()): "0"}
        g = P.generator(gen)
        x = P.value("zero", ())
        for k in range(1, n):
            x = P.value("plus", (x, g))
            names[x] = gen if k == 1 else "%d%s" % (k, gen)
        return P.to_structure(names, name=name or self.name)

    def product_group(self, orders, gens=None):
        gens = gens or ["g%d" % i for i in range(len(orders))]
        rows = [[o if j == i else 0 for j in range(len(orders))] for i, o in enumerate(orders)]
        P = Presentation(gens, rows, self.sort)
        names = {}
        for coeffs in product(*(range(o) for o in orders)):
            word = list(coeffs)
            names[P.normal_form(word)] = _combo_name(coeffs, gens)
        return P.to_structure(names, name=self.name)

    def _core_amalgam(self, E, A, B, jA, jB):
        PA = Presentation.from_structure(A, self.sort)
        PB = Presentation.from_structure(B, self.sort)
        na, nb = len(PA.generators), len(PB.generators)
        rows = [r + [0] * nb for r in PA.rows] + [[0] * na + r for r in PB.rows]
        ia = {g: i for i, g in enumerate(PA.generators)}
        ib = {g: i for i, g in enumerate(PB.generators)}
        for e in E.elements:
            r = [0] * (na + nb)
            r[ia[jA[e]]] += 1
            r[na + ib[jB[e]]] -= 1
            rows.append(r)
        P = Presentation(list(PA.generators) + ["B:" + g for g in PB.generators], rows, self.sort)
        if not P.is_finite:
            raise ClassError("pushout of finite groups came out infinite")
        unit = lambda i, n: [int(j == i) for j in range(n)]
        nf_a = {x: P.normal_form(unit(ia[x], na + nb)) for x in A.elements}
        nf_b = {y: P.normal_form(unit(na + ib[y], na + nb)) for y in B.elements}
        label, used = {}, set()
        iA, iB = {}, {}
        for x in A.elements:
            label[nf_a[x]] = x
            used.add(x)
            iA[x] = x
        for y in B.elements:
            v = nf_b[y]
            if v not in label:
                z = fresh_name(y, used)
                used.add(z)
                label[v] = z
            iB[y] = label[v]
        zero_a = A.value("zero", ())
        for x in A.elements:
            for y in B.elements:
                v = P.value("plus", (nf_a[x], nf_b[y]))
                if v not in label:
                    z = fresh_name("%s+%s" % (x, iB[y]) if x != zero_a else iB[y], used)
                    used.add(z)
                    label[v] = z
        D = P.to_structure(label, name=self.name)
        order = [label[v] for v in label]
        D = Structure(D.signature, {self.sort: order}, {}, D.functions, name=self.name, check=False)
        res = self.result(D, A, B, iA, iB)
        res.notes.append("invariants %s" % list(P.invariants))
        return res

    def generic_element(self, sort, A):
        """A (+) Z as a presentation, with the new generator's normal form."""
        C, free = self.split(A)
        if free:
            raise ClassError("generic element over a partial group: use free_element")
        PA = Presentation.from_structure(C, self.sort)
        x = fresh_name("x", set(A.sort_of))
        P = PA.free_sum(x)
        return P, P.generator(x)

    def constants_structure(self):
        return self.cyclic(1)

    def one_point_extensions(self, A):
        """Cyclic extensions n*x = a for 2 <= n <= extension_bound (finite fragment)."""
        C, free = self.split(A)
        out = []
        x = fresh_name("x", set(A.sort_of))
        for n in range(2, self.extension_bound + 1):
            for a in C.carriers[self.sort]:
                PA = Presentation.from_structure(C, self.sort)
                gens = PA.generators + [x]
                rows = [r + [0] for r in PA.rows]
                r = [0] * len(gens)
                r[gens.index(a)] -= 1
                r[-1] += n
                rows.append(r)
                P = Presentation(gens, rows, self.sort)
                unit = lambda i: [int(j == i) for j in range(len(gens))]
                names = {P.normal_form(unit(i)): g for i, g in enumerate(PA.generators)}
                xv = P.normal_form(unit(len(gens) - 1))
                if xv in names:
                    continue
                names[xv] = x
                k = 2
                cur = xv
                while True:
                    cur = P.value("plus", (cur, xv))
                    if cur in names:
                        break
                    names[cur] = fresh_name("%d%s" % (k, x), set(A.sort_of) | set(names.values()))
                    k += 1
                B = P.to_structure(names, name=self.name)
                if free:
                    B = Structure(B.signature, {self.sort: list(B.carriers[self.sort]) + free}, {},
                                  B.functions, name=self.name, check=False)
                out.append((B, x))
        return _dedup_over(out, A)

    def members(self, max_size):
        out = []
        for n in range(1, max_size + 1):
            for inv in _invariant_factor_lists(n):
                out.append(self.product_group(inv) if inv else self.cyclic(1))
        return out


def _dedup_over(exts, A):
    out = []
    for B, x in exts:
        fix = {a: a for a in A.elements}
        if any(len(B) == len(B2) and is_isomorphic_over(B, B2, fix) is not None for B2, _ in out):
            continue
        out.append((B, x))
    return out


def _invariant_factor_lists(n):
    """Invariant factor sequences d1 | d2 | ... with product n (each d > 1)."""
    def rec(rest, last):
        if rest == 1:
            yield ()
            return
        for d in range(2, rest + 1):
            if rest % d == 0 and (last is None or d % last == 0):
                for tail in rec(rest // d, d):
                    yield (d,) + tail
    return [seq for seq in rec(n, None) if _divides_chain(seq)]


def _divides_chain(seq):
    return all(seq[i + 1] % seq[i] == 0 for i in range(len(seq) - 1))


# constructors --------------------------------------------------------------

def sets(sort="S"):
    return Sets(sort)


def graphs(sort="V", rel="E"):
    return Graphs(sort, rel)


def vector_spaces(q=2, sort="V"):
    return VectorSpaces(q, sort)


def abelian_groups(sort="G"):
    return AbelianGroups(sort)


def equivalence_relations(sort="S"):
    return EquivalenceRelations(sort)


# universal-property and Condition-4 checks ----------------------------------------

@dataclass
class PushoutReport:
    ok: bool
    pairs: int = 0
    targets: int = 0
    violation: str = ""
    witness: object = None


def verify_pushout(cls, result, targets, budget=None):
    """Every pair of morphisms agreeing on the base factors uniquely through the amalgam."""
    D = result.amalgam
    A, B = result.into_A.source, result.into_B.source
    E = result.base
    jA, jB = result.base_maps
    iA, iB = result.into_A.mapping, result.into_B.mapping
    pairs = 0
    from .structures import find_morphisms
    for T in targets:
        homsE = {}
        for hB in find_morphisms(B, T, budget=budget):
            key = tuple(hB.mapping[jB[e]] for e in E.elements)
            homsE.setdefault(key, []).append(hB)
        for hA in find_morphisms(A, T, budget=budget):
            key = tuple(hA.mapping[jA[e]] for e in E.elements)
            for hB in homsE.get(key, ()):
                pairs += 1
                seed = {}
                clash = False
                for x, y in iA.items():
                    seed[y] = hA.mapping[x]
                for x, y in iB.items():
                    if y in seed and seed[y] != hB.mapping[x]:
                        clash = True
                    seed[y] = hB.mapping[x]
                if clash:
                    return PushoutReport(False, pairs, len(targets), "images collide", (T, hA, hB))
                facs = []
                for h in find_morphisms(D, T, seed=seed, budget=budget):
                    facs.append(h)
                    if len(facs) > 1:
                        break
                if len(facs) != 1:
                    what = "no factoring morphism" if not facs else "factoring is not unique"
                    return PushoutReport(False, pairs, len(targets), what, (T, hA, hB))
    return PushoutReport(True, pairs, len(targets))


def check_generic_element(cls, A, ext, x, targets, budget=None):
    """For every phi: A -> T and b in T some extension of phi sends x to b."""
    from .structures import find_morphisms
    sort = ext.sort_of[x]
    for T in targets:
        for h in find_morphisms(A, T, budget=budget):
            for b in T.carriers[sort]:
                seed = dict(h.mapping)
                seed[x] = b
                if first(find_morphisms(ext, T, seed=seed, budget=budget)) is None:
                    return Verdict(False, "no extension sending %s to %s" % (x, b), (T, h, b))
    return Verdict(True)


@dataclass
class FeuvrierReport:
    ok: bool
    configurations: int = 0
    counterexample: object = None
    reason: str = ""
    complete: bool = True


def check_feuvrier(cls, max_size=5, budget=None, ambients=None):
    """Canonical map A (+)_E B -> <AB> is an embedding iff A meet B = E, on small configurations.

    Sets condition5_trusted with provenance "feuvrier" when every configuration passes.
    """
    count = 0
    ambients = cls.members(max_size) if ambients is None else ambients
    for D in ambients:
        subs = _generated_subsets(D)
        for Aset in subs:
            for Bset in subs:
                inter = Aset & Bset
                for Eset in subs:
                    if not Eset <= inter:
                        continue
                    count += 1
                    if budget is not None and count > budget:
                        return FeuvrierReport(False, count, reason="budget", complete=False)
                    emb = canonical_map_is_embedding(cls, D, Aset, Bset, Eset)
                    if emb != (inter == Eset):
                        cx = (D, sorted(Aset), sorted(Bset), sorted(Eset))
                        why = ("canonical map is an embedding but A and B meet beyond E" if emb
                               else "A and B meet exactly in E but the canonical map is not an embedding")
                        return FeuvrierReport(False, count, cx, why)
    cls.condition5_trusted = True
    cls.provenance = "feuvrier"
    return FeuvrierReport(True, count)


def _generated_subsets(D):
    seen = set()
    out = []
    elems = D.elements
    for k in range(len(elems) + 1):
        for S in combinations(elems, k):
            g = frozenset(generated(D, S))
            if g not in seen:
                seen.add(g)
                out.append(g)
    return out


def canonical_map(cls, D, Aset, Bset, Eset):
    """(amalgam result, canonical morphism A (+)_E B -> D)."""
    A, B, E = D.induced(Aset), D.induced(Bset), D.induced(Eset)
    ident = {e: e for e in Eset}
    res = cls.free_amalgam(E, A, B, ident, ident, check=False)
    seed = {res.into_A(a): a for a in Aset}
    seed.update({res.into_B(b): b for b in Bset})
    from .structures import find_morphisms
    h = first(find_morphisms(res.amalgam, D, seed=seed))
    return res, h


def canonical_map_is_embedding(cls, D, Aset, Bset, Eset):
    res, h = canonical_map(cls, D, Aset, Bset, Eset)
    if h is None:
        return False
    return h.is_valid(as_embedding=True)
