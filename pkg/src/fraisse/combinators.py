"""Class combinators and the Condition-5 cube completion.

Infinite constructions (term towers, integer-indexed copies, layers of
parameter fibers) are truncated: new elements are adjoined as free elements
and the tables stay undefined on them beyond the requested depth or window.
"""

from dataclasses import dataclass, field
from itertools import combinations, product

from .classes import (AmalgamResult, ClassError, ClassHandle, FunctionalClass, RelationalClass,
                      Verdict, as_mapping, core_elements, dedup_iso)
from .signature import (Bijection, EquivalenceWithQuotient, Function, Predicate, RelationSymbol,
                        Signature, Sort, extend_signature_generic, parameterize_signature)
from .structures import (Morphism, Structure, fresh_name, generated, is_isomorphic_over)

__all__ = [
    "CubeInput", "CubeResult", "three_amalgamation", "feuvrier_route", "relational_cube",
    "GenericPredicate", "GenericFunction", "GenericBijection", "EquivalenceQuotient",
    "GenericSubstructure", "Parameterized",
    "add_generic_predicate", "add_generic_function", "add_generic_bijection",
    "add_equivalence_with_quotient", "add_generic_substructure", "parameterize_class",
]


# the cube -------------------------------------------------------------------------

@dataclass
class CubeInput:
    """Left diagram of Condition 5; maps are dicts (or Morphisms).

    eA: E->A, eB0: E->B0, eB1: E->B1, a0: A->D0, a1: A->D1,
    b0: B0->D0, b1: B1->D1, c0: B0->B, c1: B1->B.
    """
    E: Structure
    A: Structure
    B0: Structure
    B1: Structure
    D0: Structure
    D1: Structure
    B: Structure
    eA: dict
    eB0: dict
    eB1: dict
    a0: dict
    a1: dict
    b0: dict
    b1: dict
    c0: dict
    c1: dict

    def __post_init__(self):
        for k in ("eA", "eB0", "eB1", "a0", "a1", "b0", "b1", "c0", "c1"):
            setattr(self, k, as_mapping(getattr(self, k)))

    def arrows(self):
        return [("eA", self.E, self.A, self.eA), ("eB0", self.E, self.B0, self.eB0),
                ("eB1", self.E, self.B1, self.eB1), ("a0", self.A, self.D0, self.a0),
                ("a1", self.A, self.D1, self.a1), ("b0", self.B0, self.D0, self.b0),
                ("b1", self.B1, self.D1, self.b1), ("c0", self.B0, self.B, self.c0),
                ("c1", self.B1, self.B, self.c1)]

    def problems(self):
        out = []
        for tag, src, dst, m in self.arrows():
            out += ["%s: %s" % (tag, p) for p in Morphism(src, dst, m, True).problems()]
        if out:
            return out
        for e in self.E.elements:
            if self.a0[self.eA[e]] != self.b0[self.eB0[e]]:
                out.append("square E-A-B0-D0 does not commute at %s" % e)
            if self.a1[self.eA[e]] != self.b1[self.eB1[e]]:
                out.append("square E-A-B1-D1 does not commute at %s" % e)
            if self.c0[self.eB0[e]] != self.c1[self.eB1[e]]:
                out.append("square E-B0-B1-B does not commute at %s" % e)
        for i, (bm, am, B_i) in enumerate(((self.b0, self.a0, self.B0), (self.b1, self.a1, self.B1))):
            meet = set(bm.values()) & set(am.values())
            expect = {am[self.eA[e]] for e in self.E.elements}
            if meet != expect:
                out.append("B%d and A meet beyond E inside D%d" % (i, i))
        meet = set(self.c0.values()) & set(self.c1.values())
        if meet != {self.c0[self.eB0[e]] for e in self.E.elements}:
            out.append("B0 and B1 meet beyond E inside B")
        return out


@dataclass
class CubeResult:
    status: str                     # ok | fail | unsupported
    D: Structure = None
    d0: dict = None                 # D0 -> D
    d1: dict = None                 # D1 -> D
    b: dict = None                  # B -> D
    reason: str = ""
    witness: object = None
    route: str = ""
    notes: list = field(default_factory=list)

    @property
    def ok(self):
        return self.status == "ok"


def cube_output_problems(cls, cube, D, d0, d1, b):
    out = []
    v = cls.contains(D)
    if not v:
        out.append("completion is not a member: %s" % v.reason)
    for tag, src, m in (("D0", cube.D0, d0), ("D1", cube.D1, d1), ("B", cube.B, b)):
        out += ["%s: %s" % (tag, p) for p in Morphism(src, D, m, True).problems()]
    if out:
        return out
    for a in cube.A.elements:
        if d0[cube.a0[a]] != d1[cube.a1[a]]:
            out.append("A-square does not commute at %s" % a)
    for y in cube.B0.elements:
        if d0[cube.b0[y]] != b[cube.c0[y]]:
            out.append("B0-square does not commute at %s" % y)
    for y in cube.B1.elements:
        if d1[cube.b1[y]] != b[cube.c1[y]]:
            out.append("B1-square does not commute at %s" % y)
    im0, im1, imB = set(d0.values()), set(d1.values()), set(b.values())
    if im0 & imB != {b[cube.c0[y]] for y in cube.B0.elements}:
        out.append("D0 meets B beyond B0")
    if im1 & imB != {b[cube.c1[y]] for y in cube.B1.elements}:
        out.append("D1 meets B beyond B1")
    if im0 & im1 != {d0[cube.a0[a]] for a in cube.A.elements}:
        out.append("D0 meets D1 beyond A")
    return out


def three_amalgamation(cls, cube, check=True):
    """Complete the cube of Condition 5 inside cls, or report why not."""
    if check:
        bad = cube.problems()
        if bad:
            raise ClassError("cube invariant violated: %s" % bad[0])
        for tag in ("E", "A", "B0", "B1", "D0", "D1", "B"):
            v = cls.contains(getattr(cube, tag))
            if not v:
                raise ClassError("%s is not a member: %s" % (tag, v.reason))
    res = cls.complete_cube(cube)
    if res.ok:
        bad = cube_output_problems(cls, cube, res.D, res.d0, res.d1, res.b)
        if bad:
            return CubeResult("fail", res.D, res.d0, res.d1, res.b, bad[0], route=res.route)
    return res


def feuvrier_route(cls, cube):
    """D = [D0 (+)_{B0} B] (+)_G [D1 (+)_{B1} B] with G = <AB> computed on both sides."""
    X0 = cls.free_amalgam(cube.B0, cube.D0, cube.B, cube.b0, cube.c0, check=False)
    X1 = cls.free_amalgam(cube.B1, cube.D1, cube.B, cube.b1, cube.c1, check=False)
    seed = {}
    for a in cube.A.elements:
        seed[X0.into_A(cube.a0[a])] = X1.into_A(cube.a1[a])
    for y in cube.B.elements:
        u, w = X0.into_B(y), X1.into_B(y)
        if seed.get(u, w) != w:
            return CubeResult("unsupported", reason="A and B overlap inconsistently", route="feuvrier")
        seed[u] = w
    S0 = X0.amalgam.induced(generated(X0.amalgam, seed.keys()))
    S1 = X1.amalgam.induced(generated(X1.amalgam, seed.values()))
    iso = is_isomorphic_over(S0, S1, seed)
    if iso is None:
        return CubeResult("unsupported", reason="<AB> differs between the two sides, so the "
                          "canonical map from the free amalgam is not an embedding", route="feuvrier")
    top = cls.free_amalgam(S0, X0.amalgam, X1.amalgam, {x: x for x in S0.elements},
                           dict(iso.mapping), check=False)
    d0 = {x: top.into_A(X0.into_A(x)) for x in cube.D0.elements}
    d1 = {x: top.into_B(X1.into_A(x)) for x in cube.D1.elements}
    b = {y: top.into_A(X0.into_B(y)) for y in cube.B.elements}
    return CubeResult("ok", top.amalgam, d0, d1, b, route="feuvrier")


def glue_cube(cube):
    """Union of D0, D1 and B along A, B0, B1: (carriers, d0, d1, b)."""
    parent = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    nodes = [(0, x) for x in cube.D0.elements] + [(2, y) for y in cube.B.elements] + \
            [(1, x) for x in cube.D1.elements]
    for n in nodes:
        find(n)
    for a in cube.A.elements:
        union((0, cube.a0[a]), (1, cube.a1[a]))
    for y in cube.B0.elements:
        union((0, cube.b0[y]), (2, cube.c0[y]))
    for y in cube.B1.elements:
        union((1, cube.b1[y]), (2, cube.c1[y]))
    names, used = {}, set()
    sort_of = {0: cube.D0.sort_of, 1: cube.D1.sort_of, 2: cube.B.sort_of}
    carriers = {s: [] for s in cube.D0.signature.sort_names}
    for n in sorted(nodes, key=lambda n: (n[0] != 0, n[0] == 1, 0)):
        r = find(n)
        if r not in names:
            z = fresh_name(n[1], used)
            used.add(z)
            names[r] = z
            carriers[sort_of[n[0]][n[1]]].append(z)
    name = lambda n: names[find(n)]
    d0 = {x: name((0, x)) for x in cube.D0.elements}
    d1 = {x: name((1, x)) for x in cube.D1.elements}
    b = {y: name((2, y)) for y in cube.B.elements}
    return carriers, d0, d1, b


def relational_cube(cls, cube):
    """Union of the three structures, then the class closure (least completion)."""
    carriers, d0, d1, b = glue_cube(cube)
    rels = {r: set() for r in cube.D0.relations}
    for S, m in ((cube.D0, d0), (cube.D1, d1), (cube.B, b)):
        for r, ts in S.relations.items():
            rels[r] |= {tuple(m[x] for x in t) for t in ts}
    close = getattr(cls, "close_relations", None)
    if close is not None:
        rels = close(carriers, rels)
    D = Structure(cls.signature, carriers, rels, {}, name=cls.name, check=False)
    bad = cube_output_problems(cls, cube, D, d0, d1, b)
    if bad:
        # any completion receives a morphism from this least one, so nothing else works
        return CubeResult("fail", D, d0, d1, b, "least completion breaks the cube: %s" % bad[0],
                          witness=bad[0], route="union")
    return CubeResult("ok", D, d0, d1, b, route="union")


def default_cube(cls, cube):
    if cls.signature.is_relational:
        return relational_cube(cls, cube)
    return feuvrier_route(cls, cube)


# expansions of a base class ------------------------------------------------------

class Expansion(ClassHandle):
    """Base class plus new symbols; members have a base-class reduct."""

    def __init__(self, base, signature):
        super().__init__(signature)
        self.base = base
        self.locally_finite = base.locally_finite

    def reduct(self, S):
        return S.reduct(self.base.signature)

    def base_contains(self, S):
        bad = self._sig_check(S)
        if bad:
            return bad
        v = self.base.contains(self.reduct(S))
        if not v:
            return Verdict(False, "base reduct: %s" % v.reason, v.witness)
        return None

    def base_amalgam(self, E, A, B, jA, jB):
        return self.base.free_amalgam(self.reduct(E), self.reduct(A), self.reduct(B), jA, jB, check=False)

    def normalize_base(self, E, A, B, jA, jB):
        return E, jA, jB

    def lift(self, S, relations=None, functions=None, carriers=None, name=None):
        out = S.expand(self.signature, carriers, relations, functions)
        return out.with_name(name or self.name)

    def constants_structure(self):
        return self.lift(self.base.constants_structure())

    def _base_generic(self, sort, A):
        B, x = self.base.generic_element(sort, self.reduct(A))
        if not isinstance(B, Structure):
            raise ClassError("the generic extension of the base is infinite (a presentation)")
        return B, x

    def complete_cube(self, cube):
        return default_cube(self, cube)


class GenericPredicate(Expansion):
    """K_U: a new predicate, interpreted freely."""
    condition5_trusted = True
    provenance = "union of images (generic relation)"

    def __init__(self, base, sort, arity=1, name=None):
        sig = extend_signature_generic(base.signature, Predicate(sort, arity, name))
        super().__init__(base, sig)
        self.symbol = sig.relations[-1].name
        self.sort, self.arity = sort, arity
        self.name = "genpred(%s,%s)" % (base.name, sort)

    @property
    def forbidden(self):
        return self.base.forbidden

    def contains(self, S):
        return self.base_contains(S) or Verdict(True)

    def _amalgam(self, E, A, B, jA, jB):
        r = self.base_amalgam(E, A, B, jA, jB)
        iA, iB = r.into_A.mapping, r.into_B.mapping
        U = {tuple(iA[x] for x in t) for t in A.relations[self.symbol]}
        U |= {tuple(iB[x] for x in t) for t in B.relations[self.symbol]}
        D = self.lift(r.amalgam, {self.symbol: U})
        return self.result(D, A, B, iA, iB)

    def generic_element(self, sort, A):
        B, x = self._base_generic(sort, A)
        return self.lift(B, {self.symbol: A.relations[self.symbol]}), x

    def free_element(self, sort, A, base="x"):
        B, x = self.base.free_element(sort, self.reduct(A), base)
        return self.lift(B, {self.symbol: A.relations[self.symbol]}), x

    def one_point_extensions(self, A):
        out = []
        for B0, x in self.base.one_point_extensions(self.reduct(A)):
            if B0.sort_of[x] != self.sort and self.arity == 1:
                out.append((self.lift(B0, {self.symbol: A.relations[self.symbol]}), x))
                continue
            # every tuple touching a new element is decided, not only those through x
            new = [t for t in product(B0.carriers[self.sort], repeat=self.arity)
                   if any(y not in A.sort_of for y in t)]
            for k in range(len(new) + 1):
                for chosen in combinations(new, k):
                    U = set(A.relations[self.symbol]) | set(chosen)
                    out.append((self.lift(B0, {self.symbol: U}), x))
        return out

    def complete_cube(self, cube):
        """Base completion, then the predicate is the union of the three images."""
        red = CubeInput(*(self.reduct(getattr(cube, k)) for k in ("E", "A", "B0", "B1", "D0", "D1", "B")),
                        cube.eA, cube.eB0, cube.eB1, cube.a0, cube.a1, cube.b0, cube.b1, cube.c0, cube.c1)
        base = self.base.complete_cube(red)
        if not base.ok:
            return base
        U = set()
        for S, m in ((cube.D0, base.d0), (cube.D1, base.d1), (cube.B, base.b)):
            U |= {tuple(m[x] for x in t) for t in S.relations[self.symbol]}
        D = self.lift(base.D, {self.symbol: U})
        return CubeResult("ok", D, base.d0, base.d1, base.b, route="union over " + (base.route or "base"))

    def members(self, max_size):
        out = []
        for S in self.base.members(max_size):
            tuples = list(product(S.carriers[self.sort], repeat=self.arity))
            for k in range(len(tuples) + 1):
                for chosen in combinations(tuples, k):
                    out.append(self.lift(S, {self.symbol: chosen}))
        return dedup_iso(out)


class GenericSubstructure(Expansion):
    """K_R: a predicate naming a substructure; Condition 5 is not claimed."""
    condition5_trusted = False
    provenance = "negative control: Condition 5 can fail"

    def __init__(self, base, sort=None, name=None):
        if not base.locally_finite:
            raise ClassError("generic substructure needs a locally finite base class")
        sort = sort or base.signature.sort_names[0]
        if len(base.signature.sorts) != 1:
            raise ClassError("generic substructure is implemented for one-sorted classes")
        sig = extend_signature_generic(base.signature, Predicate(sort, 1, name or "R"))
        super().__init__(base, sig)
        self.symbol = sig.relations[-1].name
        self.sort = sort
        self.name = "gensub(%s,%s)" % (base.name, sort)

    def members_of(self, S):
        return {t[0] for t in S.relations[self.symbol]}

    def contains(self, S):
        bad = self.base_contains(S)
        if bad:
            return bad
        R = self.members_of(S)
        closed = generated(S, R)
        if closed != R:
            extra = sorted(closed - R)[0]
            return Verdict(False, "%s is generated by %s but not in it" % (extra, self.symbol), (extra,))
        return Verdict(True)

    def close(self, D, seeds):
        return {(x,) for x in generated(D, seeds)}

    def _amalgam(self, E, A, B, jA, jB):
        r = self.base_amalgam(E, A, B, jA, jB)
        iA, iB = r.into_A.mapping, r.into_B.mapping
        seeds = {iA[x] for x in self.members_of(A)} | {iB[x] for x in self.members_of(B)}
        D = self.lift(r.amalgam, {self.symbol: self.close(r.amalgam, seeds)})
        return self.result(D, A, B, iA, iB)

    def generic_element(self, sort, A):
        B, x = self._base_generic(sort, A)
        R = self.close(B, self.members_of(A))
        return self.lift(B, {self.symbol: R}), x

    def one_point_extensions(self, A):
        out = []
        for B0, x in self.base.one_point_extensions(self.reduct(A)):
            out.append((self.lift(B0, {self.symbol: self.close(B0, self.members_of(A))}), x))
            R = self.close(B0, self.members_of(A) | {x})
            out.append((self.lift(B0, {self.symbol: R}), x))
        return out

    def members(self, max_size):
        out = []
        for S in self.base.members(max_size):
            seen = set()
            elems = S.elements
            for k in range(len(elems) + 1):
                for gens in combinations(elems, k):
                    R = frozenset(generated(S, gens))
                    if R not in seen:
                        seen.add(R)
                        out.append(self.lift(S, {self.symbol: {(x,) for x in R}}))
        return dedup_iso(out)

    def complete_cube(self, cube):
        """Base completion, then R = substructure generated by the three images.

        Every completion receives a morphism from this one, so a failure here
        refutes the cube.
        """
        red = CubeInput(*(self.reduct(getattr(cube, k)) for k in ("E", "A", "B0", "B1", "D0", "D1", "B")),
                        cube.eA, cube.eB0, cube.eB1, cube.a0, cube.a1, cube.b0, cube.b1, cube.c0, cube.c1)
        base = self.base.complete_cube(red)
        if not base.ok:
            return base
        seeds = set()
        for S, m in ((cube.D0, base.d0), (cube.D1, base.d1), (cube.B, base.b)):
            seeds |= {m[x] for x in self.members_of(S)}
        R = generated(base.D, seeds)
        D = self.lift(base.D, {self.symbol: {(x,) for x in R}})
        for tag, S, m in (("D0", cube.D0, base.d0), ("D1", cube.D1, base.d1), ("B", cube.B, base.b)):
            mine = self.members_of(S)
            for x in S.elements:
                if m[x] in R and x not in mine:
                    return CubeResult("fail", D, base.d0, base.d1, base.b,
                                      "%s is forced into %s inside the completion but not in %s" % (x, self.symbol, tag),
                                      witness=(tag, x), route="generated")
        return CubeResult("ok", D, base.d0, base.d1, base.b, route="generated")


class GenericFunction(Expansion):
    """K_f: a new function symbol, built as a free term tower cut at a depth."""
    condition5_trusted = False
    provenance = "feuvrier route, verified per cube"

    def __init__(self, base, args, result, depth=1, name=None):
        if depth < 0:
            raise ClassError("depth must be >= 0")
        sig = extend_signature_generic(base.signature, Function(tuple(args), result, name))
        super().__init__(base, sig)
        self.symbol = sig.functions[-1].name
        self.args, self.res_sort, self.depth = tuple(args), result, depth
        self.name = "genfun(%s,(%s)->%s,depth=%d)" % (base.name, " ".join(args), result, depth)

    def contains(self, S):
        return self.base_contains(S) or Verdict(True)

    def _amalgam(self, E, A, B, jA, jB):
        r = self.base_amalgam(E, A, B, jA, jB)
        iA, iB = r.into_A.mapping, r.into_B.mapping
        table = {tuple(iA[x] for x in t): iA[v] for t, v in A.functions[self.symbol].items()}
        table.update({tuple(iB[x] for x in t): iB[v] for t, v in B.functions[self.symbol].items()})
        inA, inB = set(iA.values()), set(iB.values())
        D = r.amalgam
        old = set()
        for _ in range(self.depth):
            fresh = []
            for t in product(*(D.carriers[s] for s in self.args)):
                if t in table or all(x in inA for x in t) or all(x in inB for x in t):
                    continue
                if old and not any(x not in old for x in t):
                    continue
                fresh.append(t)
            old = set(D.sort_of)
            for t in fresh:
                label = "%s(%s)" % (self.symbol, ",".join(t))
                D, z = self.base.free_element(self.res_sort, D, label)
                table[t] = z
        out = self.lift(D, functions={self.symbol: table})
        return self.result(out, A, B, iA, iB)

    def generic_element(self, sort, A):
        B, x = self._base_generic(sort, A)
        return self.lift(B, functions={self.symbol: A.functions[self.symbol]}), x

    def free_element(self, sort, A, base="x"):
        B, x = self.base.free_element(sort, self.reduct(A), base)
        return self.lift(B, functions={self.symbol: A.functions[self.symbol]}), x

    def one_point_extensions(self, A):
        return [(self.lift(B, functions={self.symbol: A.functions[self.symbol]}), x)
                for B, x in self.base.one_point_extensions(self.reduct(A))]

    def members(self, max_size):
        """Base members with every total table (kept small on purpose)."""
        out = []
        for S in self.base.members(max_size):
            dom = list(product(*(S.carriers[s] for s in self.args)))
            rng = S.carriers[self.res_sort]
            if len(rng) ** len(dom) > 4096:
                continue
            for vals in product(rng, repeat=len(dom)):
                out.append(self.lift(S, functions={self.symbol: dict(zip(dom, vals))}))
        return out


class GenericBijection(Expansion):
    """K_pi: a new bijection and its inverse; new elements get Z-indexed copies."""
    condition5_trusted = False
    provenance = "feuvrier route, verified per cube"

    def __init__(self, base, sort, window=2, name=None, inverse=None):
        if window < 0:
            raise ClassError("window must be >= 0")
        sig = extend_signature_generic(base.signature, Bijection(sort, name, inverse))
        super().__init__(base, sig)
        self.pi, self.inv = sig.functions[-2].name, sig.functions[-1].name
        self.sort, self.window = sort, window
        self.name = "genbij(%s,%s,window=%d)" % (base.name, sort, window)

    def contains(self, S):
        bad = self.base_contains(S)
        if bad:
            return bad
        fw, bw = S.functions[self.pi], S.functions[self.inv]
        for tab, other, tag in ((fw, bw, self.pi), (bw, fw, self.inv)):
            seen = {}
            for (x,), y in tab.items():
                if y in seen:
                    return Verdict(False, "%s not injective at %s,%s" % (tag, seen[y], x), (seen[y], x))
                seen[y] = x
                if other.get((y,), x) != x:
                    return Verdict(False, "%s and its inverse disagree at %s" % (tag, x), (x,))
        return Verdict(True)

    def _amalgam(self, E, A, B, jA, jB):
        r = self.base_amalgam(E, A, B, jA, jB)
        iA, iB = r.into_A.mapping, r.into_B.mapping
        fw, bw = {}, {}
        for S, m in ((A, iA), (B, iB)):
            fw.update({(m[x],): m[y] for (x,), y in S.functions[self.pi].items()})
            bw.update({(m[x],): m[y] for (x,), y in S.functions[self.inv].items()})
        img = set(iA.values()) | set(iB.values())
        D = r.amalgam
        w = self.window
        for t in [x for x in r.amalgam.carriers[self.sort] if x not in img]:
            chain = {0: t}
            for k in list(range(1, w + 1)) + list(range(-1, -w - 1, -1)):
                D, z = self.base.free_element(self.sort, D, "%s@%d" % (t, k))
                chain[k] = z
            for k in range(-w, w):
                fw[(chain[k],)] = chain[k + 1]
                bw[(chain[k + 1],)] = chain[k]
        out = self.lift(D, functions={self.pi: fw, self.inv: bw})
        return self.result(out, A, B, iA, iB)

    def generic_element(self, sort, A):
        B, x = self._base_generic(sort, A)
        return self.lift(B, functions={self.pi: A.functions[self.pi], self.inv: A.functions[self.inv]}), x

    def free_element(self, sort, A, base="x"):
        B, x = self.base.free_element(sort, self.reduct(A), base)
        return self.lift(B, functions={self.pi: A.functions[self.pi], self.inv: A.functions[self.inv]}), x

    def one_point_extensions(self, A):
        keep = {self.pi: A.functions[self.pi], self.inv: A.functions[self.inv]}
        return [(self.lift(B, functions=keep), x) for B, x in self.base.one_point_extensions(self.reduct(A))]

    def members(self, max_size):
        from itertools import permutations
        out = []
        for S in self.base.members(max_size):
            xs = S.carriers[self.sort]
            for perm in permutations(xs):
                fw = {(x,): y for x, y in zip(xs, perm)}
                bw = {(y,): x for x, y in zip(xs, perm)}
                out.append(self.lift(S, functions={self.pi: fw, self.inv: bw}))
        return dedup_iso(out)


class EquivalenceQuotient(Expansion):
    """K_E: an equivalence relation with its quotient sort and projection."""
    condition5_trusted = False
    provenance = "feuvrier route, verified per cube"

    def __init__(self, base, sort, relation=None, projection=None, quotient=None):
        sig = extend_signature_generic(base.signature, EquivalenceWithQuotient(sort, relation, projection, quotient))
        super().__init__(base, sig)
        self.sort = sort
        self.W = sig.sorts[-1].name
        self.rel = sig.relations[-1].name
        self.p = sig.functions[-1].name
        self.name = "eqquot(%s,%s)" % (base.name, sort)

    def reduct(self, S):
        return S.reduct(self.base.signature)

    def contains(self, S):
        bad = self.base_contains(S)
        if bad:
            return bad
        p = S.functions[self.p]
        xs = S.carriers[self.sort]
        for x in xs:
            if (x,) not in p:
                return Verdict(False, "%s(%s) undefined" % (self.p, x), (x,))
        E = S.relations[self.rel]
        for x in xs:
            for y in xs:
                if ((x, y) in E) != (p[(x,)] == p[(y,)]):
                    return Verdict(False, "%s(%s,%s) disagrees with the projection" % (self.rel, x, y), (x, y))
        return Verdict(True)

    def quotient_part(self, S):
        return S.carriers[self.W]

    def assemble(self, base_D, points, proj, name=None):
        xs = base_D.carriers[self.sort]
        E = {(x, y) for x in xs for y in xs if proj[x] == proj[y]}
        return self.lift(base_D, {self.rel: E}, {self.p: {(x,): proj[x] for x in xs}},
                         carriers={self.W: points}, name=name)

    def _amalgam(self, E, A, B, jA, jB):
        r = self.base_amalgam(E, A, B, jA, jB)
        iA, iB = dict(r.into_A.mapping), dict(r.into_B.mapping)
        points = list(A.carriers[self.W])
        used = set(r.amalgam.sort_of) | set(points)
        for w in A.carriers[self.W]:
            iA[w] = w
        back = {jB[e]: jA[e] for e in E.carriers[self.W]}
        for w in B.carriers[self.W]:
            if w in back:
                iB[w] = back[w]
            else:
                z = fresh_name(w, used)
                used.add(z)
                iB[w] = z
                points.append(z)
        proj = {}
        for S, m in ((A, iA), (B, iB)):
            for (x,), w in S.functions[self.p].items():
                proj[m[x]] = m[w]
        for x in r.amalgam.carriers[self.sort]:
            if x not in proj:
                z = fresh_name("[%s]" % x, used)
                used.add(z)
                points.append(z)
                proj[x] = z
        D = self.assemble(r.amalgam, points, proj)
        return self.result(D, A, B, iA, iB)

    def generic_element(self, sort, A):
        if sort == self.W:
            return self.free_element(sort, A, "w")
        B, x = self._base_generic(sort, A)
        proj = {y: w for (y,), w in A.functions[self.p].items()}
        points = list(A.carriers[self.W])
        used = set(B.sort_of) | set(points)
        for y in B.carriers[self.sort]:
            if y not in proj:
                z = fresh_name("[%s]" % y, used)
                used.add(z)
                points.append(z)
                proj[y] = z
        return self.assemble(B, points, proj, A.name), x

    def free_element(self, sort, A, base="x"):
        if sort != self.W:
            B, x = self.base.free_element(sort, self.reduct(A), base)
            proj = {y: w for (y,), w in A.functions[self.p].items()}
            w = fresh_name("[%s]" % x, set(B.sort_of) | set(A.carriers[self.W]))
            proj[x] = w
            return self.assemble(B, list(A.carriers[self.W]) + [w], proj, A.name), x
        x = fresh_name(base, set(A.sort_of))
        carriers = {s: list(v) for s, v in A.carriers.items()}
        carriers[self.W].append(x)
        return Structure(self.signature, carriers, A.relations, A.functions, name=A.name, check=False), x

    def one_point_extensions(self, A):
        out = [self.free_element(self.W, A, "w")]
        for B0, x in self.base.one_point_extensions(self.reduct(A)):
            proj = {y: w for (y,), w in A.functions[self.p].items()}
            for target in list(A.carriers[self.W]) + [None]:
                pr = dict(proj)
                points = list(A.carriers[self.W])
                used = set(B0.sort_of) | set(points)
                for y in B0.carriers[self.sort]:
                    if y in pr:
                        continue
                    if y == x and target is not None:
                        pr[y] = target
                    else:
                        z = fresh_name("[%s]" % y, used)
                        used.add(z)
                        points.append(z)
                        pr[y] = z
                out.append((self.assemble(B0, points, pr, A.name), x))
        return out

    def members(self, max_size):
        out = []
        for S in self.base.members(max_size):
            xs = list(S.carriers[self.sort])
            for blocks in _set_partitions(xs):
                for extra in (0, 1):
                    proj, points = {}, []
                    for i, blk in enumerate(blocks):
                        points.append("w%d" % i)
                        for y in blk:
                            proj[y] = "w%d" % i
                    points += ["w%d" % (len(blocks) + k) for k in range(extra)]
                    out.append(self.assemble(S, points, proj))
        return dedup_iso(out)


def _labellings(K0, F, max_size):
    """All K0-members with F's element names that are isomorphic to F."""
    from itertools import permutations
    seen, out = set(), []
    xs = F.elements
    for perm in permutations(xs):
        G = F.rename(dict(zip(xs, perm)))
        k = G.key()
        if k not in seen:
            seen.add(k)
            out.append(G)
    # other members on the same number of elements
    return out


def _set_partitions(xs):
    if not xs:
        yield []
        return
    head, rest = xs[0], xs[1:]
    for part in _set_partitions(rest):
        yield [[head]] + part
        for i in range(len(part)):
            yield part[:i] + [[head] + part[i]] + part[i + 1:]


# parameterization ----------------------------------------------------------------

class Parameterized(ClassHandle):
    """Structures with a parameter sort whose fibers are K0-members.

    Fibers are lazy: an object outside the core of fiber p carries no
    p-indexed entries, standing for a free generator of that fiber.
    """
    condition5_trusted = False
    provenance = "per-parameter cube completion, verified per cube"

    def __init__(self, K0, KP, catalogue=None):
        self.K0, self.KP = K0, KP
        super().__init__(parameterize_signature(K0.signature, KP.signature))
        self.P = KP.signature.sorts[0].name
        self.name = "param(%s,%s)" % (K0.name, KP.name)
        self.lazy = not K0.signature.is_relational
        self.locally_finite = K0.locally_finite and KP.locally_finite
        self.catalogue = catalogue
        self.obj_functions = [f.name for f in K0.signature.functions]
        self.obj_relations = [r.name for r in K0.signature.relations]

    # views ------------------------------------------------------------------

    def params(self, S):
        return S.carriers[self.P]

    def objects(self, S):
        return [x for s in self.K0.signature.sort_names for x in S.carriers[s]]

    def fiber(self, S, p):
        carriers = {s: S.carriers[s] for s in self.K0.signature.sort_names}
        rels = {r: {t[1:] for t in S.relations[r] if t[0] == p} for r in self.obj_relations}
        funs = {f: {a[1:]: v for a, v in S.functions[f].items() if a[0] == p} for f in self.obj_functions}
        return Structure(self.K0.signature, carriers, rels, funs, name=self.K0.name, check=False)

    def fiber_core(self, S, p):
        F = self.fiber(S, p)
        if not self.lazy:
            return set(F.elements)
        return core_elements(F)

    def parameter_part(self, S):
        rels = {r.name: S.relations[r.name] for r in self.KP.signature.relations}
        funs = {f.name: S.functions[f.name] for f in self.KP.signature.functions}
        return Structure(self.KP.signature, {self.P: S.carriers[self.P]}, rels, funs, name=self.KP.name, check=False)

    def assemble(self, ppart, obj_carriers, fibers, name=None):
        carriers = {s: list(v) for s, v in obj_carriers.items()}
        carriers[self.P] = list(ppart.carriers[self.P])
        rels = {r: set(v) for r, v in ppart.relations.items()}
        funs = {f: dict(v) for f, v in ppart.functions.items()}
        for r in self.obj_relations:
            rels[r] = set()
        for f in self.obj_functions:
            funs[f] = {}
        for p, F in fibers.items():
            for r in self.obj_relations:
                rels[r] |= {(p,) + t for t in F.relations[r]}
            for f in self.obj_functions:
                funs[f].update({(p,) + a: v for a, v in F.functions[f].items()})
        return Structure(self.signature, carriers, rels, funs, name=name or self.name, check=False)

    def make(self, params, fibers=None, objects=(), name=None):
        """Build from K0-structures per parameter; objects not in a fiber are free there."""
        fibers = dict(fibers or {})
        objs = {s: [] for s in self.K0.signature.sort_names}
        seen = set()
        for F in list(fibers.values()):
            for s in F.signature.sort_names:
                for x in F.carriers[s]:
                    if x not in seen:
                        seen.add(x)
                        objs[s].append(x)
        for x in objects:
            if x not in seen:
                seen.add(x)
                objs[self.K0.signature.sort_names[0]].append(x)
        pp = Structure(self.KP.signature, {self.P: list(params)}, name=self.KP.name)
        return self.assemble(pp, objs, fibers, name)

    # membership -------------------------------------------------------------

    @property
    def forbidden(self):
        return []

    def contains(self, S):
        bad = self._sig_check(S)
        if bad:
            return bad
        v = self.KP.contains(self.parameter_part(S))
        if not v:
            return Verdict(False, "parameter part: %s" % v.reason, v.witness)
        for p in self.params(S):
            v = self.K0.contains(self.fiber(S, p))
            if not v:
                return Verdict(False, "fiber %s: %s" % (p, v.reason), (p,))
        return Verdict(True)

    def constants_structure(self):
        return self.assemble(self.KP.constants_structure(), {s: [] for s in self.K0.signature.sort_names}, {})

    def normalize_base(self, E, A, B, jA, jB):
        return E, jA, jB

    # amalgamation -------------------------------------------------------------

    def _amalgam(self, E, A, B, jA, jB):
        P = self.P
        pr = self.KP.free_amalgam(self.parameter_part(E), self.parameter_part(A), self.parameter_part(B),
                                  {e: jA[e] for e in E.carriers[P]}, {e: jB[e] for e in E.carriers[P]},
                                  check=False)
        PD = pr.amalgam
        iA = {p: pr.into_A(p) for p in A.carriers[P]}
        iB = {p: pr.into_B(p) for p in B.carriers[P]}
        used = set(PD.sort_of)
        objs = {s: [] for s in self.K0.signature.sort_names}

        def add(base, sort):
            z = fresh_name(base, used)
            used.add(z)
            objs[sort].append(z)
            return z

        for x in self.objects(A):
            iA[x] = add(x, A.sort_of[x])
        back = {jB[e]: jA[e] for e in E.elements}
        for y in self.objects(B):
            iB[y] = iA[back[y]] if y in back else add(y, B.sort_of[y])
        fibers = {}
        base_params = {jA[e]: jB[e] for e in E.carriers[P]}
        objE = [e for e in E.elements if E.sort_of[e] != P]
        for p in sorted(PD.carriers[P], key=PD.position.get):
            srcA = [a for a in A.carriers[P] if iA[a] == p]
            srcB = [b for b in B.carriers[P] if iB[b] == p]
            if srcA and srcA[0] in base_params:
                a, b = srcA[0], base_params[srcA[0]]
                e = [x for x in E.carriers[P] if jA[x] == a][0]
                r = self.K0.free_amalgam(self.fiber(E, e), self.fiber(A, a), self.fiber(B, b),
                                         {o: jA[o] for o in objE}, {o: jB[o] for o in objE}, check=False)
                ren = {}
                for x in self.objects(A):
                    ren[r.into_A(x)] = iA[x]
                for y in self.objects(B):
                    ren[r.into_B(y)] = iB[y]
                for z in r.amalgam.elements:
                    if z not in ren:
                        ren[z] = add(z, r.amalgam.sort_of[z])
                fibers[p] = r.amalgam.rename(ren)
            elif srcA:
                fibers[p] = self.fiber(A, srcA[0]).rename(iA)
            elif srcB:
                fibers[p] = self.fiber(B, srcB[0]).rename(iB)
            else:
                C = self.K0.constants_structure()
                ren = {z: add(z + "@" + p, C.sort_of[z]) for z in C.elements}
                fibers[p] = C.rename(ren)
        D = self.assemble(PD, objs, fibers)
        return self.result(D, A, B, iA, iB)

    # extensions ----------------------------------------------------------------

    def new_parameter(self, A, base="q"):
        PB, q0 = self.KP.generic_element(self.P, self.parameter_part(A))
        q = fresh_name(base, set(A.sort_of) | set(PB.sort_of))
        PB = PB.rename({q0: q})
        used = set(A.sort_of) | set(PB.sort_of)
        objs = {s: list(A.carriers[s]) for s in self.K0.signature.sort_names}
        fibers = {p: self.fiber(A, p) for p in A.carriers[self.P]}
        C = self.K0.constants_structure()
        ren = {}
        for z in C.elements:
            nz = fresh_name("%s@%s" % (z, q), used)
            used.add(nz)
            ren[z] = nz
            objs[C.sort_of[z]].append(nz)
        fibers[q] = C.rename(ren)
        return self.assemble(PB, objs, fibers, A.name), q

    def generic_element(self, sort, A):
        if sort == self.P:
            return self.new_parameter(A)
        return self.free_element(sort, A)

    def free_element(self, sort, A, base="x"):
        if sort == self.P:
            return self.new_parameter(A)
        return ClassHandle.free_element(self, sort, A, base)

    def one_point_extensions(self, A):
        if self.catalogue is not None:
            return self.catalogue(self, A)
        out = [self.new_parameter(A)]
        if not self.lazy:
            out += self.relational_object_extensions(A)
        else:
            out += self.lazy_object_extensions(A)
        return out

    def relational_object_extensions(self, A):
        out = []
        ps = list(A.carriers[self.P])
        for sort in self.K0.signature.sort_names:
            B0, x = ClassHandle.free_element(self, sort, A)
            per = []
            for p in ps:
                exts = [F.rename({y: x}) for F, y in self.K0.one_point_extensions(self.fiber(A, p))
                        if F.sort_of.get(y) == sort]
                per.append(exts)
            for choice in product(*per):
                fibers = dict(zip(ps, choice))
                objs = {s: list(B0.carriers[s]) for s in self.K0.signature.sort_names}
                out.append((self.assemble(self.parameter_part(A), objs, fibers, A.name), x))
        return out

    def join_fibers(self, A, x, joined, identify=None):
        """A plus x made core in the fibers listed in joined.

        identify = (p, a, q, c) also equates x +_p a with x +_q c.
        """
        used = set(A.sort_of) | {x}
        objs = {s: list(A.carriers[s]) for s in self.K0.signature.sort_names}
        sort = self.K0.signature.sort_names[0]
        objs[sort].append(x)
        fibers = {}
        for p in A.carriers[self.P]:
            F = self.fiber(A, p)
            F, _ = self.K0.free_element(sort, F, x) if x not in F.sort_of else (F, x)
            fibers[p] = F
        made = {}
        for p in joined:
            F = fibers[p]
            core = core_elements(F)
            C = F.induced(core)
            line = self.K0.space([x]) if hasattr(self.K0, "space") else None
            if line is None:
                raise ClassError("joining fibers needs a vector-space object class")
            zero = C.value("zero", ())
            r = self.K0.free_amalgam(self.K0.space([]), C, line, {"0": zero}, {"0": "0"}, check=False)
            ren = {r.into_A(y): y for y in C.elements}
            ren[r.into_B(x)] = x
            for z in r.amalgam.elements:
                if z not in ren:
                    nz = fresh_name("%s@%s" % (z, p), used)
                    used.add(nz)
                    ren[z] = nz
                    objs[sort].append(nz)
            G = r.amalgam.rename(ren)
            rest = [y for y in F.elements if y not in G.sort_of]
            fibers[p] = Structure(self.K0.signature, {sort: list(G.carriers[sort]) + rest}, {}, G.functions,
                                  check=False)
            made[p] = G
        if identify:
            p, a, q, c = identify
            u = made[p].value("plus", (x, a))
            w = made[q].value("plus", (x, c))
            fibers[q] = fibers[q].rename({w: u})
            objs[sort].remove(w)
        B = self.assemble(self.parameter_part(A), objs, fibers, A.name)
        return B, x

    def lazy_object_extensions(self, A, max_identifications=1):
        out = []
        x = fresh_name("x", set(A.sort_of))
        ps = list(A.carriers[self.P])
        for k in range(len(ps) + 1):
            for joined in combinations(ps, k):
                out.append(self.join_fibers(A, x, joined))
        if max_identifications:
            out += self.identification_extensions(A, x)
        return out

    def identification_extensions(self, A, x=None):
        out = []
        x = x or fresh_name("x", set(A.sort_of))
        ps = list(A.carriers[self.P])
        for p, q in combinations(ps, 2):
            Sp = sorted(core_elements(self.fiber(A, p)), key=A.position.get)
            Sq = sorted(core_elements(self.fiber(A, q)), key=A.position.get)
            zp, zq = A.value(self.obj_functions[0], (p,)), A.value(self.obj_functions[0], (q,))
            for a in Sp:
                for c in Sq:
                    if a == zp or c == zq:
                        continue
                    out.append(self.join_fibers(A, x, (p, q), (p, a, q, c)))
        return out

    def members(self, max_size, max_params=2):
        """Small members over a plain set of parameters.

        Relational object classes: every labelled choice of K0-members on a
        shared object set.  Lazy classes: disjoint copies of one K0-member.
        """
        out = []
        for n_p in range(max_params + 1):
            ps = ["p%d" % i for i in range(n_p)]
            PP = Structure(self.KP.signature, {self.P: ps}, name=self.KP.name)
            if not self.KP.contains(PP):
                continue
            for F in self.K0.members(max_size):
                if not self.lazy:
                    labelled = _labellings(self.K0, F, max_size)
                    for choice in product(labelled, repeat=n_p):
                        out.append(self.assemble(PP, dict(F.carriers), dict(zip(ps, choice))))
                elif n_p and len(F) * n_p <= max_size:
                    fibers = {}
                    objs = {s: [] for s in self.K0.signature.sort_names}
                    for p in ps:
                        G = F.rename({z: "%s@%s" % (z, p) for z in F.elements})
                        fibers[p] = G
                        for srt in G.carriers:
                            objs[srt] += G.carriers[srt]
                    out.append(self.assemble(PP, objs, fibers))
        return dedup_iso(out)

    def complete_cube(self, cube):
        return default_cube(self, cube)

    def close_relations(self, carriers, rels):
        return rels


# constructors ----------------------------------------------------------------------

def add_generic_predicate(cls, sort, arity=1, name=None):
    return GenericPredicate(cls, sort, arity, name)


def add_generic_function(cls, args, result, depth=1, name=None):
    return GenericFunction(cls, args, result, depth, name)


def add_generic_bijection(cls, sort, window=2, name=None):
    return GenericBijection(cls, sort, window, name)


def add_equivalence_with_quotient(cls, sort, **names):
    return EquivalenceQuotient(cls, sort, **names)


def add_generic_substructure(cls, sort=None):
    return GenericSubstructure(cls, sort)


def parameterize_class(K0, KP, catalogue=None):
    if K0.signature.parameter_sort is not None:
        raise ClassError("nested parameterization is not supported")
    if len(KP.signature.sorts) != 1:
        raise ClassError("parameter class must be one-sorted")
    return Parameterized(K0, KP, catalogue)
