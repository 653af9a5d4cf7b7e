"""Finite multi-sorted structures, morphisms, closure and embedding search.

Elements are opaque string ids, unique across all sorts of a structure.
Function tables may be partial; every sort-correct argument tuple missing
from a table is on the frontier, and the text format lists it explicitly.
"""

from dataclasses import dataclass
from itertools import permutations, product

from .sexpr import Atom, ParseError, SList, dumps, parse
from .signature import Signature, signature_from_sexpr

__all__ = [
    "Structure", "StructureError", "Morphism", "BudgetExceeded",
    "Var", "App", "evaluate_term",
    "generated", "generated_substructure",
    "find_morphisms", "find_embeddings", "is_isomorphic_over", "canonical_key",
    "format_structure", "parse_structure", "format_morphism", "parse_morphism",
    "fresh_name",
]


class StructureError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    def __init__(self, what, budget):
        super().__init__("budget exceeded in %s (budget %s)" % (what, budget))
        self.what = what
        self.budget = budget


def fresh_name(base, used):
    """First of base, base', base'', ... not in used."""
    name = base
    while name in used:
        name += "'"
    return name


class Structure:
    """A finite structure over a Signature.

    carriers: mapping sort -> iterable of element ids (order is kept)
    relations: mapping symbol -> iterable of tuples
    functions: mapping symbol -> mapping argument tuple -> element
    """

    def __init__(self, signature, carriers, relations=None, functions=None, name=None,
                 header=(), check=True):
        self.signature = signature
        self.name = name
        self.header = tuple(header)
        self.carriers = {s: tuple(carriers.get(s, ())) for s in signature.sort_names}
        self.sort_of = {}
        for s, elems in self.carriers.items():
            for x in elems:
                if x in self.sort_of:
                    raise StructureError("element %s occurs twice" % x)
                self.sort_of[x] = s
        if check:
            unknown = set(carriers) - set(signature.sort_names)
            if unknown:
                raise StructureError("unknown sorts: %s" % ", ".join(sorted(unknown)))
        relations = relations or {}
        functions = functions or {}
        self.relations = {r.name: frozenset(tuple(t) for t in relations.get(r.name, ()))
                          for r in signature.relations}
        self.functions = {f.name: {tuple(k): v for k, v in functions.get(f.name, {}).items()}
                          for f in signature.functions}
        if check:
            self._validate(relations, functions)
        self._cache = {}

    def _validate(self, relations, functions):
        sig = self.signature
        for r in list(relations) + list(functions):
            if not sig.has_symbol(r):
                raise StructureError("unknown symbol %s" % r)
        for r in sig.relations:
            for t in self.relations[r.name]:
                self._check_tuple(r.name, t, r.args)
        for f in sig.functions:
            for args, v in self.functions[f.name].items():
                self._check_tuple(f.name, args, f.args)
                if self.sort_of.get(v) != f.result:
                    raise StructureError("%s%s = %s: value is not an element of sort %s"
                                         % (f.name, _show(args), v, f.result))

    def _check_tuple(self, sym, t, sorts):
        if len(t) != len(sorts):
            raise StructureError("%s%s: wrong arity" % (sym, _show(t)))
        for x, s in zip(t, sorts):
            if x not in self.sort_of:
                raise StructureError("%s%s: unknown element %s" % (sym, _show(t), x))
            if self.sort_of[x] != s:
                raise StructureError("%s%s: %s is not of sort %s" % (sym, _show(t), x, s))

    # basic access ---------------------------------------------------------

    @property
    def elements(self):
        got = self._cache.get("elements")
        if got is None:
            got = tuple(x for s in self.signature.sort_names for x in self.carriers[s])
            self._cache["elements"] = got
        return got

    @property
    def position(self):
        got = self._cache.get("position")
        if got is None:
            got = {x: i for i, x in enumerate(self.elements)}
            self._cache["position"] = got
        return got

    def __len__(self):
        return len(self.sort_of)

    def __contains__(self, x):
        return x in self.sort_of

    def sort_of_element(self, x):
        return self.sort_of.get(x)

    def value(self, f, args):
        return self.functions[f].get(tuple(args))

    def holds(self, r, args):
        return tuple(args) in self.relations[r]

    def argument_tuples(self, f):
        sym = self.signature.function(f)
        return product(*(self.carriers[s] for s in sym.args))

    def frontier(self, f):
        table = self.functions[f]
        return [t for t in self.argument_tuples(f) if t not in table]

    def frontier_size(self):
        total = 0
        for f in self.signature.functions:
            n = 1
            for s in f.args:
                n *= len(self.carriers[s])
            total += n - len(self.functions[f.name])
        return total

    def is_total(self):
        return self.frontier_size() == 0

    def key(self):
        """Hashable value identifying the structure up to equality."""
        got = self._cache.get("key")
        if got is None:
            got = (tuple((s, frozenset(v)) for s, v in self.carriers.items()),
                   tuple(sorted(self.relations.items())),
                   tuple((f, frozenset(t.items())) for f, t in sorted(self.functions.items())))
            self._cache["key"] = got
        return got

    def __eq__(self, other):
        return isinstance(other, Structure) and self.signature == other.signature \
            and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        parts = ["%s:%d" % (s, len(v)) for s, v in self.carriers.items()]
        return "<Structure %s>" % " ".join(parts)

    def __str__(self):
        return format_structure(self)

    # indexes used by closure and search ------------------------------------

    def _entries_by_arg(self):
        got = self._cache.get("entries_by_arg")
        if got is None:
            got = {x: [] for x in self.sort_of}
            for f, table in self.functions.items():
                for args, v in table.items():
                    for x in set(args):
                        got[x].append((f, args, v))
            self._cache["entries_by_arg"] = got
        return got

    def _rel_by_elem(self):
        got = self._cache.get("rel_by_elem")
        if got is None:
            got = {x: [] for x in self.sort_of}
            for r, tuples in self.relations.items():
                for t in tuples:
                    for x in set(t):
                        got[x].append((r, t))
            self._cache["rel_by_elem"] = got
        return got

    def _frontier_by_elem(self):
        got = self._cache.get("frontier_by_elem")
        if got is None:
            got = {x: [] for x in self.sort_of}
            for f in self.functions:
                for t in self.frontier(f):
                    for x in set(t):
                        got[x].append((f, t))
            self._cache["frontier_by_elem"] = got
        return got

    def _rel_holes(self):
        got = self._cache.get("rel_holes")
        if got is None:
            got = {}
            for r, tuples in self.relations.items():
                for t in tuples:
                    for i in range(len(t)):
                        got.setdefault((r, i, t[:i] + (None,) + t[i + 1:]), []).append(t[i])
            self._cache["rel_holes"] = got
        return got

    # derived structures ------------------------------------------------------

    def induced(self, subset):
        """Substructure on subset; entries whose value leaves subset are dropped."""
        subset = set(subset)
        missing = subset - set(self.sort_of)
        if missing:
            raise StructureError("unknown elements: %s" % ", ".join(sorted(missing)))
        carriers = {s: [x for x in v if x in subset] for s, v in self.carriers.items()}
        relations = {r: [t for t in ts if all(x in subset for x in t)]
                     for r, ts in self.relations.items()}
        functions = {f: {a: v for a, v in tab.items() if v in subset and all(x in subset for x in a)}
                     for f, tab in self.functions.items()}
        return Structure(self.signature, carriers, relations, functions, name=self.name, check=False)

    def rename(self, mapping):
        """Copy with elements renamed by mapping (identity on missing keys)."""
        m = lambda x: mapping.get(x, x)
        carriers = {s: [m(x) for x in v] for s, v in self.carriers.items()}
        relations = {r: [tuple(m(x) for x in t) for t in ts] for r, ts in self.relations.items()}
        functions = {f: {tuple(m(x) for x in a): m(v) for a, v in tab.items()}
                     for f, tab in self.functions.items()}
        return Structure(self.signature, carriers, relations, functions, name=self.name, check=False)

    def reduct(self, signature):
        """Forget every symbol and sort not in signature."""
        carriers = {s: self.carriers[s] for s in signature.sort_names}
        relations = {r.name: self.relations[r.name] for r in signature.relations}
        functions = {f.name: self.functions[f.name] for f in signature.functions}
        return Structure(signature, carriers, relations, functions, name=self.name, check=False)

    def expand(self, signature, carriers=None, relations=None, functions=None):
        """Copy over a larger signature, adding the given interpretations."""
        c = {s: list(v) for s, v in self.carriers.items()}
        for s, v in (carriers or {}).items():
            c.setdefault(s, []).extend(x for x in v if x not in self.sort_of)
        r = {k: set(v) for k, v in self.relations.items()}
        for k, v in (relations or {}).items():
            r.setdefault(k, set()).update(tuple(t) for t in v)
        f = {k: dict(v) for k, v in self.functions.items()}
        for k, v in (functions or {}).items():
            f.setdefault(k, {}).update(v)
        return Structure(signature, c, r, f, name=self.name)

    def with_name(self, name, header=None):
        out = Structure(self.signature, self.carriers, self.relations, self.functions,
                        name=name, header=self.header if header is None else header, check=False)
        return out


def _show(t):
    return "(" + ", ".join(str(x) for x in t) + ")"


# terms ------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str
    sort: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class App:
    symbol: str
    args: tuple = ()

    def __str__(self):
        if not self.args:
            return self.symbol
        return "%s(%s)" % (self.symbol, ", ".join(str(a) for a in self.args))


def term_sort(term, signature):
    if isinstance(term, Var):
        return term.sort
    sym = signature.function(term.symbol)
    if len(sym.args) != len(term.args):
        raise StructureError("%s expects %d arguments" % (term.symbol, len(sym.args)))
    for a, s in zip(term.args, sym.args):
        got = term_sort(a, signature)
        if got != s:
            raise StructureError("sort mismatch: %s has sort %s, %s expects %s"
                                 % (a, got, term.symbol, s))
    return sym.result


def evaluate_term(term, structure, assignment):
    """Value of term, or None when evaluation reaches the frontier."""
    if isinstance(term, Var):
        if term.name not in assignment:
            raise StructureError("unbound variable %s" % term.name)
        v = assignment[term.name]
        got = structure.sort_of_element(v)
        if got != term.sort:
            raise StructureError("variable %s of sort %s bound to %r of sort %s"
                                 % (term.name, term.sort, v, got))
        return v
    sym = structure.signature.function(term.symbol)
    if len(sym.args) != len(term.args):
        raise StructureError("%s expects %d arguments" % (term.symbol, len(sym.args)))
    vals = []
    for a, s in zip(term.args, sym.args):
        v = evaluate_term(a, structure, assignment)
        if v is None:
            return None
        if structure.sort_of_element(v) != s:
            raise StructureError("sort mismatch in argument %s of %s" % (a, term.symbol))
        vals.append(v)
    return structure.value(term.symbol, tuple(vals))


# closure ------------------------------------------------------------------------

def generated(D, S):
    """Smallest subset of D containing S and closed under defined applications."""
    closed = set(S)
    missing = closed - set(D.sort_of)
    if missing:
        raise StructureError("unknown elements: %s" % ", ".join(sorted(missing)))
    todo = list(closed)
    for f in D.signature.constants:
        v = D.value(f.name, ())
        if v is not None and v not in closed:
            closed.add(v)
            todo.append(v)
    by_arg = D._entries_by_arg()
    while todo:
        x = todo.pop()
        for _, args, v in by_arg[x]:
            if v not in closed and all(a in closed for a in args):
                closed.add(v)
                todo.append(v)
    return closed


def generated_substructure(D, S):
    return D.induced(generated(D, S))


# morphisms --------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Morphism:
    source: Structure
    target: Structure
    mapping: dict
    embedding: bool = False

    def __call__(self, x):
        return self.mapping[x]

    def image(self, xs=None):
        xs = self.source.elements if xs is None else xs
        return {self.mapping[x] for x in xs}

    def problems(self, as_embedding=None):
        """List of violated conditions (empty when the map is valid)."""
        emb = self.embedding if as_embedding is None else as_embedding
        A, B, h = self.source, self.target, self.mapping
        out = []
        for x in A.elements:
            if x not in h:
                out.append("%s is not mapped" % x)
            elif B.sort_of.get(h[x]) != A.sort_of[x]:
                out.append("%s -> %s changes sort" % (x, h[x]))
        if out:
            return out
        for r, ts in A.relations.items():
            for t in ts:
                if tuple(h[x] for x in t) not in B.relations[r]:
                    out.append("%s%s not preserved" % (r, _show(t)))
        for f, tab in A.functions.items():
            for args, v in tab.items():
                got = B.value(f, tuple(h[x] for x in args))
                if got != h[v]:
                    out.append("%s%s = %s not preserved" % (f, _show(args), v))
        if emb:
            inv = {}
            for x, y in h.items():
                if y in inv:
                    out.append("%s and %s collapse to %s" % (inv[y], x, y))
                inv.setdefault(y, x)
            for r, ts in B.relations.items():
                for t in ts:
                    if all(y in inv for y in t):
                        pre = tuple(inv[y] for y in t)
                        if pre not in A.relations[r]:
                            out.append("%s%s not reflected" % (r, _show(pre)))
            for f in A.functions:
                for t in A.frontier(f):
                    if B.value(f, tuple(h[x] for x in t)) is not None:
                        out.append("image not closed: %s%s defined in target" % (f, _show(t)))
        return out

    def is_valid(self, as_embedding=None):
        return not self.problems(as_embedding)

    def then(self, other):
        """self followed by other."""
        m = {x: other.mapping[y] for x, y in self.mapping.items()}
        return Morphism(self.source, other.target, m, self.embedding and other.embedding)

    def restrict(self, sub):
        return Morphism(sub, self.target, {x: self.mapping[x] for x in sub.elements}, self.embedding)


def identity(A, sub=None):
    sub = A if sub is None else sub
    return Morphism(sub, A, {x: x for x in sub.elements}, True)


# search ------------------------------------------------------------------------

class _Search:
    """Backtracking with propagation through function entries."""

    def __init__(self, A, B, injective, embedding, budget):
        self.A, self.B = A, B
        self.injective = injective or embedding
        self.embedding = embedding
        self.budget = budget
        self.steps = 0
        self.map, self.inv, self.trail = {}, {}, []
        self.a_fun = A._entries_by_arg()
        self.a_rel = A._rel_by_elem()
        self.a_front = A._frontier_by_elem() if embedding else None
        self.b_rel = B._rel_by_elem() if embedding else None
        self.b_holes = B._rel_holes()
        self.by_sort = B.carriers

    def _assign(self, x, y, queue):
        if self.A.sort_of[x] != self.B.sort_of.get(y):
            return False
        if self.injective and y in self.inv:
            return False
        self.map[x] = y
        if self.injective:
            self.inv[y] = x
        self.trail.append(x)
        queue.append(x)
        return True

    def _undo(self, mark):
        while len(self.trail) > mark:
            x = self.trail.pop()
            y = self.map.pop(x)
            if self.injective:
                del self.inv[y]

    def assign(self, x, y):
        m = self.map
        queue = []
        if x in m:
            if m[x] != y:
                return False
        elif not self._assign(x, y, queue):
            return False
        A, B = self.A, self.B
        while queue:
            x = queue.pop()
            for r, t in self.a_rel[x]:
                if all(z in m for z in t) and tuple(m[z] for z in t) not in B.relations[r]:
                    return False
            if self.embedding:
                inv = self.inv
                for r, t in self.b_rel[m[x]]:
                    if all(z in inv for z in t) and tuple(inv[z] for z in t) not in A.relations[r]:
                        return False
                for f, t in self.a_front[x]:
                    if all(z in m for z in t) and B.value(f, tuple(m[z] for z in t)) is not None:
                        return False
            for f, args, v in self.a_fun[x]:
                if all(z in m for z in args):
                    w = B.value(f, tuple(m[z] for z in args))
                    if w is None:
                        return False
                    if v in m:
                        if m[v] != w:
                            return False
                    elif not self._assign(v, w, queue):
                        return False
        return True

    def start(self, seed):
        A, B = self.A, self.B
        for f in A.signature.constants:
            a = A.value(f.name, ())
            b = B.value(f.name, ())
            if a is None:
                if self.embedding and b is not None:
                    return False
                continue
            if b is None or not self.assign(a, b):
                return False
        for x, y in (seed or {}).items():
            if not self.assign(x, y):
                return False
        return True

    def order(self):
        A = self.A
        placed = set(self.map)
        rest = [x for x in A.elements if x not in placed]
        links = {x: set() for x in A.elements}
        for x in A.elements:
            for _, t in self.a_rel[x]:
                links[x].update(t)
            for _, args, v in self.a_fun[x]:
                links[x].update(args)
                links[x].add(v)
                links[v].add(x)
        out = []
        score = {x: len(links[x] & placed) for x in rest}
        pos = A.position
        while rest:
            best = max(rest, key=lambda x: (score[x], len(links[x]), -pos[x]))
            rest.remove(best)
            out.append(best)
            for y in links[best]:
                if y in score:
                    score[y] += 1
        return out

    def candidates(self, x):
        m = self.map
        for r, t in self.a_rel[x]:
            if sum(1 for z in t if z == x) == 1 and all(z in m for z in t if z != x):
                i = t.index(x)
                key = (r, i, tuple(None if z == x else m[z] for z in t))
                return self.b_holes.get(key, [])
        return self.by_sort[self.A.sort_of[x]]

    def run(self, order, i=0):
        while i < len(order) and order[i] in self.map:
            i += 1
        if i == len(order):
            yield dict(self.map)
            return
        x = order[i]
        for y in list(self.candidates(x)):
            self.steps += 1
            if self.budget is not None and self.steps > self.budget:
                raise BudgetExceeded("morphism search", self.budget)
            mark = len(self.trail)
            if self.assign(x, y):
                yield from self.run(order, i + 1)
            self._undo(mark)


def find_morphisms(A, B, seed=None, injective=False, embedding=False, budget=None):
    """Yield every morphism A -> B extending seed, as Morphism objects.

    With embedding=True the maps are injective, reflect relations and have
    closed images (frontier tuples of A stay undefined in B).
    """
    if A.signature != B.signature:
        raise StructureError("morphism search needs a common signature")
    s = _Search(A, B, injective, embedding, budget)
    if not s.start(seed):
        return
    for m in s.run(s.order()):
        yield Morphism(A, B, m, embedding)


def find_embeddings(A, B, seed=None, budget=None):
    return find_morphisms(A, B, seed=seed, embedding=True, budget=budget)


def first(it):
    for x in it:
        return x
    return None


def is_isomorphic_over(A, B, fix=None, budget=None):
    """An isomorphism A -> B extending the partial map fix, or None."""
    if A.signature != B.signature:
        return None
    for s in A.signature.sort_names:
        if len(A.carriers[s]) != len(B.carriers[s]):
            return None
    if sum(len(t) for t in A.relations.values()) != sum(len(t) for t in B.relations.values()):
        return None
    if sum(len(t) for t in A.functions.values()) != sum(len(t) for t in B.functions.values()):
        return None
    return first(find_embeddings(A, B, seed=fix, budget=budget))


# canonical form for small structures ------------------------------------------

def _invariant(S, x):
    rel = S._rel_by_elem()[x]
    fun = S._entries_by_arg()[x]
    inc = sorted((r, tuple(i for i, z in enumerate(t) if z == x)) for r, t in rel)
    finc = sorted((f, tuple(i for i, z in enumerate(a) if z == x), v == x) for f, a, v in fun)
    vals = sorted(f for f, tab in S.functions.items() for a, v in tab.items() if v == x)
    return (S.sort_of[x], tuple(inc), tuple(finc), tuple(vals))


def canonical_key(S, limit=50000):
    """Isomorphism-invariant key; exact while the refined search stays under limit."""
    classes = {}
    for x in S.elements:
        classes.setdefault(_invariant(S, x), []).append(x)
    keys = sorted(classes)
    blocks = [classes[k] for k in keys]
    count = 1
    for b in blocks:
        for i in range(2, len(b) + 1):
            count *= i
    if count > limit:
        raise BudgetExceeded("canonical form", limit)
    best = None
    for perms in product(*(permutations(b) for b in blocks)):
        order = [x for p in perms for x in p]
        idx = {x: i for i, x in enumerate(order)}
        rels = tuple(sorted((r, tuple(sorted(tuple(idx[z] for z in t) for t in ts)))
                            for r, ts in S.relations.items()))
        funs = tuple(sorted((f, tuple(sorted((tuple(idx[z] for z in a), idx[v]) for a, v in tab.items())))
                            for f, tab in S.functions.items()))
        cand = (rels, funs)
        if best is None or cand < best:
            best = cand
    return (tuple(keys), tuple(len(b) for b in blocks), best)


# text format ------------------------------------------------------------------

def _tuple_key(S):
    pos = S.position
    return lambda t: tuple(pos[x] for x in t)


def structure_to_sexpr(S):
    form = ["structure"]
    if S.name is not None:
        form.append(["sig-ref", S.name])
    for s in S.signature.sort_names:
        form.append(["carrier", s] + list(S.carriers[s]))
    key = _tuple_key(S)
    for r in S.signature.relations:
        ts = sorted(S.relations[r.name], key=key)
        if ts:
            form.append(["rel", r.name] + [list(t) for t in ts])
    for f in S.signature.functions:
        tab = S.functions[f.name]
        if tab:
            form.append(["fun", f.name] + [[list(a), v] for a, v in sorted(tab.items(), key=lambda kv: key(kv[0]))])
    for f in S.signature.functions:
        ts = S.frontier(f.name)
        if ts:
            form.append(["frontier", f.name] + [list(t) for t in sorted(ts, key=key)])
    return form


def format_structure(S, header=None):
    lines = list(S.header if header is None else header)
    form = structure_to_sexpr(S)
    body = "(" + form[0] + "".join("\n  " + dumps(part) for part in form[1:]) + ")"
    return "".join(h + "\n" for h in lines) + body + "\n"


def _err(node, msg):
    return ParseError(msg, getattr(node, "line", None) or 1, getattr(node, "col", None) or 1)


def structure_from_sexpr(form, signature=None, resolver=None, header=()):
    if not (isinstance(form, SList) and form and form[0] == "structure"):
        raise _err(form, "expected (structure ...)")
    items = list(form[1:])
    name = None
    sig = signature
    if items and isinstance(items[0], SList) and items[0] and items[0][0] == "signature":
        sig = signature_from_sexpr(items.pop(0))
    if items and isinstance(items[0], SList) and items[0] and items[0][0] == "sig-ref":
        ref = items.pop(0)
        if len(ref) != 2:
            raise _err(ref, "sig-ref takes one name")
        name = str(ref[1])
        if sig is None:
            if resolver is None:
                raise _err(ref, "no resolver for sig-ref %s" % name)
            try:
                sig = resolver(name)
            except Exception as exc:
                raise _err(ref, "cannot resolve sig-ref %s: %s" % (name, exc)) from None
    if sig is None:
        raise _err(form, "structure needs a signature")
    carriers, rels, funs, front = {}, {}, {}, {}
    where = {}

    def elem(node, sort=None):
        if not isinstance(node, Atom):
            raise _err(node, "expected an element id")
        x = str(node)
        if x not in where:
            raise _err(node, "unknown element id %s" % x)
        if sort is not None and where[x] != sort:
            raise _err(node, "element %s has sort %s, expected %s" % (x, where[x], sort))
        return x

    def tup(node, sorts):
        if not isinstance(node, SList):
            raise _err(node, "expected a tuple")
        if len(node) != len(sorts):
            raise _err(node, "expected %d components" % len(sorts))
        return tuple(elem(n, s) for n, s in zip(node, sorts))

    for item in items:
        if not (isinstance(item, SList) and item and isinstance(item[0], Atom)):
            raise _err(item, "expected a (carrier|rel|fun|frontier ...) form")
        head = str(item[0])
        if head == "carrier":
            if len(item) < 2 or not sig.has_sort(str(item[1])):
                raise _err(item, "carrier needs a known sort")
            s = str(item[1])
            if s in carriers:
                raise _err(item, "duplicate carrier for sort %s" % s)
            carriers[s] = []
            for node in item[2:]:
                if not isinstance(node, Atom):
                    raise _err(node, "expected an element id")
                if str(node) in where:
                    raise _err(node, "duplicate element id %s" % node)
                where[str(node)] = s
                carriers[s].append(str(node))
        elif head == "rel":
            if len(item) < 2 or not sig.is_relation(str(item[1])):
                raise _err(item, "rel needs a known relation symbol")
            sym = sig.relation(str(item[1]))
            rels.setdefault(sym.name, set()).update(tup(n, sym.args) for n in item[2:])
        elif head == "fun":
            if len(item) < 2 or not sig.is_function(str(item[1])):
                raise _err(item, "fun needs a known function symbol")
            sym = sig.function(str(item[1]))
            tab = funs.setdefault(sym.name, {})
            for entry in item[2:]:
                if not (isinstance(entry, SList) and len(entry) == 2):
                    raise _err(entry, "function entry must be (args value)")
                args = tup(entry[0], sym.args)
                if args in tab:
                    raise _err(entry, "duplicate entry %s%s" % (sym.name, _show(args)))
                tab[args] = elem(entry[1], sym.result)
        elif head == "frontier":
            if len(item) < 2 or not sig.is_function(str(item[1])):
                raise _err(item, "frontier needs a known function symbol")
            sym = sig.function(str(item[1]))
            front.setdefault(sym.name, set()).update(tup(n, sym.args) for n in item[2:])
        else:
            raise _err(item, "unknown structure form %s" % head)
    S = Structure(sig, carriers, rels, funs, name=name, header=header)
    for f in sig.functions:
        declared = front.get(f.name, set())
        clash = declared & set(S.functions[f.name])
        if clash:
            raise StructureError("frontier tuple %s%s also has a table entry"
                                 % (f.name, _show(sorted(clash)[0])))
        missing = set(S.frontier(f.name)) - declared
        if missing:
            raise StructureError("function %s has no entry for %s and it is not declared on the frontier"
                                 % (f.name, _show(sorted(missing, key=_tuple_key(S))[0])))
    return S


def parse_structure(text, signature=None, resolver=None):
    forms, comments = parse(text)
    if len(forms) != 1:
        raise ParseError("expected exactly one structure form, found %d" % len(forms), 1, 1)
    return structure_from_sexpr(forms[0], signature, resolver, header=comments)


def format_morphism(h):
    form = ["morphism"]
    for s in h.source.signature.sort_names:
        pairs = [[x, h.mapping[x]] for x in h.source.carriers[s]]
        if pairs:
            form.append(["map", s] + pairs)
    return dumps(form) + "\n"


def parse_morphism(text, source, target, embedding=False):
    forms, _ = parse(text)
    if len(forms) != 1 or not (isinstance(forms[0], SList) and forms[0] and forms[0][0] == "morphism"):
        raise ParseError("expected one (morphism ...) form", 1, 1)
    mapping = {}
    for item in forms[0][1:]:
        if not (isinstance(item, SList) and len(item) >= 2 and item[0] == "map"):
            raise _err(item, "expected (map <sort> (x y) ...)")
        for pair in item[2:]:
            if not (isinstance(pair, SList) and len(pair) == 2):
                raise _err(pair, "expected (x y)")
            x, y = str(pair[0]), str(pair[1])
            if x not in source:
                raise _err(pair[0], "unknown element id %s" % x)
            if y not in target:
                raise _err(pair[1], "unknown element id %s" % y)
            mapping[x] = y
    h = Morphism(source, target, mapping, embedding)
    bad = h.problems()
    if bad:
        raise StructureError("invalid morphism: " + "; ".join(bad[:3]))
    return h
