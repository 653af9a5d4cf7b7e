"""Multi-sorted signatures and the language transformations applied to them."""

from dataclasses import dataclass, field

from .sexpr import Atom, ParseError, SList, dumps, parse_one

__all__ = [
    "Sort", "FunctionSymbol", "RelationSymbol", "Signature", "SignatureError",
    "Predicate", "Function", "Bijection", "EquivalenceWithQuotient",
    "parameterize_signature", "unparameterize_signature",
    "extend_signature_generic", "split_multi_output",
    "parse_signature", "format_signature",
]

KINDS = ("object", "parameter", "quotient")


class SignatureError(ValueError):
    pass


@dataclass(frozen=True)
class Sort:
    name: str
    kind: str = "object"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SignatureError("unknown sort kind %r" % (self.kind,))


@dataclass(frozen=True)
class FunctionSymbol:
    name: str
    args: tuple
    result: str

    @property
    def arity(self):
        return len(self.args)

    @property
    def is_constant(self):
        return not self.args


@dataclass(frozen=True)
class RelationSymbol:
    name: str
    args: tuple

    @property
    def arity(self):
        return len(self.args)


@dataclass(frozen=True)
class Signature:
    sorts: tuple = ()
    functions: tuple = ()
    relations: tuple = ()
    _index: dict = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "sorts", tuple(self.sorts))
        object.__setattr__(self, "functions", tuple(self.functions))
        object.__setattr__(self, "relations", tuple(self.relations))
        names = [s.name for s in self.sorts]
        if len(set(names)) != len(names):
            raise SignatureError("duplicate sort names")
        if sum(1 for s in self.sorts if s.kind == "parameter") > 1:
            raise SignatureError("at most one parameter sort is allowed")
        symbols = [f.name for f in self.functions] + [r.name for r in self.relations]
        dup = {n for n in symbols if symbols.count(n) > 1}
        if dup:
            raise SignatureError("duplicate symbol names: %s" % ", ".join(sorted(dup)))
        known = set(names)
        for f in self.functions:
            for s in f.args + (f.result,):
                if s not in known:
                    raise SignatureError("symbol %s uses unknown sort %s" % (f.name, s))
        for r in self.relations:
            if not r.args:
                raise SignatureError("relation %s must have arity >= 1" % r.name)
            for s in r.args:
                if s not in known:
                    raise SignatureError("symbol %s uses unknown sort %s" % (r.name, s))
        index = {"sort": {s.name: s for s in self.sorts},
                 "fun": {f.name: f for f in self.functions},
                 "rel": {r.name: r for r in self.relations}}
        object.__setattr__(self, "_index", index)

    def sort(self, name):
        try:
            return self._index["sort"][name]
        except KeyError:
            raise SignatureError("unknown sort %r" % (name,)) from None

    def function(self, name):
        try:
            return self._index["fun"][name]
        except KeyError:
            raise SignatureError("unknown function symbol %r" % (name,)) from None

    def relation(self, name):
        try:
            return self._index["rel"][name]
        except KeyError:
            raise SignatureError("unknown relation symbol %r" % (name,)) from None

    def has_sort(self, name):
        return name in self._index["sort"]

    def has_symbol(self, name):
        return name in self._index["fun"] or name in self._index["rel"]

    def is_function(self, name):
        return name in self._index["fun"]

    def is_relation(self, name):
        return name in self._index["rel"]

    @property
    def sort_names(self):
        return tuple(s.name for s in self.sorts)

    @property
    def parameter_sort(self):
        for s in self.sorts:
            if s.kind == "parameter":
                return s.name
        return None

    @property
    def object_sorts(self):
        return tuple(s.name for s in self.sorts if s.kind != "parameter")

    @property
    def constants(self):
        return tuple(f for f in self.functions if f.is_constant)

    @property
    def is_relational(self):
        return not self.functions

    def symbol_names(self):
        return [f.name for f in self.functions] + [r.name for r in self.relations]

    def reduct(self, drop_symbols=(), drop_sorts=()):
        drop_symbols, drop_sorts = set(drop_symbols), set(drop_sorts)
        return Signature(
            [s for s in self.sorts if s.name not in drop_sorts],
            [f for f in self.functions if f.name not in drop_symbols],
            [r for r in self.relations if r.name not in drop_symbols],
        )

    def __str__(self):
        return format_signature(self)


def _one_sorted(sig):
    return len(sig.sorts) == 1


def parameterize_signature(sig_O, sig_P):
    """Add the parameter sort and index every object symbol by a parameter.

    The parameter argument is always the first positional argument and the
    lifted symbol keeps its original name.
    """
    if sig_O.parameter_sort is not None:
        raise SignatureError("object signature already has a parameter sort")
    if not _one_sorted(sig_P):
        raise SignatureError("parameter signature must be one-sorted")
    P = sig_P.sorts[0].name
    if sig_O.has_sort(P):
        raise SignatureError("parameter sort name %r clashes with an object sort" % P)
    clash = set(sig_O.symbol_names()) & set(sig_P.symbol_names())
    if clash:
        raise SignatureError("symbol names shared by both signatures: %s" % ", ".join(sorted(clash)))
    sorts = [Sort(s.name, s.kind) for s in sig_O.sorts] + [Sort(P, "parameter")]
    functions = [FunctionSymbol(f.name, (P,) + f.args, f.result) for f in sig_O.functions]
    functions += list(sig_P.functions)
    relations = [RelationSymbol(r.name, (P,) + r.args) for r in sig_O.relations]
    relations += list(sig_P.relations)
    return Signature(sorts, functions, relations)


def unparameterize_signature(sig):
    """Inverse of parameterize_signature: returns (sig_O, sig_P)."""
    P = sig.parameter_sort
    if P is None:
        raise SignatureError("signature has no parameter sort")
    obj_f, par_f, obj_r, par_r = [], [], [], []
    for f in sig.functions:
        if f.result == P and all(a == P for a in f.args):
            par_f.append(f)
        elif f.args and f.args[0] == P:
            obj_f.append(FunctionSymbol(f.name, f.args[1:], f.result))
        else:
            raise SignatureError("symbol %s is not a lifted symbol" % f.name)
    for r in sig.relations:
        if all(a == P for a in r.args):
            par_r.append(r)
        elif r.args[0] == P:
            obj_r.append(RelationSymbol(r.name, r.args[1:]))
        else:
            raise SignatureError("symbol %s is not a lifted symbol" % r.name)
    sig_O = Signature([s for s in sig.sorts if s.name != P], obj_f, obj_r)
    sig_P = Signature([Sort(P, "object")], par_f, par_r)
    return sig_O, sig_P


def split_multi_output(name, args, results):
    """One single-valued symbol per output coordinate of f: prod args -> prod results."""
    if len(results) == 1:
        return [FunctionSymbol(name, tuple(args), results[0])]
    return [FunctionSymbol("%s_%d" % (name, i), tuple(args), r) for i, r in enumerate(results)]


# generic-symbol descriptors -------------------------------------------------

@dataclass(frozen=True)
class Predicate:
    sort: str
    arity: int = 1
    name: str = None


@dataclass(frozen=True)
class Function:
    args: tuple
    result: str
    name: str = None


@dataclass(frozen=True)
class Bijection:
    sort: str
    name: str = None
    inverse: str = None


@dataclass(frozen=True)
class EquivalenceWithQuotient:
    sort: str
    relation: str = None
    projection: str = None
    quotient: str = None


def _pick(sig, wanted, default, taken=()):
    """Explicit names must be free; default names get a numeric suffix if taken."""
    used = set(sig.symbol_names()) | set(sig.sort_names) | set(taken)
    if wanted is not None:
        if wanted in used:
            raise SignatureError("name collision: %r already used" % wanted)
        return wanted
    name, k = default, 2
    while name in used:
        name = "%s%d" % (default, k)
        k += 1
    return name


def extend_signature_generic(sig, symbol_kind):
    if isinstance(symbol_kind, Predicate):
        sig.sort(symbol_kind.sort)
        if symbol_kind.arity < 1:
            raise SignatureError("predicate arity must be >= 1")
        name = _pick(sig, symbol_kind.name, "U")
        return Signature(sig.sorts, sig.functions,
                         sig.relations + (RelationSymbol(name, (symbol_kind.sort,) * symbol_kind.arity),))
    if isinstance(symbol_kind, Function):
        for s in tuple(symbol_kind.args) + (symbol_kind.result,):
            sig.sort(s)
        name = _pick(sig, symbol_kind.name, "f")
        return Signature(sig.sorts, sig.functions + (FunctionSymbol(name, tuple(symbol_kind.args), symbol_kind.result),),
                         sig.relations)
    if isinstance(symbol_kind, Bijection):
        sig.sort(symbol_kind.sort)
        fwd = _pick(sig, symbol_kind.name, "pi")
        inv = _pick(sig, symbol_kind.inverse, fwd + "inv", taken=(fwd,))
        return Signature(sig.sorts, sig.functions + (FunctionSymbol(fwd, (symbol_kind.sort,), symbol_kind.sort),
                                                     FunctionSymbol(inv, (symbol_kind.sort,), symbol_kind.sort)),
                         sig.relations)
    if isinstance(symbol_kind, EquivalenceWithQuotient):
        sig.sort(symbol_kind.sort)
        W = _pick(sig, symbol_kind.quotient, "W")
        E = _pick(sig, symbol_kind.relation, "E", taken=(W,))
        p = _pick(sig, symbol_kind.projection, "p", taken=(W, E))
        return Signature(sig.sorts + (Sort(W, "quotient"),),
                         sig.functions + (FunctionSymbol(p, (symbol_kind.sort,), W),),
                         sig.relations + (RelationSymbol(E, (symbol_kind.sort, symbol_kind.sort)),))
    raise SignatureError("unknown generic-symbol descriptor %r" % (symbol_kind,))


# text format -----------------------------------------------------------------

def format_signature(sig):
    parts = ["signature"]
    for s in sig.sorts:
        parts.append(["sort", s.name, s.kind])
    for r in sig.relations:
        parts.append(["rel", r.name, list(r.args)])
    for f in sig.functions:
        parts.append(["fun", f.name, list(f.args), f.result])
    return dumps(parts)


def _expect(cond, node, msg):
    if not cond:
        raise ParseError(msg, getattr(node, "line", None), getattr(node, "col", None))


def signature_from_sexpr(form):
    _expect(isinstance(form, SList) and form and form[0] == "signature", form,
            "expected (signature ...)")
    sorts, funs, rels = [], [], []
    for item in form[1:]:
        _expect(isinstance(item, SList) and item and isinstance(item[0], Atom), item,
                "expected a (sort|rel|fun ...) form")
        head = item[0]
        try:
            if head == "sort":
                _expect(len(item) in (2, 3), item, "sort takes a name and an optional kind")
                sorts.append(Sort(str(item[1]), str(item[2]) if len(item) == 3 else "object"))
            elif head == "rel":
                _expect(len(item) == 3 and isinstance(item[2], SList), item, "rel takes a name and a sort list")
                rels.append(RelationSymbol(str(item[1]), tuple(str(a) for a in item[2])))
            elif head == "fun":
                _expect(len(item) == 4 and isinstance(item[2], SList), item,
                        "fun takes a name, an argument sort list and a result sort")
                funs.append(FunctionSymbol(str(item[1]), tuple(str(a) for a in item[2]), str(item[3])))
            else:
                _expect(False, item, "unknown signature form %r" % str(head))
        except SignatureError as exc:
            raise ParseError(str(exc), item.line, item.col) from None
    try:
        return Signature(sorts, funs, rels)
    except SignatureError as exc:
        raise ParseError(str(exc), form.line, form.col) from None


def parse_signature(text):
    form, _ = parse_one(text)
    return signature_from_sexpr(form)
