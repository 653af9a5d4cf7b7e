"""Quantifier-free formulas: AST, three-valued evaluation and flattening."""

from dataclasses import dataclass, field
from itertools import product

from .sexpr import Atom, ParseError, SList, dumps, parse_one
from .structures import App, BudgetExceeded, StructureError, Var, evaluate_term, term_sort

__all__ = [
    "Eq", "Rel", "Not", "And", "Or", "TRUE", "FALSE",
    "evaluate", "free_vars", "check_forbidden", "ForbiddenReport",
    "flatten_parameterized", "Flattening", "FormulaError",
    "parse_formula", "format_formula", "literals", "is_literal_conjunction",
]


class FormulaError(ValueError):
    pass


@dataclass(frozen=True)
class Eq:
    left: object
    right: object


@dataclass(frozen=True)
class Rel:
    symbol: str
    args: tuple


@dataclass(frozen=True)
class Not:
    body: object


@dataclass(frozen=True)
class And:
    items: tuple = ()


@dataclass(frozen=True)
class Or:
    items: tuple = ()


TRUE = And(())
FALSE = Or(())


def term_vars(t, out):
    if isinstance(t, Var):
        out[t.name] = t.sort
    else:
        for a in t.args:
            term_vars(a, out)
    return out


def free_vars(phi, out=None):
    """Ordered mapping name -> sort."""
    out = {} if out is None else out
    if isinstance(phi, Eq):
        term_vars(phi.left, out)
        term_vars(phi.right, out)
    elif isinstance(phi, Rel):
        for a in phi.args:
            term_vars(a, out)
    elif isinstance(phi, Not):
        free_vars(phi.body, out)
    else:
        for x in phi.items:
            free_vars(x, out)
    return out


def check_sorts(phi, signature):
    if isinstance(phi, Eq):
        a, b = term_sort(phi.left, signature), term_sort(phi.right, signature)
        if a != b:
            raise FormulaError("equality between sorts %s and %s" % (a, b))
    elif isinstance(phi, Rel):
        sym = signature.relation(phi.symbol)
        if len(sym.args) != len(phi.args):
            raise FormulaError("%s expects %d arguments" % (phi.symbol, len(sym.args)))
        for t, s in zip(phi.args, sym.args):
            if term_sort(t, signature) != s:
                raise FormulaError("sort mismatch in %s" % phi.symbol)
    elif isinstance(phi, Not):
        check_sorts(phi.body, signature)
    else:
        for x in phi.items:
            check_sorts(x, signature)


def evaluate(phi, structure, assignment):
    """True, False, or None when some term hits the frontier."""
    if isinstance(phi, Eq):
        a = evaluate_term(phi.left, structure, assignment)
        b = evaluate_term(phi.right, structure, assignment)
        if a is None or b is None:
            return None
        return a == b
    if isinstance(phi, Rel):
        vals = [evaluate_term(t, structure, assignment) for t in phi.args]
        if any(v is None for v in vals):
            return None
        return structure.holds(phi.symbol, tuple(vals))
    if isinstance(phi, Not):
        v = evaluate(phi.body, structure, assignment)
        return None if v is None else not v
    if isinstance(phi, And):
        seen_none = False
        for x in phi.items:
            v = evaluate(x, structure, assignment)
            if v is False:
                return False
            seen_none = seen_none or v is None
        return None if seen_none else True
    if isinstance(phi, Or):
        seen_none = False
        for x in phi.items:
            v = evaluate(x, structure, assignment)
            if v is True:
                return True
            seen_none = seen_none or v is None
        return None if seen_none else False
    raise FormulaError("not a formula: %r" % (phi,))


def assignments(structure, variables):
    names = list(variables)
    pools = [structure.carriers[variables[n]] for n in names]
    for vals in product(*pools):
        yield dict(zip(names, vals))


@dataclass
class ForbiddenReport:
    clean: bool
    formula: object = None
    assignment: dict = None
    checked: int = 0


def check_forbidden(structure, forbidden, budget=None):
    """First (formula, assignment) satisfied in structure, exhaustively."""
    checked = 0
    for phi in forbidden:
        for env in assignments(structure, free_vars(phi)):
            checked += 1
            if budget is not None and checked > budget:
                raise BudgetExceeded("forbidden-formula sweep", budget)
            if evaluate(phi, structure, env) is True:
                return ForbiddenReport(False, phi, env, checked)
    return ForbiddenReport(True, checked=checked)


# literal conjunctions -------------------------------------------------------

def is_atom(phi):
    return isinstance(phi, (Eq, Rel))


def is_literal(phi):
    return is_atom(phi) or (isinstance(phi, Not) and is_atom(phi.body))


def literals(phi):
    if is_literal(phi):
        return [phi]
    if isinstance(phi, And) and all(is_literal(x) for x in phi.items):
        return list(phi.items)
    raise FormulaError("input is not a conjunction of literals")


def is_literal_conjunction(phi):
    try:
        literals(phi)
        return True
    except FormulaError:
        return False


# flattening ---------------------------------------------------------------

@dataclass
class Flattening:
    phi_P: And
    components: dict            # parameter variable name -> And; key None for parameter-free literals
    introduced: list = field(default_factory=list)   # (Var, defining term) in introduction order

    def conjunction(self):
        items = list(self.phi_P.items)
        for k in self.components:
            items.extend(self.components[k].items)
        return And(tuple(items))

    def introduced_vars(self):
        return [v for v, _ in self.introduced]


def _sort_of(t, sig):
    if isinstance(t, Var):
        return t.sort
    return sig.function(t.symbol).result


def flatten_parameterized(phi, signature, dedup=True):
    """Split a literal conjunction into a parameter part and one part per parameter.

    Every non-variable parameter term below an object symbol is named by a
    fresh k variable (defined in phi_P); object subterms whose parameter
    differs from the one their context uses are named by fresh z variables
    (defined in the part of their own parameter).  The conjunction of all
    parts, with the new variables existentially quantified, is equivalent to
    phi.
    """
    P = signature.parameter_sort
    if P is None:
        raise FormulaError("flattening needs a parameterized signature")
    lits = literals(phi)
    check_sorts(And(tuple(lits)), signature)
    used = set(free_vars(And(tuple(lits))))
    counters = {"z": 0, "k": 0}
    memo = {}
    introduced = []
    phi_P, parts = [], {}

    def fresh(prefix, sort):
        while True:
            name = "%s%d" % (prefix, counters[prefix])
            counters[prefix] += 1
            if name not in used:
                used.add(name)
                return Var(name, sort)

    def name_term(t, prefix, sort):
        if dedup and t in memo:
            return memo[t]
        v = fresh(prefix, sort)
        memo[t] = v
        introduced.append((v, t))
        return v

    def param_term(t):
        # parameter-sort term -> variable
        if isinstance(t, Var):
            return t
        t2 = App(t.symbol, tuple(param_term(a) for a in t.args))
        v = name_term(("k", t2), "k", P)
        if not any(isinstance(x, Eq) and x.left == v for x in phi_P):
            phi_P.append(Eq(v, t2))
        return v

    def object_term(t, nu):
        """Rewrite t to use only parameter nu, naming foreign subterms."""
        if isinstance(t, Var):
            return t
        p = param_term(t.args[0])
        rest = tuple(object_term(a, p) for a in t.args[1:])
        if p == nu:
            return App(t.symbol, (p,) + rest)
        return name_object(App(t.symbol, (p,) + rest), p)

    def name_object(t, p):
        key = ("z", t)
        if dedup and key in memo:
            return memo[key]
        v = fresh("z", _sort_of(t, signature))
        memo[key] = v
        introduced.append((v, t))
        parts.setdefault(p.name, []).append(Eq(v, t))
        return v

    def literal_param(atom):
        terms = [atom.left, atom.right] if isinstance(atom, Eq) else list(atom.args)
        if isinstance(atom, Rel) and signature.relation(atom.symbol).args[0] == P \
                and any(s != P for s in signature.relation(atom.symbol).args):
            return param_term(atom.args[0])
        for t in terms:
            if isinstance(t, App) and _sort_of(t, signature) != P:
                return param_term(t.args[0])
        return None

    for lit in lits:
        neg = isinstance(lit, Not)
        atom = lit.body if neg else lit
        wrap = (lambda a: Not(a)) if neg else (lambda a: a)
        sorts = [_sort_of(t, signature) for t in ((atom.left, atom.right) if isinstance(atom, Eq) else atom.args)]
        if all(s == P for s in sorts):
            # pure parameter atom
            if isinstance(atom, Eq):
                phi_P.append(wrap(Eq(atom.left, atom.right)))
            else:
                phi_P.append(wrap(atom))
            continue
        nu = literal_param(atom)
        if nu is None:
            parts.setdefault(None, []).append(lit)
            continue
        if isinstance(atom, Eq):
            new = Eq(object_term(atom.left, nu), object_term(atom.right, nu))
        else:
            args = (nu,) + tuple(object_term(a, nu) for a in atom.args[1:])
            new = Rel(atom.symbol, args)
        parts.setdefault(nu.name, []).append(wrap(new))

    comps = {k: And(tuple(v)) for k, v in parts.items()}
    return Flattening(And(tuple(phi_P)), comps, introduced)


def params_in(t, P, out):
    if isinstance(t, Var):
        if t.sort == P:
            out.add(t.name)
    else:
        for a in t.args:
            params_in(a, P, out)
    return out


def atom_parameters(atom, P):
    terms = [atom.left, atom.right] if isinstance(atom, Eq) else list(atom.args)
    out = set()
    for t in terms:
        params_in(t, P, out)
    return out


# text format ----------------------------------------------------------------

def term_to_sexpr(t):
    if isinstance(t, Var):
        return t.name
    return ["fun", t.symbol] + [term_to_sexpr(a) for a in t.args]


def formula_to_sexpr(phi):
    if isinstance(phi, Eq):
        return ["=", term_to_sexpr(phi.left), term_to_sexpr(phi.right)]
    if isinstance(phi, Rel):
        return ["rel", phi.symbol] + [term_to_sexpr(a) for a in phi.args]
    if isinstance(phi, Not):
        return ["not", formula_to_sexpr(phi.body)]
    if isinstance(phi, And):
        return ["and"] + [formula_to_sexpr(x) for x in phi.items]
    return ["or"] + [formula_to_sexpr(x) for x in phi.items]


def format_formula(phi):
    return dumps(formula_to_sexpr(phi))


def _perr(node, msg):
    return ParseError(msg, getattr(node, "line", None) or 1, getattr(node, "col", None) or 1)


def formula_from_sexpr(node, signature, sorts=None):
    """Parse a formula, inferring variable sorts from argument positions."""
    sorts = dict(sorts or {})

    def term(n, expected):
        if isinstance(n, Atom):
            name = str(n)
            if expected is not None:
                if sorts.get(name, expected) != expected:
                    raise _perr(n, "variable %s used at sorts %s and %s" % (name, sorts[name], expected))
                sorts[name] = expected
                return Var(name, expected)
            ph = ["?", name, n]
            return ph
        if not (isinstance(n, SList) and n and n[0] == "fun" and len(n) >= 2):
            raise _perr(n, "expected a variable or (fun f args...)")
        fname = str(n[1])
        if not signature.is_function(fname):
            raise _perr(n, "unknown function symbol %s" % fname)
        sym = signature.function(fname)
        if len(n) - 2 != len(sym.args):
            raise _perr(n, "%s expects %d arguments" % (fname, len(sym.args)))
        if expected is not None and sym.result != expected:
            raise _perr(n, "%s has sort %s, expected %s" % (fname, sym.result, expected))
        return App(fname, tuple(term(a, s) for a, s in zip(n[2:], sym.args)))

    def sort_hint(t):
        if isinstance(t, Var):
            return t.sort
        if isinstance(t, App):
            return signature.function(t.symbol).result
        return sorts.get(t[1])

    def form(n):
        if isinstance(n, Atom):
            if n == "true":
                return TRUE
            if n == "false":
                return FALSE
            raise _perr(n, "expected a formula")
        if not (isinstance(n, SList) and n and isinstance(n[0], Atom)):
            raise _perr(n, "expected a formula")
        head = str(n[0])
        if head == "=":
            if len(n) != 3:
                raise _perr(n, "= takes two terms")
            a, b = term(n[1], None), term(n[2], None)
            return ["=", a, b, n]
        if head == "rel":
            if len(n) < 2 or not signature.is_relation(str(n[1])):
                raise _perr(n, "unknown relation symbol %s" % (n[1] if len(n) > 1 else ""))
            sym = signature.relation(str(n[1]))
            if len(n) - 2 != len(sym.args):
                raise _perr(n, "%s expects %d arguments" % (sym.name, len(sym.args)))
            return Rel(sym.name, tuple(term(a, s) for a, s in zip(n[2:], sym.args)))
        if head == "not":
            if len(n) != 2:
                raise _perr(n, "not takes one formula")
            return Not(form(n[1]))
        if head in ("and", "or"):
            items = tuple(form(x) for x in n[1:])
            return And(items) if head == "and" else Or(items)
        raise _perr(n, "unknown connective %s" % head)

    raw = form(node)

    def eqs(x):
        if isinstance(x, list):
            yield x
        elif isinstance(x, Not):
            yield from eqs(x.body)
        elif isinstance(x, (And, Or)):
            for i in x.items:
                yield from eqs(i)

    equalities = list(eqs(raw))
    changed = True
    while changed:
        changed = False
        for _, a, b, _n in equalities:
            s = sort_hint(a) or sort_hint(b)
            for t in (a, b):
                if s is not None and isinstance(t, list) and t[1] not in sorts:
                    sorts[t[1]] = s
                    changed = True

    def fix(t):
        if isinstance(t, list):
            if t[1] not in sorts:
                raise _perr(t[2], "cannot infer the sort of variable %s" % t[1])
            return Var(t[1], sorts[t[1]])
        return t

    def resolve(x):
        if isinstance(x, list):
            a, b = fix(x[1]), fix(x[2])
            if sort_hint(a) != sort_hint(b):
                raise _perr(x[3], "equality between sorts %s and %s" % (sort_hint(a), sort_hint(b)))
            return Eq(a, b)
        if isinstance(x, Not):
            return Not(resolve(x.body))
        if isinstance(x, (And, Or)):
            return type(x)(tuple(resolve(i) for i in x.items))
        return x

    return resolve(raw)


def parse_formula(text, signature, sorts=None):
    node, _ = parse_one(text)
    return formula_from_sexpr(node, signature, sorts)
