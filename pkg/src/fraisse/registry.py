"""Class expressions: `graphs`, `vec(3)`, `param(graphs, sets)`, `genfun(abgrp, (G G)->G, depth=2)`."""

import re

from .classes import abelian_groups, equivalence_relations, graphs, sets, vector_spaces
from .combinators import (add_equivalence_with_quotient, add_generic_bijection, add_generic_function,
                          add_generic_predicate, add_generic_substructure, parameterize_class)

__all__ = ["parse_class", "ClassExprError", "resolver_for"]


class ClassExprError(ValueError):
    pass


_TOKEN = re.compile(r"\s*(->|[(),=]|[A-Za-z_][A-Za-z0-9_\-]*|\d+)")


def _tokens(text):
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ClassExprError("unexpected character %r at offset %d" % (text[pos], pos))
        out.append(m.group(1))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text):
        self.toks = _tokens(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, want=None):
        t = self.peek()
        if t is None or (want is not None and t != want):
            raise ClassExprError("expected %s, found %s" % (want or "a token", t or "end of input"))
        self.i += 1
        return t

    def node(self):
        """name | name(arg, ...); args are nodes, (sorts)->sort, or key=value."""
        name = self.take()
        if name in ("(", ")", ",", "=", "->"):
            raise ClassExprError("expected a class name, found %r" % name)
        args, kw = [], {}
        if self.peek() == "(":
            self.take("(")
            while self.peek() != ")":
                if self.peek() == "(":
                    self.take("(")
                    sorts = []
                    while self.peek() != ")":
                        sorts.append(self.take())
                    self.take(")")
                    self.take("->")
                    args.append(("arrow", tuple(sorts), self.take()))
                elif self.i + 1 < len(self.toks) and self.toks[self.i + 1] == "=":
                    key = self.take()
                    self.take("=")
                    kw[key] = self.take()
                else:
                    args.append(self.node())
                if self.peek() == ",":
                    self.take(",")
                elif self.peek() != ")":
                    raise ClassExprError("expected ',' or ')', found %s" % self.peek())
            self.take(")")
        return (name, args, kw)


def _int(v, what):
    try:
        return int(v)
    except (TypeError, ValueError):
        raise ClassExprError("%s must be an integer, got %r" % (what, v)) from None


def _atom(node):
    name, args, kw = node
    if args or kw:
        raise ClassExprError("expected a sort name, got %s(...)" % name)
    return name


def build(node, param_sort=False):
    if node[0] == "arrow":
        raise ClassExprError("unexpected signature arrow")
    name, args, kw = node
    if name == "sets":
        return sets("P" if param_sort else "S")
    if name == "graphs":
        return graphs()
    if name == "vec":
        if len(args) != 1:
            raise ClassExprError("vec takes one argument: the prime q")
        return vector_spaces(_int(_atom(args[0]), "q"))
    if name == "abgrp":
        return abelian_groups()
    if name == "eqrel-raw":
        return equivalence_relations()
    if name == "eqrel-q":
        K = add_equivalence_with_quotient(sets(), "S")
        K.name = "eqrel-q"
        return K
    if name == "param":
        if len(args) != 2:
            raise ClassExprError("param takes two classes")
        return parameterize_class(build(args[0]), build(args[1], param_sort=True))
    if name in ("genpred", "gensub", "genbij", "eqquot"):
        if not args:
            raise ClassExprError("%s needs a base class" % name)
        base = build(args[0])
        sort = _atom(args[1]) if len(args) > 1 else base.signature.sort_names[0]
        if not base.signature.has_sort(sort):
            raise ClassExprError("unknown sort %s in %s" % (sort, base.name))
        if name == "genpred":
            return add_generic_predicate(base, sort, _int(kw.get("arity", 1), "arity"))
        if name == "gensub":
            return add_generic_substructure(base, sort)
        if name == "genbij":
            return add_generic_bijection(base, sort, _int(kw.get("window", 2), "window"))
        return add_equivalence_with_quotient(base, sort)
    if name == "genfun":
        if len(args) != 2 or args[1][0] != "arrow":
            raise ClassExprError("genfun takes a base class and (sorts)->sort")
        base = build(args[0])
        _, sorts, res = args[1]
        for s in sorts + (res,):
            if not base.signature.has_sort(s):
                raise ClassExprError("unknown sort %s in %s" % (s, base.name))
        return add_generic_function(base, sorts, res, _int(kw.get("depth", 1), "depth"))
    raise ClassExprError("unknown class %r" % name)


def parse_class(text):
    p = _Parser(text)
    node = p.node()
    if p.peek() is not None:
        raise ClassExprError("trailing input after class expression: %s" % p.peek())
    try:
        return build(node)
    except ClassExprError:
        raise
    except ValueError as exc:
        raise ClassExprError(str(exc)) from None


def resolver_for(cls):
    """Resolver for `(sig-ref name)` in structure files: the class's own name, or a registry name."""
    def resolve(name):
        if name in (cls.name, "", None):
            return cls.signature
        return parse_class(name).signature
    return resolve
