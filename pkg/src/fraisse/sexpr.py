"""Minimal s-expression reader and printer used by every text format.

Atoms are bare tokens or double-quoted strings.  Comments run from ``;`` to
the end of the line.  Parsed nodes remember where they started so that
errors further down the pipeline can point at a line and column.
"""

__all__ = ["Atom", "SList", "ParseError", "parse", "parse_one", "dumps", "quote"]


class ParseError(Exception):
    def __init__(self, message, line=None, col=None):
        self.message = message
        self.line = line
        self.col = col
        if line is not None:
            message = "line %d, column %d: %s" % (line, col, message)
        super().__init__(message)


class Atom(str):
    line = col = None
    quoted = False

    @staticmethod
    def at(text, line, col, quoted=False):
        a = Atom(text)
        a.line, a.col, a.quoted = line, col, quoted
        return a


class SList(list):
    line = col = None


_DELIMS = set('();"')


def _tokens(text):
    i, n = 0, len(text)
    line, col = 1, 1
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line, col = line + 1, 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch == ";":
            j = text.find("\n", i)
            j = n if j < 0 else j
            yield ("comment", text[i:j], line, col)
            col += j - i
            i = j
            continue
        if ch in "()":
            yield (ch, ch, line, col)
            i += 1
            col += 1
            continue
        if ch == '"':
            start_line, start_col = line, col
            buf = []
            i += 1
            col += 1
            while True:
                if i >= n:
                    raise ParseError("unterminated string", start_line, start_col)
                c = text[i]
                if c == "\\" and i + 1 < n:
                    buf.append(text[i + 1])
                    i += 2
                    col += 2
                    continue
                if c == '"':
                    i += 1
                    col += 1
                    break
                if c == "\n":
                    line, col = line + 1, 0
                buf.append(c)
                i += 1
                col += 1
            yield ("string", "".join(buf), start_line, start_col)
            continue
        j = i
        while j < n and not text[j].isspace() and text[j] not in _DELIMS:
            j += 1
        yield ("atom", text[i:j], line, col)
        col += j - i
        i = j


def parse(text):
    """Parse every top-level form; returns (forms, leading_comments)."""
    stack = [SList()]
    comments = []
    seen_form = False
    for kind, value, line, col in _tokens(text):
        if kind == "comment":
            if not seen_form and len(stack) == 1:
                comments.append(value)
            continue
        seen_form = True
        if kind == "(":
            node = SList()
            node.line, node.col = line, col
            stack.append(node)
        elif kind == ")":
            if len(stack) == 1:
                raise ParseError("unexpected ')'", line, col)
            node = stack.pop()
            stack[-1].append(node)
        else:
            stack[-1].append(Atom.at(value, line, col, quoted=(kind == "string")))
    if len(stack) > 1:
        node = stack[-1]
        raise ParseError("unclosed '('", node.line, node.col)
    return list(stack[0]), comments


def parse_one(text):
    forms, comments = parse(text)
    if len(forms) != 1:
        raise ParseError("expected exactly one form, found %d" % len(forms), 1, 1)
    return forms[0], comments


def quote(token):
    s = str(token)
    if s and not any(c.isspace() or c in _DELIMS or c == "\\" for c in s):
        return s
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def dumps(obj):
    if isinstance(obj, (list, tuple)):
        return "(" + " ".join(dumps(x) for x in obj) + ")"
    return quote(obj)
