"""Finitely presented abelian groups with a Smith-normal-form word problem."""

from itertools import product
from math import prod

from .signature import FunctionSymbol, Signature, Sort
from .structures import Structure, StructureError

__all__ = ["smith_normal_form", "Presentation", "ABELIAN_SIGNATURE", "abelian_signature"]


def abelian_signature(sort="G"):
    return Signature([Sort(sort)],
                     [FunctionSymbol("zero", (), sort),
                      FunctionSymbol("plus", (sort, sort), sort),
                      FunctionSymbol("neg", (sort,), sort)])


ABELIAN_SIGNATURE = abelian_signature()


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(M):
    """Return (D, U, V) with U*M*V = D diagonal, U and V unimodular.

    The diagonal entries d_0 | d_1 | ... are non-negative.
    """
    m = len(M)
    n = len(M[0]) if m else 0
    A = [list(map(int, row)) for row in M]
    U, V = _identity(m), _identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for R in A:
            R[i], R[j] = R[j], R[i]
        for R in V:
            R[i], R[j] = R[j], R[i]

    def add_row(src, dst, k):
        # row dst += k * row src
        A[dst] = [a + k * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + k * b for a, b in zip(U[dst], U[src])]

    def add_col(src, dst, k):
        for R in A:
            R[dst] += k * R[src]
        for R in V:
            R[dst] += k * R[src]

    t = 0
    while t < min(m, n):
        nz = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            changed = False
            for i in range(t + 1, m):
                if A[i][t]:
                    q = A[i][t] // A[t][t]
                    add_row(t, i, -q)
                    if A[i][t]:
                        swap_rows(t, i)
                        changed = True
            for j in range(t + 1, n):
                if A[t][j]:
                    q = A[t][j] // A[t][t]
                    add_col(t, j, -q)
                    if A[t][j]:
                        swap_cols(t, j)
                        changed = True
            if changed:
                continue
            # enforce divisibility of the remaining block
            bad = [(i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % A[t][t]]
            if not bad:
                break
            add_row(bad[0][0], t, 1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
        t += 1
    return A, U, V


class Presentation:
    """Abelian group <generators | rows>, each row an integer relation.

    Elements are reduced coordinate tuples in the Smith basis; two words are
    equal exactly when their normal forms agree.
    """

    def __init__(self, generators, rows=(), sort="G"):
        self.generators = list(generators)
        self.rows = [list(map(int, r)) for r in rows]
        n = len(self.generators)
        for r in self.rows:
            if len(r) != n:
                raise StructureError("relator has %d columns, expected %d" % (len(r), n))
        self.sort = sort
        self.signature = abelian_signature(sort)
        if self.rows and n:
            D, _, V = smith_normal_form(self.rows)
            diag = [D[i][i] for i in range(min(len(D), n))]
        else:
            V, diag = _identity(n), []
        diag += [0] * (n - len(diag))
        self.V = V
        self.diag = diag
        self.keep = [i for i, d in enumerate(diag) if d != 1]
        self.moduli = tuple(diag[i] for i in self.keep)

    # word problem -------------------------------------------------------

    def reduce(self, y):
        return tuple(v % d if d else v for v, d in zip(y, self.moduli))

    def normal_form(self, word):
        """word: integer coefficient vector over the generators."""
        if len(word) != len(self.generators):
            raise StructureError("word has %d coefficients, expected %d" % (len(word), len(self.generators)))
        y = [sum(word[i] * self.V[i][j] for i in range(len(word))) for j in range(len(word))]
        return self.reduce([y[j] for j in self.keep])

    def generator(self, g):
        i = self.generators.index(g)
        return self.normal_form([int(j == i) for j in range(len(self.generators))])

    def equal(self, w1, w2):
        return self.normal_form(w1) == self.normal_form(w2)

    @property
    def invariants(self):
        return self.moduli

    @property
    def is_finite(self):
        return all(d != 0 for d in self.moduli)

    def order(self):
        return prod(self.moduli) if self.is_finite else None

    # structure-like interface for term evaluation -------------------------

    def sort_of_element(self, x):
        if isinstance(x, tuple) and len(x) == len(self.moduli) and self.reduce(x) == x:
            return self.sort
        return None

    def value(self, f, args):
        if f == "zero":
            return self.reduce([0] * len(self.moduli))
        if f == "plus":
            a, b = args
            return self.reduce([u + v for u, v in zip(a, b)])
        if f == "neg":
            (a,) = args
            return self.reduce([-u for u in a])
        raise StructureError("unknown function symbol %s" % f)

    def elements(self):
        if not self.is_finite:
            raise StructureError("infinite presentation has no finite element list")
        return [tuple(t) for t in product(*(range(d) for d in self.moduli))]

    def to_structure(self, names=None, name=None):
        """Table-backed copy of a finite presentation."""
        elems = self.elements()
        names = dict(names or {})
        used = set(names.values())
        label = {}
        for e in elems:
            if e in names:
                label[e] = names[e]
            else:
                base = "g" + "_".join(str(c) for c in e) if e else "0"
                while base in used:
                    base += "'"
                used.add(base)
                label[e] = base
        plus = {(label[a], label[b]): label[self.value("plus", (a, b))] for a in elems for b in elems}
        neg = {(label[a],): label[self.value("neg", (a,))] for a in elems}
        zero = {(): label[self.value("zero", ())]}
        return Structure(self.signature, {self.sort: [label[e] for e in elems]}, {},
                         {"plus": plus, "neg": neg, "zero": zero}, name=name)

    @classmethod
    def from_structure(cls, S, sort="G"):
        """Presentation with one generator per element and the addition table as relations."""
        gens = list(S.carriers[sort])
        idx = {g: i for i, g in enumerate(gens)}
        rows = []
        n = len(gens)
        for (a, b), c in S.functions["plus"].items():
            r = [0] * n
            r[idx[a]] += 1
            r[idx[b]] += 1
            r[idx[c]] -= 1
            if any(r):
                rows.append(r)
        z = S.value("zero", ())
        if z is not None:
            r = [0] * n
            r[idx[z]] = 1
            rows.append(r)
        return cls(gens, rows, sort)

    def free_sum(self, new_generator):
        """self (+) Z on one extra generator."""
        gens = self.generators + [new_generator]
        rows = [r + [0] for r in self.rows]
        return Presentation(gens, rows, self.sort)

    def __repr__(self):
        return "<Presentation %d generators, invariants %s>" % (len(self.generators), list(self.moduli))
