"""Exact sparse linear algebra over the monomial basis of a bidegree component.

Rows are kept as ``{column: int}`` dicts. Elimination is fraction-free:
rational input is cleared to integers, reduction uses cross-multiplication,
and each row is divided by the gcd of its entries to keep numbers small.
Pivots are always the first nonzero column.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd, lcm
from typing import Iterable, Mapping, Sequence

from .errors import BasisMismatchError, BidegreeError
from .forms import Form, Monomial


@dataclass(frozen=True)
class MonomialBasis:
    n: int
    p: int
    q: int
    monomials: tuple[Monomial, ...] = field(repr=False)
    index: Mapping[Monomial, int] = field(repr=False, compare=False, hash=False)

    @property
    def key(self) -> tuple[int, int, int]:
        return self.n, self.p, self.q

    def __len__(self) -> int:
        return len(self.monomials)


@lru_cache(maxsize=None)
def monomial_basis(n: int, p: int, q: int) -> MonomialBasis:
    """All monomials of bidegree (p, q) in graded-lex order."""
    variables = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]
    xparts = []
    for combo in itertools.combinations_with_replacement(variables, p):
        powers: dict = {}
        for v in combo:
            powers[v] = powers.get(v, 0) + 1
        xparts.append(tuple(sorted(powers.items())))
    dxparts = list(itertools.combinations(variables, q))
    monomials = tuple(Monomial(x, dx) for x in xparts for dx in dxparts)
    assert len(monomials) == comb(n * n + p - 1, p) * comb(n * n, q)
    return MonomialBasis(n, p, q, monomials, {m: k for k, m in enumerate(monomials)})


@dataclass(frozen=True)
class SparseVector:
    basis: tuple[int, int, int]  # (n, p, q)
    entries: Mapping[int, Fraction]

    def __len__(self) -> int:
        return len(self.entries)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SparseVector)
            and self.basis == other.basis
            and dict(self.entries) == dict(other.entries)
        )

    def __hash__(self) -> int:
        return hash((self.basis, frozenset(self.entries.items())))


def vectorize(a: Form, basis: MonomialBasis) -> SparseVector:
    if a.n != basis.n:
        raise BidegreeError(f"form over n={a.n}, basis over n={basis.n}")
    entries = {}
    for m, c in a.terms.items():
        k = basis.index.get(m)
        if k is None:
            raise BidegreeError(
                f"term of bidegree {m.bidegree} outside basis ({basis.p}, {basis.q})"
            )
        entries[k] = c
    return SparseVector(basis.key, entries)


def devectorize(v: SparseVector) -> Form:
    basis = monomial_basis(*v.basis)
    return Form(basis.n, {basis.monomials[k]: Fraction(c) for k, c in v.entries.items() if c})


def _common_basis(vectors: Iterable[SparseVector]):
    keys = {v.basis for v in vectors}
    if len(keys) > 1:
        raise BasisMismatchError(f"vectors over different bases: {sorted(keys)}")
    return next(iter(keys), None)


# -- fraction-free elimination ------------------------------------------------


def integer_row(entries: Mapping[int, Fraction]) -> dict[int, int]:
    """Scale a rational row to a primitive integer row."""
    entries = {k: Fraction(c) for k, c in entries.items() if c}
    if not entries:
        return {}
    den = lcm(*(c.denominator for c in entries.values()))
    row = {k: int(c * den) for k, c in entries.items()}
    return _primitive(row)


def _primitive(row: dict[int, int]) -> dict[int, int]:
    g = 0
    for c in row.values():
        g = gcd(g, c)
        if g == 1:
            return row
    if g > 1:
        row = {k: c // g for k, c in row.items()}
    return row


def _combine(row: dict, piv: dict, col: int) -> dict:
    """b*row - a*piv, eliminating ``col`` where a = row[col], b = piv[col]."""
    a, b = row[col], piv[col]
    g = gcd(a, b)
    a, b = a // g, b // g
    if b < 0:
        a, b = -a, -b
    out = {k: b * c for k, c in row.items()} if b != 1 else dict(row)
    for k, c in piv.items():
        v = out.get(k, 0) - a * c
        if v:
            out[k] = v
        else:
            out.pop(k, None)
    return _primitive(out)


class Echelon:
    """Incrementally built row echelon form with one pivot row per leading column."""

    def __init__(self):
        self.pivots: dict[int, dict[int, int]] = {}

    def reduce(self, row: dict[int, int]) -> dict[int, int]:
        """Reduce ``row`` until its leading column is not a pivot column (or it is zero)."""
        row = dict(row)
        while row:
            col = min(row)
            piv = self.pivots.get(col)
            if piv is None:
                return row
            row = _combine(row, piv, col)
        return row

    def add(self, row: dict[int, int]) -> bool:
        """Insert a row; returns True when it raised the rank."""
        row = self.reduce(row)
        if not row:
            return False
        col = min(row)
        if row[col] < 0:
            row = {k: -c for k, c in row.items()}
        self.pivots[col] = row
        return True

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduced(self) -> dict[int, dict[int, int]]:
        """Back-substitute so every pivot column is zero outside its own row."""
        pivots = {c: dict(r) for c, r in self.pivots.items()}
        cols = sorted(pivots)
        for idx in range(len(cols) - 1, -1, -1):
            col = cols[idx]
            piv = pivots[col]
            for other in cols[:idx]:
                row = pivots[other]
                if col in row:
                    pivots[other] = _combine(row, piv, col)
        for c, r in pivots.items():
            if r[c] < 0:
                pivots[c] = {k: -v for k, v in r.items()}
        return pivots


def rank(vectors: Sequence[SparseVector]) -> int:
    """Exact rank over the rationals."""
    _common_basis(vectors)
    ech = Echelon()
    for v in vectors:
        ech.add(integer_row(v.entries))
    return ech.rank


def span_equal(us: Sequence[SparseVector], vs: Sequence[SparseVector]) -> bool:
    _common_basis(list(us) + list(vs))
    ru, rv = rank(us), rank(vs)
    return ru == rv == rank(list(us) + list(vs))


def solve_in_span(target: SparseVector, vectors: Sequence[SparseVector]) -> list[Fraction] | None:
    """Coefficients c with sum c_i v_i = target, or None when target is not in the span.

    Unknown i is column i and the right-hand side is column len(vectors);
    free unknowns are set to zero.
    """
    _common_basis(list(vectors) + [target])
    k = len(vectors)
    equations: dict[int, dict[int, Fraction]] = {}
    for i, v in enumerate(vectors):
        for m, c in v.entries.items():
            equations.setdefault(m, {})[i] = c
    for m, c in target.entries.items():
        equations.setdefault(m, {})[k] = c
    ech = Echelon()
    for m in sorted(equations):
        ech.add(integer_row(equations[m]))
    if k in ech.pivots:
        return None
    solution = [Fraction(0)] * k
    for col, row in ech.reduced().items():
        solution[col] = Fraction(row.get(k, 0), row[col])
    return solution


def nullspace(rows: Iterable[Mapping[int, Fraction]], columns: int) -> list[dict[int, Fraction]]:
    """Basis of {v : row . v = 0 for all rows}, one vector per free column.

    The vector for free column f has a 1 at f and zeros at other free columns.
    """
    ech = Echelon()
    for row in rows:
        ech.add(integer_row(row))
    reduced = ech.reduced()
    free = [c for c in range(columns) if c not in reduced]
    by_free: dict[int, dict[int, Fraction]] = {f: {f: Fraction(1)} for f in free}
    for col, row in reduced.items():
        lead = row[col]
        for f, c in row.items():
            if f != col:
                by_free[f][col] = Fraction(-c, lead)
    return [by_free[f] for f in free]
