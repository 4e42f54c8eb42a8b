"""Invariance under the adjoint action X -> g X g^-1.

Two independent checks: the infinitesimal one, through the Lie derivative
along matrix units E_ab, and the finite one, through exact substitution of
g X g^-1 for X.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import NamedTuple, Sequence

from .config import DEFAULT_CAPS, Caps
from .errors import ParseError, SingularMatrixError, SizeMismatchError
from .forms import Form, Monomial, make_monomial, parse_rational, wedge
from .linalg import SparseVector, monomial_basis, nullspace


class LieGenerator(NamedTuple):
    a: int
    b: int

    def __str__(self) -> str:
        return f"E[{self.a},{self.b}]"


def matrix_units(n: int) -> list[LieGenerator]:
    return [LieGenerator(a, b) for a in range(1, n + 1) for b in range(1, n + 1)]


def _bracket(var: tuple, gen: LieGenerator) -> list[tuple[int, tuple]]:
    """(E_ab M - M E_ab)_ij as a list of (coefficient, (k, l))."""
    i, j = var
    a, b = gen
    out = []
    if i == a:
        out.append((1, (b, j)))
    if j == b:
        out.append((-1, (i, a)))
    return out


def lie_derivative_monomial(m: Monomial, gen: LieGenerator) -> dict[Monomial, int]:
    """Lie derivative of one canonical monomial, as an integer combination."""
    out: dict[Monomial, int] = {}
    xvars = [v for v, e in m.x for _ in range(e)]
    for pos, v in enumerate(xvars):
        for c, w in _bracket(v, gen):
            sign, new = make_monomial(xvars[:pos] + [w] + xvars[pos + 1:], m.dx)
            if sign:
                out[new] = out.get(new, 0) + c * sign
    for pos, v in enumerate(m.dx):
        for c, w in _bracket(v, gen):
            dx = m.dx[:pos] + (w,) + m.dx[pos + 1:]
            sign, new = make_monomial(xvars, dx)
            if sign:
                out[new] = out.get(new, 0) + c * sign
    return {k: v for k, v in out.items() if v}


def lie_derivative(f: Form, gen: LieGenerator) -> Form:
    """Even derivation with x -> [E_ab, X] and dx -> [E_ab, dX] entrywise."""
    a, b = gen
    if not (1 <= a <= f.n and 1 <= b <= f.n):
        raise ValueError(f"matrix unit {gen} outside 1..{f.n}")
    terms: dict = {}
    for m, c in f.terms.items():
        for new, k in lie_derivative_monomial(m, gen).items():
            terms[new] = terms.get(new, 0) + c * k
    return Form(f.n, {m: c for m, c in terms.items() if c})


def non_invariance_witness(f: Form) -> LieGenerator | None:
    """First matrix unit (row-major) whose Lie derivative of ``f`` is nonzero."""
    for gen in matrix_units(f.n):
        if lie_derivative(f, gen):
            return gen
    return None


def is_invariant(f: Form, n: int | None = None) -> bool:
    if n is not None and n != f.n:
        raise SizeMismatchError(f"form over n={f.n}, asked about n={n}")
    return non_invariance_witness(f) is None


# -- finite action ------------------------------------------------------------


def rational_matrix(rows: Sequence[Sequence]) -> tuple[tuple[Fraction, ...], ...]:
    rows = tuple(tuple(Fraction(c) for c in row) for row in rows)
    if any(len(row) != len(rows) for row in rows):
        raise SizeMismatchError("matrix must be square")
    return rows


def invert(g: Sequence[Sequence]) -> tuple[tuple[Fraction, ...], ...]:
    """Exact Gauss-Jordan inverse."""
    g = rational_matrix(g)
    n = len(g)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(g)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col]), None)
        if pivot is None:
            raise SingularMatrixError("matrix is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        lead = aug[col][col]
        aug[col] = [c / lead for c in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                factor = aug[r][col]
                aug[r] = [c - factor * d for c, d in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


def conjugation_pullback(f: Form, g: Sequence[Sequence]) -> Form:
    """Substitute x[i,j] -> (g X g^-1)[i,j] and dx[i,j] -> (g dX g^-1)[i,j]."""
    g = rational_matrix(g)
    n = f.n
    if len(g) != n:
        raise SizeMismatchError(f"g is {len(g)}x{len(g)}, form over n={n}")
    h = invert(g)

    def conj(kind: str, i: int, j: int) -> Form:
        items = []
        for k in range(n):
            if not g[i - 1][k]:
                continue
            for l in range(n):
                c = g[i - 1][k] * h[l][j - 1]
                if c:
                    mono = (
                        Monomial((((k + 1, l + 1), 1),), ())
                        if kind == "x"
                        else Monomial((), ((k + 1, l + 1),))
                    )
                    items.append((c, mono))
        return Form.from_terms(n, items)

    cache: dict = {}

    def image(kind: str, v: tuple) -> Form:
        key = (kind, v)
        if key not in cache:
            cache[key] = conj(kind, *v)
        return cache[key]

    result = Form(n)
    for m, c in f.terms.items():
        term = Form.constant(n, c)
        for v, e in m.x:
            for _ in range(e):
                term = wedge(term, image("x", v))
        for v in m.dx:
            term = wedge(term, image("dx", v))
        result = result + term
    return result


def parse_matrix_record(text: str) -> tuple[tuple[Fraction, ...], ...]:
    """Read ``{"n": 2, "rows": [["1","1"],["0","1"]]}``."""
    try:
        record = json.loads(text)
        n = int(record["n"])
        rows = [[parse_rational(c) for c in row] for row in record["rows"]]
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed matrix record: {exc}") from None
    if len(rows) != n or any(len(row) != n for row in rows):
        raise ParseError(f"matrix record rows do not form an {n}x{n} matrix")
    return tuple(tuple(row) for row in rows)


def matrix_record(g: Sequence[Sequence]) -> dict:
    g = rational_matrix(g)
    return {"n": len(g), "rows": [[str(c) for c in row] for row in g]}


# -- kernel -------------------------------------------------------------------


def _weight_zero(m: Monomial, n: int) -> bool:
    balance = [0] * (n + 1)
    for (i, j), e in m.x:
        balance[i] += e
        balance[j] -= e
    for i, j in m.dx:
        balance[i] += 1
        balance[j] -= 1
    return not any(balance)


def invariant_subspace(p: int, q: int, n: int, caps: Caps = DEFAULT_CAPS) -> list[SparseVector]:
    """Exact basis of the invariant forms of bidegree (p, q).

    Stacks the Lie derivative operators of all n^2 matrix units into one
    system. The diagonal units act on each monomial by a scalar weight, so
    their kernel is spanned by the weight-zero monomials; only those columns
    are assembled.
    """
    caps.check_degree(p, q)
    caps.check_n(n)
    basis = monomial_basis(n, p, q)
    columns = [k for k, m in enumerate(basis.monomials) if _weight_zero(m, n)]
    rows: dict[tuple, dict[int, int]] = {}
    for col, k in enumerate(columns):
        m = basis.monomials[k]
        for gen in matrix_units(n):
            for target, c in lie_derivative_monomial(m, gen).items():
                rows.setdefault((gen, basis.index[target]), {})[col] = c
    kernel = nullspace((rows[key] for key in sorted(rows)), len(columns))
    return [
        SparseVector(basis.key, {columns[c]: v for c, v in sorted(vec.items())})
        for vec in kernel
    ]
