"""Polynomial-coefficient differential forms on n x n matrices.

A :class:`Form` is a sparse sum of monomials in commuting coordinates
``x[i,j]`` and anticommuting differentials ``dx[i,j]``, with exact rational
coefficients. Monomials are stored in canonical form: the x-part is a sorted
tuple of ``((i, j), exponent)`` pairs and the dx-part a strictly increasing
tuple of indices. The sign produced by sorting the dx-part lives in the
coefficient.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from .errors import ParseError, SizeMismatchError

Var = tuple  # (i, j), 1-based


class Monomial(NamedTuple):
    x: tuple  # ((i, j), e) pairs, sorted, e >= 1
    dx: tuple  # (i, j) pairs, strictly increasing

    @property
    def bidegree(self) -> tuple[int, int]:
        return sum(e for _, e in self.x), len(self.dx)

    def sort_key(self):
        """Graded-lexicographic key used for serialization and bases."""
        expanded = tuple(v for v, e in self.x for _ in range(e))
        return (len(expanded) + len(self.dx), len(expanded), expanded, self.dx)


ONE = Monomial((), ())


def rational(c):
    """Exact coefficient: an int when integral, else a reduced Fraction."""
    if isinstance(c, int):
        return c
    c = Fraction(c)
    return c.numerator if c.denominator == 1 else c


def sort_dx(seq: Sequence[Var]) -> tuple[int, tuple]:
    """Sort a wedge of differentials, returning ``(sign, sorted)``.

    Sign is 0 when an index repeats. Inversions are counted during a
    merge sort, which is also where duplicates surface.
    """
    seq = list(seq)
    if len(seq) < 2:
        return 1, tuple(seq)
    inversions = _merge_sort(seq)
    if inversions is None:
        return 0, ()
    return (-1 if inversions % 2 else 1), tuple(seq)


def _merge_sort(seq: list):
    if len(seq) < 2:
        return 0
    mid = len(seq) // 2
    left, right = seq[:mid], seq[mid:]
    inv_left = _merge_sort(left)
    if inv_left is None:
        return None
    inv_right = _merge_sort(right)
    if inv_right is None:
        return None
    merged = _merge(left, right)
    if merged is None:
        return None
    seq[:] = merged[1]
    return inv_left + inv_right + merged[0]


def _merge(a: Sequence, b: Sequence):
    """Merge two sorted sequences; return (inversions, merged) or None on a repeat."""
    out = []
    inversions = 0
    i = j = 0
    while i < len(a) and j < len(b):
        if a[i] < b[j]:
            out.append(a[i])
            i += 1
        elif b[j] < a[i]:
            out.append(b[j])
            inversions += len(a) - i
            j += 1
        else:
            return None
    out.extend(a[i:])
    out.extend(b[j:])
    return inversions, out


def _mul_x(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    powers = dict(a)
    for v, e in b:
        powers[v] = powers.get(v, 0) + e
    return tuple(sorted(powers.items()))


def mul_monomials(a: Monomial, b: Monomial) -> tuple[int, Monomial | None]:
    """Wedge two canonical monomials; returns ``(sign, monomial)``, sign 0 if it vanishes."""
    if not a.dx or not b.dx:
        return 1, Monomial(_mul_x(a.x, b.x), a.dx or b.dx)
    merged = _merge(a.dx, b.dx)
    if merged is None:
        return 0, None
    inversions, dx = merged
    return (-1 if inversions % 2 else 1), Monomial(_mul_x(a.x, b.x), tuple(dx))


def make_monomial(xvars: Iterable[Var], dxvars: Sequence[Var]) -> tuple[int, Monomial | None]:
    """Canonicalize a product of coordinates and an ordered wedge of differentials."""
    sign, dx = sort_dx(dxvars)
    if sign == 0:
        return 0, None
    powers: dict = {}
    for v in xvars:
        powers[v] = powers.get(v, 0) + 1
    return sign, Monomial(tuple(sorted(powers.items())), dx)


class Form:
    """An element of the algebra of polynomial differential forms on n x n matrices."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: dict | None = None):
        self.n = n
        self.terms = terms if terms is not None else {}

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "Form":
        return cls(n)

    @classmethod
    def constant(cls, n: int, c) -> "Form":
        c = rational(c)
        return cls(n, {ONE: c} if c else {})

    @classmethod
    def x(cls, n: int, i: int, j: int) -> "Form":
        _check_index(n, i, j)
        return cls(n, {Monomial((((i, j), 1),), ()): 1})

    @classmethod
    def dx(cls, n: int, i: int, j: int) -> "Form":
        _check_index(n, i, j)
        return cls(n, {Monomial((), ((i, j),)): 1})

    @classmethod
    def from_terms(cls, n: int, items: Iterable) -> "Form":
        """Sum ``(coefficient, Monomial)`` pairs, dropping cancellations."""
        terms: dict = {}
        for c, m in items:
            if c:
                terms[m] = terms.get(m, 0) + c
        return cls(n, {m: rational(c) for m, c in terms.items() if c})

    # -- queries ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, Form):
            return self.n == other.n and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == ({ONE: other} if other else {})
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.n, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"Form(n={self.n}, {to_text(self)!r})"

    def __str__(self) -> str:
        return to_text(self)

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> "Form":
        if isinstance(other, Form):
            if other.n != self.n:
                raise SizeMismatchError(f"forms over n={self.n} and n={other.n}")
            return other
        if isinstance(other, (int, Fraction)):
            return Form.constant(self.n, other)
        raise TypeError(f"cannot combine Form with {type(other).__name__}")

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            s = terms.get(m, 0) + c
            if s:
                terms[m] = s
            else:
                terms.pop(m, None)
        return Form(self.n, terms)

    __radd__ = __add__

    def __neg__(self):
        return Form(self.n, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return scale(other, self)
        return wedge(self, self._coerce(other))

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return scale(other, self)
        return NotImplemented


def _check_index(n: int, i: int, j: int) -> None:
    if not (1 <= i <= n and 1 <= j <= n):
        raise ValueError(f"index ({i},{j}) outside 1..{n}")


def add(a: Form, b: Form) -> Form:
    return a + b


def scale(c, a: Form) -> Form:
    c = rational(c)
    if not c:
        return Form(a.n)
    return Form(a.n, {m: c * v for m, v in a.terms.items()})


def wedge(a: Form, b: Form) -> Form:
    if a.n != b.n:
        raise SizeMismatchError(f"forms over n={a.n} and n={b.n}")
    terms: dict = {}
    _accumulate(terms, a, b)
    return Form(a.n, {m: c for m, c in terms.items() if c})


def wedge_all(forms: Sequence[Form], n: int) -> Form:
    result = Form.constant(n, 1)
    for f in forms:
        result = wedge(result, f)
    return result


def bidegree(a: Form) -> set[tuple[int, int]]:
    return {m.bidegree for m in a.terms}


def homogeneous_bidegree(a: Form) -> tuple[int, int] | None:
    """The single bidegree of a nonzero homogeneous form, else None."""
    degrees = bidegree(a)
    return next(iter(degrees)) if len(degrees) == 1 else None


def exterior_derivative(a: Form) -> Form:
    """d with d(x[i,j]) = dx[i,j], d(dx[i,j]) = 0; new differentials go on the left."""
    terms: dict = {}
    for m, c in a.terms.items():
        for k, (v, e) in enumerate(m.x):
            rest = m.x[:k] + (((v, e - 1),) if e > 1 else ()) + m.x[k + 1:]
            merged = _merge((v,), m.dx)
            if merged is None:
                continue
            inversions, dx = merged
            coeff = c * e if inversions % 2 == 0 else -c * e
            key = Monomial(rest, tuple(dx))
            terms[key] = terms.get(key, 0) + coeff
    return Form(a.n, {m: c for m, c in terms.items() if c})


# -- matrices of forms ------------------------------------------------------


class FormMatrix:
    """n x n matrix with Form entries; indexed 1-based as ``A[i, j]``."""

    __slots__ = ("n", "entries")

    def __init__(self, n: int, entries: Sequence[Sequence[Form]]):
        if len(entries) != n or any(len(row) != n for row in entries):
            raise SizeMismatchError("FormMatrix entries must be n x n")
        if any(f.n != n for row in entries for f in row):
            raise SizeMismatchError("FormMatrix entries must share n")
        self.n = n
        self.entries = tuple(tuple(row) for row in entries)

    def __getitem__(self, ij) -> Form:
        i, j = ij
        return self.entries[i - 1][j - 1]

    def __matmul__(self, other: "FormMatrix") -> "FormMatrix":
        return mat_mul(self, other)

    def __eq__(self, other) -> bool:
        return isinstance(other, FormMatrix) and self.entries == other.entries

    def __repr__(self) -> str:
        rows = ["[" + ", ".join(map(str, row)) + "]" for row in self.entries]
        return f"FormMatrix(n={self.n}, [{', '.join(rows)}])"


def identity_matrix(n: int) -> FormMatrix:
    return FormMatrix(
        n, [[Form.constant(n, int(i == j)) for j in range(n)] for i in range(n)]
    )


def coordinate_matrix(n: int) -> FormMatrix:
    """X = (x[i,j])."""
    if n < 1:
        raise ValueError(f"matrix size must be >= 1, got {n}")
    return FormMatrix(
        n, [[Form.x(n, i, j) for j in range(1, n + 1)] for i in range(1, n + 1)]
    )


def differential_matrix(n: int) -> FormMatrix:
    """dX = (dx[i,j])."""
    if n < 1:
        raise ValueError(f"matrix size must be >= 1, got {n}")
    return FormMatrix(
        n, [[Form.dx(n, i, j) for j in range(1, n + 1)] for i in range(1, n + 1)]
    )


def _accumulate(terms: dict, a: Form, b: Form) -> None:
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            sign, m = mul_monomials(ma, mb)
            if sign:
                terms[m] = terms.get(m, 0) + (ca * cb if sign > 0 else -ca * cb)


def mat_mul(a: FormMatrix, b: FormMatrix) -> FormMatrix:
    if a.n != b.n:
        raise SizeMismatchError(f"matrices of size {a.n} and {b.n}")
    n = a.n
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            terms: dict = {}
            for k in range(n):
                _accumulate(terms, a.entries[i][k], b.entries[k][j])
            row.append(Form(n, {m: c for m, c in terms.items() if c}))
        rows.append(row)
    return FormMatrix(n, rows)


def mat_pow(a: FormMatrix, power: int) -> FormMatrix:
    if power < 0:
        raise ValueError("matrix power must be nonnegative")
    result = identity_matrix(a.n)
    for _ in range(power):
        result = mat_mul(result, a)
    return result


def trace(a: FormMatrix) -> Form:
    acc = Form(a.n)
    for i in range(a.n):
        acc = acc + a.entries[i][i]
    return acc


def trace_of_product(a: FormMatrix, b: FormMatrix) -> Form:
    """Tr(AB) without forming the full product."""
    if a.n != b.n:
        raise SizeMismatchError(f"matrices of size {a.n} and {b.n}")
    terms: dict = {}
    for i in range(a.n):
        for k in range(a.n):
            _accumulate(terms, a.entries[i][k], b.entries[k][i])
    return Form(a.n, {m: c for m, c in terms.items() if c})


# -- text format ------------------------------------------------------------


def _format_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_monomial(m: Monomial) -> str:
    factors = [
        f"x[{i},{j}]" + (f"^{e}" if e > 1 else "") for (i, j), e in m.x
    ]
    if m.dx:
        factors.append("^".join(f"dx[{i},{j}]" for i, j in m.dx))
    return "*".join(factors)


def to_text(a: Form) -> str:
    """Canonical text: graded-lex term order, ``" + "``/``" - "`` separators."""
    if not a.terms:
        return "0"
    parts = []
    for m in sorted(a.terms, key=Monomial.sort_key):
        c = a.terms[m]
        body = format_monomial(m)
        mag = abs(c)
        if not body:
            text = _format_rational(mag)
        elif mag == 1:
            text = body
        else:
            text = f"{_format_rational(mag)}*{body}"
        if not parts:
            parts.append(("-" if c < 0 else "") + text)
        else:
            parts.append((" - " if c < 0 else " + ") + text)
    return "".join(parts)


_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<dx>dx\[\s*(?P<di>\d+)\s*,\s*(?P<dj>\d+)\s*\])"
    r"|(?P<x>x\[\s*(?P<xi>\d+)\s*,\s*(?P<xj>\d+)\s*\])"
    r"|(?P<num>\d+(?:\s*/\s*\d+)?)"
    r"|(?P<op>[-+*^∧])"
    r")"
)


def _tokenize(text: str) -> list[tuple[str, object, int]]:
    tokens = []
    pos = 0
    stripped = text.rstrip()
    while pos < len(stripped):
        m = _TOKEN.match(stripped, pos)
        if not m or m.end() == pos:
            bad = stripped[pos:].strip().split()[0] if stripped[pos:].strip() else ""
            raise ParseError(f"unexpected token {bad!r} at position {pos}")
        if m.group("dx"):
            tokens.append(("dx", (int(m.group("di")), int(m.group("dj"))), m.start("dx")))
        elif m.group("x"):
            tokens.append(("x", (int(m.group("xi")), int(m.group("xj"))), m.start("x")))
        elif m.group("num"):
            raw = m.group("num").replace(" ", "")
            num, _, den = raw.partition("/")
            if den and int(den) == 0:
                raise ParseError(f"zero denominator in {raw!r}")
            tokens.append(("num", Fraction(int(num), int(den) if den else 1), m.start("num")))
        else:
            op = m.group("op")
            tokens.append(("op", "^" if op == "∧" else op, m.start("op")))
        pos = m.end()
    return tokens


def parse_text(text: str, n: int | None = None) -> Form:
    """Parse the tolerant text grammar.

    When ``n`` is None it is taken as the largest index that occurs (at least 1).
    Differentials are wedged in the order written and normalized with sign.
    """
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty form")
    raw_terms = []
    k = 0
    while k < len(tokens):
        sign = 1
        while k < len(tokens) and tokens[k][0] == "op" and tokens[k][1] in "+-":
            if tokens[k][1] == "-":
                sign = -sign
            k += 1
        coeff = Fraction(1)
        xvars: list = []
        dxvars: list = []
        seen_factor = False
        expect_factor = True
        while k < len(tokens):
            kind, value, pos = tokens[k]
            if kind == "op" and value in "+-":
                break
            if kind == "num":
                if not expect_factor:
                    raise ParseError(f"unexpected number at position {pos}")
                coeff *= value
                seen_factor = True
                expect_factor = False
                k += 1
            elif kind == "x":
                if dxvars:
                    raise ParseError(f"coordinate after differential at position {pos}")
                e = 1
                k += 1
                if (
                    k + 1 < len(tokens)
                    and tokens[k] == ("op", "^", tokens[k][2])
                    and tokens[k + 1][0] == "num"
                ):
                    exp = tokens[k + 1][1]
                    if exp.denominator != 1 or exp < 1:
                        raise ParseError(f"bad exponent at position {tokens[k + 1][2]}")
                    e = int(exp)
                    k += 2
                xvars.extend([value] * e)
                seen_factor = True
                expect_factor = False
            elif kind == "dx":
                dxvars.append(value)
                seen_factor = True
                expect_factor = False
                k += 1
            elif kind == "op" and value in "*^":
                if expect_factor:
                    raise ParseError(f"dangling {value!r} at position {pos}")
                expect_factor = True
                k += 1
            else:
                raise ParseError(f"unexpected token {value!r} at position {pos}")
        if not seen_factor or expect_factor:
            where = tokens[k][2] if k < len(tokens) else len(text)
            raise ParseError(f"incomplete term at position {where}")
        raw_terms.append((sign * coeff, xvars, dxvars))
    if n is None:
        indices = [v for _, xs, ds in raw_terms for v in xs + ds]
        n = max([max(v) for v in indices], default=1)
    items = []
    for c, xs, ds in raw_terms:
        for i, j in xs + ds:
            if not (1 <= i <= n and 1 <= j <= n):
                raise ParseError(f"index ({i},{j}) outside 1..{n}")
        sign, m = make_monomial(xs, ds)
        if sign:
            items.append((sign * c, m))
    return Form.from_terms(n, items)


# -- structured format ------------------------------------------------------


def to_record(a: Form) -> dict:
    terms = []
    for m in sorted(a.terms, key=Monomial.sort_key):
        terms.append(
            {
                "c": _format_rational(a.terms[m]),
                "x": [[i, j, e] for (i, j), e in m.x],
                "dx": [[i, j] for i, j in m.dx],
            }
        )
    return {"n": a.n, "terms": terms}


def parse_rational(text) -> Fraction:
    try:
        if isinstance(text, int):
            return Fraction(text)
        num, sep, den = str(text).strip().partition("/")
        if sep and int(den) <= 0:
            raise ValueError
        return Fraction(int(num), int(den) if sep else 1)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"malformed rational {text!r}") from None


def from_record(record: dict) -> Form:
    try:
        n = int(record["n"])
        raw = record["terms"]
    except (KeyError, TypeError, ValueError):
        raise ParseError("record needs integer 'n' and list 'terms'") from None
    if n < 1:
        raise ParseError(f"record size n={n} must be >= 1")
    items = []
    for t in raw:
        try:
            c = parse_rational(t["c"])
            xs = [((int(i), int(j)), int(e)) for i, j, e in t.get("x", [])]
            ds = [(int(i), int(j)) for i, j in t.get("dx", [])]
        except (KeyError, TypeError, ValueError):
            raise ParseError(f"malformed term {t!r}") from None
        for (i, j), e in xs:
            if e < 1:
                raise ParseError(f"nonpositive exponent in {t!r}")
        for i, j in [v for v, _ in xs] + ds:
            if not (1 <= i <= n and 1 <= j <= n):
                raise ParseError(f"index ({i},{j}) outside 1..{n}")
        xvars = [v for v, e in xs for _ in range(e)]
        sign, m = make_monomial(xvars, ds)
        if sign:
            items.append((sign * c, m))
    return Form.from_terms(n, items)


def dumps(a: Form) -> str:
    return json.dumps(to_record(a), separators=(",", ":"))


def loads(text: str, n: int | None = None) -> Form:
    """Auto-detect structured (JSON) or text input."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            record = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed JSON record: {exc}") from None
        form = from_record(record)
        if n is not None and form.n != n:
            raise ParseError(f"record has n={form.n}, expected n={n}")
        return form
    return parse_text(stripped, n)
