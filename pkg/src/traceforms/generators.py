"""The trace-form generators and their products.

``tau(l)`` is Tr(X^l). ``omega((l1, ..., lp))`` is
Tr(X^l1 dX ^ X^l2 dX ^ ... ^ X^lp dX). ``sigma(k)`` is the coefficient of
t^(n-k) in det(tI + X).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .config import DEFAULT_CAPS, Caps
from .errors import ParseError
from .forms import (
    Form,
    FormMatrix,
    coordinate_matrix,
    differential_matrix,
    identity_matrix,
    mat_mul,
    trace,
    trace_of_product,
    wedge,
)


@dataclass(frozen=True, order=True)
class GeneratorLabel:
    kind: str  # "tau" or "omega"
    exponents: tuple[int, ...]
    sign: int = 1
    is_zero: bool = False

    @property
    def bidegree(self) -> tuple[int, int]:
        if self.kind == "tau":
            return self.exponents[0], 0
        return sum(self.exponents), len(self.exponents)

    @property
    def is_odd(self) -> bool:
        return self.kind == "omega" and len(self.exponents) % 2 == 1

    def sort_key(self):
        return (self.kind != "tau", len(self.exponents), self.exponents)

    def __str__(self) -> str:
        return format_label(self)


def format_label(label: GeneratorLabel) -> str:
    return f"{label.kind}:" + ",".join(map(str, label.exponents))


def format_product(labels: Sequence[GeneratorLabel]) -> str:
    return "*".join(map(format_label, labels)) if labels else "1"


def canonical_label(kind: str, exponents: Iterable[int]) -> GeneratorLabel:
    """Normalize a label under trace cyclicity.

    Rotating omega exponents left by one multiplies the form by (-1)^(p-1),
    since one odd differential moves past the other p-1. The canonical label
    is the lexicographically minimal rotation; ``is_zero`` flags sequences
    fixed by an odd-signed rotation.
    """
    exps = tuple(int(e) for e in exponents)
    if kind == "tau":
        if len(exps) != 1 or exps[0] < 1:
            raise ValueError(f"tau needs one exponent >= 1, got {exps}")
        return GeneratorLabel("tau", exps)
    if kind != "omega":
        raise ValueError(f"unknown generator kind {kind!r}")
    p = len(exps)
    if p < 1 or min(exps) < 0:
        raise ValueError(f"omega needs p >= 1 nonnegative exponents, got {exps}")
    best, shift = exps, 0
    is_zero = False
    for s in range(1, p):
        rotated = exps[s:] + exps[:s]
        if rotated == exps and (p - 1) * s % 2:
            is_zero = True
        if rotated < best:
            best, shift = rotated, s
    sign = -1 if (p - 1) * shift % 2 else 1
    return GeneratorLabel("omega", best, sign, is_zero)


_LABEL = re.compile(r"^(tau|omega):(\d+(?:,\d+)*)$")


def parse_label(text: str) -> GeneratorLabel:
    """Parse ``tau:3`` or ``omega:1,0,2`` verbatim (no canonicalization)."""
    token = text.strip().replace(" ", "")
    m = _LABEL.match(token)
    if not m:
        raise ParseError(f"malformed generator label {token!r}")
    kind = m.group(1)
    exps = tuple(int(e) for e in m.group(2).split(","))
    if kind == "tau" and (len(exps) != 1 or exps[0] < 1):
        raise ParseError(f"malformed generator label {token!r}: tau takes one exponent >= 1")
    return GeneratorLabel(kind, exps)


def parse_product(text: str) -> list[GeneratorLabel]:
    if text.strip() == "1":
        return []
    return [parse_label(tok) for tok in text.split("*")]


# -- forms ------------------------------------------------------------------


_POWERS: dict[int, list[FormMatrix]] = {}


def x_power(n: int, power: int) -> FormMatrix:
    """X^power, cached per n."""
    powers = _POWERS.setdefault(n, [identity_matrix(n)])
    while len(powers) <= power:
        powers.append(mat_mul(powers[-1], coordinate_matrix(n)))
    return powers[power]


@lru_cache(maxsize=None)
def tau(ell: int, n: int) -> Form:
    if ell < 1:
        raise ValueError("tau^0 = n is a constant, not a generator; need ell >= 1")
    if n < 1:
        raise ValueError(f"matrix size must be >= 1, got {n}")
    return trace(x_power(n, ell))


@lru_cache(maxsize=None)
def _omega_prefix(ells: tuple[int, ...], n: int) -> FormMatrix:
    """X^l1 dX X^l2 dX ... X^lk dX, memoized so sequences share prefixes."""
    head = x_power(n, ells[0]) if len(ells) == 1 else mat_mul(_omega_prefix(ells[:-1], n), x_power(n, ells[-1]))
    return mat_mul(head, differential_matrix(n))


@lru_cache(maxsize=None)
def _omega(ells: tuple[int, ...], n: int) -> Form:
    if len(ells) == 1:
        return trace_of_product(x_power(n, ells[0]), differential_matrix(n))
    return trace_of_product(mat_mul(_omega_prefix(ells[:-1], n), x_power(n, ells[-1])), differential_matrix(n))


def omega(ells: Sequence[int], n: int) -> Form:
    ells = tuple(int(e) for e in ells)
    if not ells or min(ells) < 0:
        raise ValueError(f"omega needs p >= 1 nonnegative exponents, got {ells}")
    if n < 1:
        raise ValueError(f"matrix size must be >= 1, got {n}")
    return _omega(ells, n)


def generator_form(label: GeneratorLabel, n: int) -> Form:
    """Form of a label as written; the label's sign and zero flag are ignored."""
    if label.kind == "tau":
        return tau(label.exponents[0], n)
    return omega(label.exponents, n)


def product_form(labels: Sequence[GeneratorLabel], n: int) -> Form:
    result = Form.constant(n, 1)
    for label in labels:
        result = wedge(result, generator_form(label, n))
    return result


# -- characteristic polynomial ----------------------------------------------


def _poly_mul(a: list, b: list, n: int) -> list:
    out = [Form(n) for _ in range(len(a) + len(b) - 1)]
    for i, fa in enumerate(a):
        if not fa:
            continue
        for j, fb in enumerate(b):
            if fb:
                out[i + j] = out[i + j] + wedge(fa, fb)
    return out


def _poly_add(a: list, b: list, n: int, sign: int = 1) -> list:
    size = max(len(a), len(b))
    a = a + [Form(n)] * (size - len(a))
    b = b + [Form(n)] * (size - len(b))
    return [fa + fb if sign > 0 else fa - fb for fa, fb in zip(a, b)]


@lru_cache(maxsize=None)
def char_poly(n: int) -> tuple[Form, ...]:
    """Coefficients of det(tI + X) in t, lowest degree first.

    Laplace expansion along rows, memoized on the set of remaining columns.
    """
    x = coordinate_matrix(n)

    def entry(i: int, j: int) -> list:
        if i == j:
            return [x.entries[i][j], Form.constant(n, 1)]
        return [x.entries[i][j]]

    memo: dict = {}

    def minor(row: int, cols: tuple[int, ...]) -> list:
        if row == n:
            return [Form.constant(n, 1)]
        key = (row, cols)
        if key in memo:
            return memo[key]
        acc = [Form(n)]
        for pos, col in enumerate(cols):
            rest = cols[:pos] + cols[pos + 1:]
            term = _poly_mul(entry(row, col), minor(row + 1, rest), n)
            acc = _poly_add(acc, term, n, -1 if pos % 2 else 1)
        memo[key] = acc
        return acc

    return tuple(minor(0, tuple(range(n))))


def sigma(k: int, n: int) -> Form:
    if not 1 <= k <= n:
        raise ValueError(f"sigma_k needs 1 <= k <= n, got k={k}, n={n}")
    return char_poly(n)[n - k]


def newton_identity_residual(k: int, n: int) -> Form:
    """k*sigma_k - sum_{i=1..k} (-1)^(i-1) sigma_{k-i} tau^i; zero by Newton's identities."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")

    def sig(j: int) -> Form:
        return Form.constant(n, 1) if j == 0 else sigma(j, n)

    residual = k * sigma(k, n)
    for i in range(1, k + 1):
        term = wedge(sig(k - i), tau(i, n))
        residual = residual - term if i % 2 else residual + term
    return residual


# -- enumeration --------------------------------------------------------------


def generator_labels(max_p: int, max_q: int) -> list[GeneratorLabel]:
    """Canonical nonzero labels with bidegree at most (max_p, max_q)."""
    labels = [GeneratorLabel("tau", (ell,)) for ell in range(1, max_p + 1)]
    seen = set()
    for s in range(1, max_q + 1):
        for exps in _compositions_upto(max_p, s):
            label = canonical_label("omega", exps)
            if label.is_zero or label.exponents in seen:
                continue
            seen.add(label.exponents)
            labels.append(GeneratorLabel("omega", label.exponents))
    return sorted(labels, key=GeneratorLabel.sort_key)


def _compositions_upto(total: int, parts: int):
    """All tuples of ``parts`` nonnegative integers with sum <= total."""
    if parts == 0:
        yield ()
        return
    for first in range(total + 1):
        for rest in _compositions_upto(total - first, parts - 1):
            yield (first,) + rest


def enumerate_generator_products(
    p: int, q: int, n: int, caps: Caps = DEFAULT_CAPS
) -> list[tuple[tuple[GeneratorLabel, ...], Form]]:
    """All generator products of bidegree exactly (p, q).

    Odd-degree omegas appear at most once in a product. The result is sorted
    by label multiset and the constant 1 is returned for (0, 0).
    """
    caps.check_degree(p, q)
    caps.check_n(n)
    labels = generator_labels(p, q)
    multisets: list[tuple[GeneratorLabel, ...]] = []

    def extend(start: int, rp: int, rq: int, chosen: list) -> None:
        if rp == 0 and rq == 0:
            multisets.append(tuple(chosen))
            return
        for idx in range(start, len(labels)):
            label = labels[idx]
            dp, dq = label.bidegree
            if dp > rp or dq > rq:
                continue
            chosen.append(label)
            # odd generators square to zero, so they may not repeat
            extend(idx + 1 if label.is_odd else idx, rp - dp, rq - dq, chosen)
            chosen.pop()

    extend(0, p, q, [])
    multisets.sort(key=lambda ms: [lab.sort_key() for lab in ms])
    return [(ms, product_form(ms, n)) for ms in multisets]


def decomposition_form(coefficients: dict, n: int) -> Form:
    """Rebuild sum c * product from ``{label-tuple: Fraction}``."""
    acc = Form(n)
    for labels, c in coefficients.items():
        if c:
            acc = acc + Fraction(c) * product_form(labels, n)
    return acc
