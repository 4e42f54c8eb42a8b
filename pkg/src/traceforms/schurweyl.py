"""Permutation-tensor invariants and their factorization into trace forms.

Slots ``1..p`` of a permutation are symmetric (they receive X) and slots
``p+1..p+q`` antisymmetric (they receive dX). Slot ``k`` contributes the
matrix entry ``M_k[j_k, j_{rho^-1(k)}]``, so along a cycle the entries chain
into a trace read in the direction ``k -> rho^-1(k)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple

from .config import DEFAULT_CAPS, Caps
from .errors import SizeLimitError, SizeMismatchError
from .forms import Form, make_monomial, wedge
from .generators import GeneratorLabel, canonical_label, generator_form
from .perm import Permutation, cycle_decomposition, enumerate_symmetric_group, inverse, sequence_sign


@dataclass(frozen=True)
class SlotSplit:
    p: int
    q: int

    def __post_init__(self):
        if self.p < 0 or self.q < 0:
            raise ValueError(f"slot counts must be nonnegative, got ({self.p}, {self.q})")

    @property
    def r(self) -> int:
        return self.p + self.q

    def is_antisymmetric(self, slot: int) -> bool:
        return slot > self.p


class CycleFactorization(NamedTuple):
    sign: int
    factors: tuple[GeneratorLabel, ...]

    @property
    def is_zero(self) -> bool:
        return any(f.is_zero for f in self.factors)


def _check(rho: Permutation, split: SlotSplit) -> None:
    if rho.r != split.r:
        raise SizeMismatchError(f"permutation degree {rho.r} != p+q = {split.r}")


def phi_form(rho: Permutation, split: SlotSplit, n: int, caps: Caps = DEFAULT_CAPS) -> Form:
    """Evaluate the invariant tensor of ``rho`` on (X, ..., X, dX, ..., dX) by index summation.

    Sums ``prod_k M_k[j_k, j_{rho^-1(k)}]`` over all index tuples, wedging
    the differentials in slot order. No 1/(p!q!) averaging is applied.
    """
    _check(rho, split)
    if n < 1:
        raise ValueError(f"matrix size must be >= 1, got {n}")
    if split.r > caps.max_degree:
        raise SizeLimitError(f"degree r={split.r} exceeds cap max_degree={caps.max_degree}")
    if n**split.r > caps.max_tuples:
        raise SizeLimitError(f"n^r = {n**split.r} exceeds cap max_tuples={caps.max_tuples}")
    back = [inverse(rho)(k) - 1 for k in range(1, split.r + 1)]
    p = split.p
    terms: dict = {}
    for j in itertools.product(range(1, n + 1), repeat=split.r):
        pairs = [(j[k], j[back[k]]) for k in range(split.r)]
        sign, m = make_monomial(pairs[:p], pairs[p:])
        if sign:
            terms[m] = terms.get(m, 0) + sign
    return Form.from_terms(n, ((c, m) for m, c in terms.items()))


def cycle_factorization(rho: Permutation, split: SlotSplit) -> CycleFactorization:
    """Signed product of canonical generators equal to ``phi_form(rho, split, n)``.

    Each cycle is walked as ``k -> rho^-1(k)`` from its smallest antisymmetric
    slot. A purely symmetric cycle of length c gives tau^c. Otherwise the walk
    reads dX X^m1 dX X^m2 ... dX X^ms, which is omega^(ms, m1, ..., m_{s-1})
    with its differentials in walk order. The sign collects the canonical
    label signs and the parity of the walked antisymmetric slots against slot
    order.
    """
    _check(rho, split)
    rho_inv = inverse(rho)
    sign = 1
    factors = []
    walked: list[int] = []
    for cycle in cycle_decomposition(rho):
        anti = [k for k in cycle if split.is_antisymmetric(k)]
        if not anti:
            factors.append(canonical_label("tau", (len(cycle),)))
            continue
        start = min(anti)
        gaps = []
        k = start
        while True:
            walked.append(k)
            gap = 0
            k = rho_inv(k)
            while not split.is_antisymmetric(k):
                gap += 1
                k = rho_inv(k)
            gaps.append(gap)
            if k == start:
                break
        label = canonical_label("omega", (gaps[-1],) + tuple(gaps[:-1]))
        sign *= label.sign
        factors.append(label)
    sign *= sequence_sign(walked)
    return CycleFactorization(sign, tuple(factors))


def factorization_form(fact: CycleFactorization, n: int) -> Form:
    """sign times the wedge of the canonical factors in emitted order."""
    if fact.is_zero:
        return Form(n)
    result = Form.constant(n, fact.sign)
    for label in fact.factors:
        result = wedge(result, generator_form(label, n))
    return result


def spanning_set(split: SlotSplit, n: int, caps: Caps = DEFAULT_CAPS) -> list[tuple[Permutation, Form]]:
    """``(rho, phi_form(rho))`` for every rho in S_{p+q}, in lexicographic order."""
    caps.check_degree(split.p, split.q)
    caps.check_n(n)
    return [(rho, phi_form(rho, split, n, caps)) for rho in enumerate_symmetric_group(split.r)]
