"""Permutations of tensor slots ``1..r`` in one-line notation.

Slots are 1-based: ``Permutation((2, 3, 1))`` sends 1 -> 2, 2 -> 3, 3 -> 1.
"""

from __future__ import annotations

import itertools
import re
from typing import Iterable, Sequence

from .errors import ParseError, SizeLimitError, SizeMismatchError

MAX_ENUMERATION_DEGREE = 8


class Permutation:
    __slots__ = ("images",)

    def __init__(self, images: Iterable[int]):
        images = tuple(int(k) for k in images)
        if sorted(images) != list(range(1, len(images) + 1)):
            raise ValueError(f"{list(images)} is not a permutation of 1..{len(images)}")
        self.images = images

    @classmethod
    def identity(cls, r: int) -> "Permutation":
        return cls(range(1, r + 1))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], r: int) -> "Permutation":
        images = list(range(1, r + 1))
        for cycle in cycles:
            for a, b in zip(cycle, tuple(cycle[1:]) + (cycle[0],)):
                images[a - 1] = b
        return cls(images)

    @classmethod
    def parse(cls, text: str) -> "Permutation":
        """Parse ``"2 3 1"`` or ``"2,3,1"``."""
        tokens = [t for t in re.split(r"[\s,]+", text.strip()) if t]
        try:
            return cls(int(t) for t in tokens)
        except ValueError as exc:
            raise ParseError(f"malformed permutation {text!r}: {exc}") from None

    @property
    def r(self) -> int:
        return len(self.images)

    def __call__(self, k: int) -> int:
        return self.images[k - 1]

    def __len__(self) -> int:
        return len(self.images)

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self.images == other.images

    def __hash__(self) -> int:
        return hash(self.images)

    def __lt__(self, other: "Permutation") -> bool:
        return self.images < other.images

    def __repr__(self) -> str:
        return f"Permutation({list(self.images)})"

    def __str__(self) -> str:
        return " ".join(map(str, self.images))

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)


def compose(rho: Permutation, sigma: Permutation) -> Permutation:
    """Return ``rho o sigma``, i.e. ``k -> rho(sigma(k))``."""
    if rho.r != sigma.r:
        raise SizeMismatchError(f"cannot compose degrees {rho.r} and {sigma.r}")
    return Permutation(rho.images[s - 1] for s in sigma.images)


def inverse(rho: Permutation) -> Permutation:
    images = [0] * rho.r
    for k, image in enumerate(rho.images, start=1):
        images[image - 1] = k
    return Permutation(images)


def cycle_decomposition(rho: Permutation) -> list[tuple[int, ...]]:
    """Cycles of ``rho``, each starting at its minimum, listed by increasing minimum.

    Fixed points are kept as 1-cycles.
    """
    seen = [False] * (rho.r + 1)
    cycles = []
    for start in range(1, rho.r + 1):
        if seen[start]:
            continue
        cycle = []
        k = start
        while not seen[k]:
            seen[k] = True
            cycle.append(k)
            k = rho(k)
        cycles.append(tuple(cycle))
    return cycles


def parity(rho: Permutation) -> int:
    """Sign of ``rho`` as +1 or -1."""
    transpositions = sum(len(c) - 1 for c in cycle_decomposition(rho))
    return -1 if transpositions % 2 else 1


def sequence_sign(seq: Sequence) -> int:
    """Sign of the permutation sorting ``seq`` (distinct, comparable items)."""
    inversions = sum(
        1 for a, b in itertools.combinations(seq, 2) if a > b
    )
    return -1 if inversions % 2 else 1


def enumerate_symmetric_group(r: int) -> list[Permutation]:
    """All ``r!`` permutations of degree ``r`` in lexicographic order."""
    if r < 0 or r > MAX_ENUMERATION_DEGREE:
        raise SizeLimitError(
            f"symmetric group degree {r} outside 0..{MAX_ENUMERATION_DEGREE}"
        )
    return [Permutation(p) for p in itertools.permutations(range(1, r + 1))]
