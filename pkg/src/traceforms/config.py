"""Size caps that keep every computation at desk scale."""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

from .errors import ParseError, SizeLimitError

ENV_VAR = "TRACEFORMS_CAPS"


@dataclass(frozen=True)
class Caps:
    max_degree: int = 6  # p + q, also the Schur-Weyl permutation degree
    max_n: int = 3
    max_tuples: int = 10**6  # index tuples summed per phi_form
    max_perm_degree: int = 8  # enumerate_symmetric_group

    def check_degree(self, p: int, q: int) -> None:
        if p < 0 or q < 0:
            raise ValueError(f"negative bidegree ({p}, {q})")
        if p + q > self.max_degree:
            raise SizeLimitError(
                f"total degree p+q={p + q} exceeds cap max_degree={self.max_degree}"
            )

    def check_n(self, n: int) -> None:
        if n < 1:
            raise ValueError(f"matrix size must be >= 1, got {n}")
        if n > self.max_n:
            raise SizeLimitError(f"matrix size n={n} exceeds cap max_n={self.max_n}")


DEFAULT_CAPS = Caps()


def caps_from_env(environ=None) -> Caps:
    """Read ``TRACEFORMS_CAPS`` (e.g. ``"max_degree=5,max_n=4"``) over the defaults."""
    environ = os.environ if environ is None else environ
    raw = environ.get(ENV_VAR, "").strip()
    if not raw:
        return DEFAULT_CAPS
    updates = {}
    for item in raw.split(","):
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in Caps.__dataclass_fields__:
            raise ParseError(f"{ENV_VAR}: bad entry {item!r}")
        try:
            updates[key] = int(value)
        except ValueError:
            raise ParseError(f"{ENV_VAR}: bad value in {item!r}") from None
    return replace(DEFAULT_CAPS, **updates)
