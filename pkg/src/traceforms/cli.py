"""Command-line interface.

Exit codes: 0 success (negative mathematical verdicts included), 1 theorem
verification failed, 2 invalid input or cap violation, 3 internal
inconsistency.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .config import Caps, caps_from_env
from .errors import BidegreeError, ParseError, TraceFormsError
from .forms import Form, homogeneous_bidegree, loads, to_record, to_text
from .generators import (
    enumerate_generator_products,
    format_label,
    format_product,
    newton_identity_residual,
    parse_product,
    product_form,
)
from .invariance import (
    LieGenerator,
    conjugation_pullback,
    invariant_subspace,
    matrix_record,
    non_invariance_witness,
    parse_matrix_record,
)
from .linalg import monomial_basis, rank, solve_in_span, span_equal, vectorize
from .perm import Permutation, cycle_decomposition
from .schurweyl import SlotSplit, cycle_factorization, phi_form, spanning_set


class InternalInconsistency(TraceFormsError):
    """The implementation contradicted itself; exit code 3."""


# -- library entry points -----------------------------------------------------


@dataclass
class VerificationReport:
    n: int
    p: int
    q: int
    dim_generator_span: int
    dim_schurweyl_span: int
    dim_invariant_kernel: int
    verdict: str
    elapsed: float = 0.0

    def to_record(self, timing: bool = False) -> dict:
        record = {
            "n": self.n,
            "p": self.p,
            "q": self.q,
            "generators": self.dim_generator_span,
            "schurweyl": self.dim_schurweyl_span,
            "kernel": self.dim_invariant_kernel,
            "verdict": self.verdict,
        }
        if timing:
            record["elapsed"] = round(self.elapsed, 3)
        return record

    def to_text(self, timing: bool = False) -> str:
        line = (
            f"n={self.n} p={self.p} q={self.q} generators={self.dim_generator_span} "
            f"schurweyl={self.dim_schurweyl_span} kernel={self.dim_invariant_kernel} "
            f"{self.verdict.upper()}"
        )
        return line + (f" ({self.elapsed:.3f}s)" if timing else "")


def verify_cell(p: int, q: int, n: int, caps: Caps) -> VerificationReport:
    start = time.perf_counter()
    basis = monomial_basis(n, p, q)
    gens = [vectorize(f, basis) for _, f in enumerate_generator_products(p, q, n, caps)]
    sw = [vectorize(f, basis) for _, f in spanning_set(SlotSplit(p, q), n, caps)]
    kernel = invariant_subspace(p, q, n, caps)
    dims = (rank(gens), rank(sw), len(kernel))
    ok = (
        dims[0] == dims[1] == dims[2]
        and span_equal(gens, sw)
        and span_equal(sw, kernel)
        and span_equal(gens, kernel)
    )
    return VerificationReport(n, p, q, *dims, "pass" if ok else "fail", time.perf_counter() - start)


def verify(n: int, max_total_degree: int, caps: Caps) -> list[VerificationReport]:
    """One report per (p, q) with p + q <= max_total_degree, ordered by (p+q, p)."""
    caps.check_n(n)
    caps.check_degree(max_total_degree, 0)
    return [
        verify_cell(p, total - p, n, caps)
        for total in range(max_total_degree + 1)
        for p in range(total + 1)
    ]


def span_dimensions(p: int, q: int, n: int, caps: Caps, method: str = "both") -> dict:
    caps.check_degree(p, q)
    caps.check_n(n)
    result: dict = {}
    basis = monomial_basis(n, p, q)
    sw = kernel = None
    if method in ("span", "both"):
        sw = [vectorize(f, basis) for _, f in spanning_set(SlotSplit(p, q), n, caps)]
        result["span"] = rank(sw)
    if method in ("kernel", "both"):
        kernel = invariant_subspace(p, q, n, caps)
        result["kernel"] = len(kernel)
    if method == "both":
        result["equal"] = span_equal(sw, kernel)
    return result


@dataclass
class Decomposition:
    invariant: bool
    witness: LieGenerator | None
    bidegree: tuple[int, int] | None
    coefficients: dict  # tuple[GeneratorLabel, ...] -> Fraction


def decompose(f: Form, caps: Caps, bidegree: tuple[int, int] | None = None) -> Decomposition:
    """Express an invariant form over the generator products of its bidegree."""
    degree = homogeneous_bidegree(f)
    if f and degree is None:
        raise BidegreeError(f"form is not homogeneous: bidegrees {sorted({m.bidegree for m in f.terms})}")
    if degree is None:
        degree = bidegree
    if degree is not None:
        caps.check_degree(*degree)
    caps.check_n(f.n)
    witness = non_invariance_witness(f)
    if witness is not None:
        return Decomposition(False, witness, degree, {})
    if degree is None:
        return Decomposition(True, None, None, {})
    products = enumerate_generator_products(*degree, f.n, caps)
    single = _single_product_multiple(f, products)
    if single is not None:
        return Decomposition(True, None, degree, single)
    basis = monomial_basis(f.n, *degree)
    coeffs = solve_in_span(vectorize(f, basis), [vectorize(g, basis) for _, g in products])
    if coeffs is None:
        raise InternalInconsistency(
            f"invariant form of bidegree {degree} is not in the span of generator products"
        )
    return Decomposition(True, None, degree, {labels: c for (labels, _), c in zip(products, coeffs)})


def _single_product_multiple(f: Form, products) -> dict | None:
    """Coefficients {labels: c} if f is c times one product (first match), else None.

    Products can be linearly dependent for small n; this keeps a generator
    decomposing onto its own label instead of onto earlier pivot columns.
    """
    if not f:
        return None
    m, c = next(iter(f.terms.items()))
    for labels, g in products:
        if m in g.terms and Fraction(c) / Fraction(g.terms[m]) * g == f:
            scale = Fraction(c) / Fraction(g.terms[m])
            return {lab: (scale if lab == labels else Fraction(0)) for lab, _ in products}
    return None


def spot_check_matrices(n: int) -> list[tuple[tuple[Fraction, ...], ...]]:
    """A unipotent g (I + E_1n) and a lower-triangular g with determinant 2."""
    unipotent = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    if n > 1:
        unipotent[0][n - 1] = Fraction(1)
    scaled = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    scaled[0][0] = Fraction(2)
    if n > 1:
        scaled[n - 1][0] = Fraction(1)
    return [tuple(map(tuple, unipotent)), tuple(map(tuple, scaled))]


# -- output helpers -----------------------------------------------------------


def _fmt_q(c: Fraction) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _emit(args, text: str, record) -> None:
    if args.format == "structured":
        print(json.dumps(record, sort_keys=False))
    else:
        print(text)


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path!r}: {exc.strerror}") from None


# -- subcommands --------------------------------------------------------------


def cmd_gen(args, caps: Caps) -> int:
    labels = parse_product(args.label)
    caps.check_n(args.n)
    p = sum(lab.bidegree[0] for lab in labels)
    q = sum(lab.bidegree[1] for lab in labels)
    caps.check_degree(p, q)
    form = product_form(labels, args.n)
    _emit(args, to_text(form), to_record(form))
    return 0


def cmd_perm(args, caps: Caps) -> int:
    rho = Permutation.parse(args.perm)
    split = SlotSplit(args.p, args.q)
    if rho.r != split.r:
        raise ParseError(f"permutation {args.perm!r} has degree {rho.r}, expected p+q={split.r}")
    if args.mode == "evaluate":
        caps.check_n(args.n)
        form = phi_form(rho, split, args.n, caps)
        _emit(args, to_text(form), to_record(form))
        return 0
    fact = cycle_factorization(rho, split)
    count = len(cycle_decomposition(rho))
    if len(fact.factors) != count:
        raise InternalInconsistency("factor count differs from cycle count")
    record = {
        "sign": fact.sign,
        "factors": [format_label(f) for f in fact.factors],
        "count": count,
        "zero": fact.is_zero,
    }
    text = (
        f"sign: {fact.sign:+d}\n"
        f"factors: {format_product(fact.factors)}\n"
        f"count: {count}" + ("\nzero: true" if fact.is_zero else "")
    )
    _emit(args, text, record)
    return 0


def cmd_dim(args, caps: Caps) -> int:
    result = span_dimensions(args.p, args.q, args.n, caps, args.method)
    text = "\n".join(f"{k}: {str(v).lower()}" for k, v in result.items())
    _emit(args, text, result)
    return 0


def _decomposition_record(dec: Decomposition) -> dict:
    record: dict = {"invariant": dec.invariant}
    if not dec.invariant:
        record["witness"] = str(dec.witness)
        return record
    record["bidegree"] = list(dec.bidegree) if dec.bidegree else None
    record["coefficients"] = {format_product(k): _fmt_q(v) for k, v in dec.coefficients.items()}
    return record


def cmd_decompose(args, caps: Caps) -> int:
    form = loads(_read_input(args.file), args.n)
    bidegree = (args.p, args.q) if args.p is not None and args.q is not None else None
    dec = decompose(form, caps, bidegree)
    if not dec.invariant:
        text = f"non-invariant: witness {dec.witness}"
    elif not dec.coefficients:
        text = "all coefficients zero"
    else:
        text = "\n".join(f"{format_product(k)}: {_fmt_q(v)}" for k, v in dec.coefficients.items())
    _emit(args, text, _decomposition_record(dec))
    return 0


def cmd_check_invariance(args, caps: Caps) -> int:
    form = loads(_read_input(args.file), args.n)
    caps.check_n(form.n)
    witness = non_invariance_witness(form)
    matrices = spot_check_matrices(form.n)
    if args.g:
        matrices.append(parse_matrix_record(_read_input(args.g)))
    checks = [(g, conjugation_pullback(form, g) == form) for g in matrices]
    if witness is None and not all(fixed for _, fixed in checks):
        raise InternalInconsistency("Lie-invariant form moved by a conjugation")
    record = {
        "invariant": witness is None,
        "witness": str(witness) if witness else None,
        "pullback": [{"g": matrix_record(g), "fixed": fixed} for g, fixed in checks],
    }
    lines = [f"invariant: {str(witness is None).lower()}"]
    if witness:
        lines.append(f"witness: {witness}")
    for g, fixed in checks:
        rows = ";".join(",".join(_fmt_q(c) for c in row) for row in g)
        lines.append(f"pullback [{rows}]: {'fixed' if fixed else 'moved'}")
    _emit(args, "\n".join(lines), record)
    return 0


def cmd_newton(args, caps: Caps) -> int:
    caps.check_n(args.n)
    ks = [args.k] if args.k is not None else range(1, args.n + 1)
    residuals = {k: newton_identity_residual(k, args.n) for k in ks}
    text = "\n".join(f"k={k}: {to_text(r)}" for k, r in residuals.items())
    _emit(args, text, {str(k): to_record(r) for k, r in residuals.items()})
    if any(residuals.values()):
        raise InternalInconsistency("nonzero Newton identity residual")
    return 0


def cmd_verify(args, caps: Caps) -> int:
    reports = verify(args.n, args.max, caps)
    if args.format == "structured":
        print(json.dumps([r.to_record(args.timing) for r in reports]))
    else:
        for r in reports:
            print(r.to_text(args.timing))
    return 0 if all(r.verdict == "pass" for r in reports) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="traceforms",
        description="Invariant differential forms on n x n matrices.",
    )
    parser.add_argument("--format", choices=("text", "structured"), default="text")
    parser.add_argument(
        "--caps", help="override caps, e.g. 'max_degree=5,max_n=4' (same syntax as TRACEFORMS_CAPS)"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("text", "structured"), default=argparse.SUPPRESS)
        return p

    p = common(sub.add_parser("gen", help="print tau/omega or a product of them"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("label", help="e.g. tau:2, omega:0,1 or tau:1*omega:0")
    p.set_defaults(func=cmd_gen)

    p = common(sub.add_parser("perm", help="evaluate or factor a permutation invariant"))
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--mode", choices=("evaluate", "factor"), default="evaluate")
    p.add_argument("perm", help="one-line notation, e.g. '2 3 1'")
    p.set_defaults(func=cmd_perm)

    p = common(sub.add_parser("dim", help="dimensions of the Schur-Weyl span and invariant kernel"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--method", choices=("span", "kernel", "both"), default="both")
    p.set_defaults(func=cmd_dim)

    p = common(sub.add_parser("decompose", help="express an invariant form over generator products"))
    p.add_argument("file", help="form file (text or JSON record); '-' for stdin")
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=int, help="bidegree to use when the input is 0")
    p.add_argument("--q", type=int)
    p.set_defaults(func=cmd_decompose)

    p = common(sub.add_parser("check-invariance", help="Lie-derivative test plus conjugation spot check"))
    p.add_argument("file")
    p.add_argument("--n", type=int)
    p.add_argument("--g", help="extra conjugating matrix record file")
    p.set_defaults(func=cmd_check_invariance)

    p = common(sub.add_parser("newton", help="print Newton identity residuals"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int)
    p.set_defaults(func=cmd_newton)

    p = common(sub.add_parser("verify", help="three-way span check for every (p, q)"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--max", type=int, required=True, help="maximum total degree p+q")
    p.add_argument("--timing", action="store_true", help="append elapsed time (not deterministic)")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        caps = caps_from_env()
        if args.caps:
            caps = caps_from_env({"TRACEFORMS_CAPS": args.caps})
        return args.func(args, caps)
    except InternalInconsistency as exc:
        print(f"error: internal inconsistency: {exc}", file=sys.stderr)
        return 3
    except (TraceFormsError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
