"""Exit criteria. Every check is exact; each test records one PASS/FAIL line."""

import itertools
import os
import random
import subprocess
import sys
from fractions import Fraction

from oracles import partitions
from strategies import forms
from traceforms.cli import decompose, main, verify
from traceforms.config import DEFAULT_CAPS, Caps
from traceforms.forms import Form, exterior_derivative
from traceforms.generators import (
    decomposition_form,
    enumerate_generator_products,
    newton_identity_residual,
    omega,
    tau,
)
from traceforms.invariance import conjugation_pullback, invariant_subspace, lie_derivative, matrix_units
from traceforms.linalg import monomial_basis, rank, vectorize
from traceforms.perm import cycle_decomposition, enumerate_symmetric_group
from traceforms.schurweyl import SlotSplit, cycle_factorization, factorization_form, phi_form, spanning_set


def test_1_theorem_three_way_span_equality(criterion):
    failures = []
    cells = 0
    for n, max_total in [(1, 5), (2, 5), (3, 4)]:
        for report in verify(n, max_total, DEFAULT_CAPS):
            cells += 1
            if report.verdict != "pass":
                failures.append(report.to_text())
    ok = criterion("1 theorem: span(generators) = span(F(rho)) = invariant kernel", not failures, f"{cells} cells")
    assert ok, failures


def test_2_cycle_formula_oracle(criterion):
    failures = []
    checked = 0
    for n in (2, 3):
        for r in range(0, 6):
            for rho in enumerate_symmetric_group(r):
                for p in range(r + 1):
                    split = SlotSplit(p, r - p)
                    fact = cycle_factorization(rho, split)
                    checked += 1
                    if len(fact.factors) != len(cycle_decomposition(rho)):
                        failures.append(("count", rho, split))
                    elif factorization_form(fact, n) != phi_form(rho, split, n):
                        failures.append(("form", rho, split, n))
    ok = criterion("2 cycle formula: sign * prod(factors) = F(rho), |factors| = #cycles", not failures, f"{checked} cases")
    assert ok, failures[:5]


def _generators_for_invariance():
    gens = [("tau", (ell,)) for ell in range(1, 5)]
    for p in range(1, 4):
        for ells in itertools.product(range(4), repeat=p):
            if sum(ells) <= 3:
                gens.append(("omega", ells))
    return gens


def _form(kind, exps, n):
    return tau(exps[0], n) if kind == "tau" else omega(exps, n)


def test_3_generator_invariance(criterion):
    failures = []
    gens = _generators_for_invariance()
    for n in (1, 2, 3):
        for kind, exps in gens:
            f = _form(kind, exps, n)
            for gen in matrix_units(n):
                if lie_derivative(f, gen):
                    failures.append(("lie", kind, exps, n, gen))
    matrices = [[[1, 1], [0, 1]], [[2, Fraction(1, 3)], [1, 1]]]  # det 1 and det 5/3
    for kind, exps in gens:
        f = _form(kind, exps, 2)
        for g in matrices:
            if conjugation_pullback(f, g) != f:
                failures.append(("pullback", kind, exps, g))
    ok = criterion("3 generator invariance: Lie derivatives vanish, conjugation fixes", not failures, f"{len(gens)} generators")
    assert ok, failures[:5]


def test_4_algebraic_identities(criterion):
    from hypothesis import given, settings

    failures = []
    for n in (1, 2, 3):
        for p in range(1, 5):
            for ells in itertools.product(range(3), repeat=p):
                if omega(ells, n) != (-1) ** (p - 1) * omega(ells[1:] + ells[:1], n):
                    failures.append(("cyclic", ells, n))
        for ell in range(0, 4):
            if omega((ell, ell), n):
                failures.append(("square", ell, n))
        for ell in range(1, 5):
            if exterior_derivative(tau(ell, n)) != ell * omega((ell - 1,), n):
                failures.append(("d tau", ell, n))

    @settings(max_examples=100, deadline=None, database=None)
    @given(forms())
    def d_squared(f):
        assert exterior_derivative(exterior_derivative(f)).is_zero()

    try:
        d_squared()
    except AssertionError as exc:
        failures.append(("d^2", str(exc)))
    ok = criterion("4 identities: cyclic sign, omega^{ll} = 0, d tau = l omega, d^2 = 0", not failures)
    assert ok, failures[:5]


def test_5_newton_formula(criterion):
    residuals = {(k, n): newton_identity_residual(k, n) for n in (1, 2, 3) for k in range(1, n + 1)}
    bad = [key for key, r in residuals.items() if r]
    ok = criterion("5 Newton's formula residuals vanish for 1 <= k <= n <= 3", not bad)
    assert ok, bad


def test_6_stable_range_and_n1_collapse(criterion):
    caps = Caps(max_n=4)
    failures = []
    for p in range(1, 5):
        n = p
        basis = monomial_basis(n, p, 0)
        sw = rank([vectorize(f, basis) for _, f in spanning_set(SlotSplit(p, 0), n, caps)])
        kernel = len(invariant_subspace(p, 0, n, caps))
        if not sw == kernel == partitions(p):
            failures.append(("stable", p, n, sw, kernel, partitions(p)))
    expected_q0 = [1, 2, 3, 5]
    if [partitions(p) for p in range(1, 5)] != expected_q0:
        failures.append(("partition counts", expected_q0))
    for s in range(2, 5):
        for ells in itertools.product(range(3), repeat=s):
            if omega(ells, 1):
                failures.append(("n=1 omega", ells))
    for total in range(6):
        for p in range(total + 1):
            q = total - p
            expected = 1 if q <= 1 else 0
            if len(invariant_subspace(p, q, 1)) != expected:
                failures.append(("n=1 dim", p, q))
    ok = criterion("6 stable range dims 1,2,3,5 at n = p; n = 1 collapse", not failures)
    assert ok, failures


def test_7_decomposition_roundtrip(criterion):
    rng = random.Random(20240607)
    failures = []
    trials = 0
    for total in range(5):
        for p in range(total + 1):
            q = total - p
            products = enumerate_generator_products(p, q, 2)
            for _ in range(25):
                target = Form(2)
                for labels, g in products:
                    if rng.random() < 0.7:
                        target = target + Fraction(rng.randint(-9, 9), rng.randint(1, 6)) * g
                trials += 1
                dec = decompose(target, DEFAULT_CAPS, (p, q))
                if not dec.invariant or decomposition_form(dec.coefficients, 2) != target:
                    failures.append((p, q, str(target)))
    ok = criterion("7 decomposition round-trip (25 random combinations per cell, n=2)", not failures, f"{trials} trials")
    assert ok, failures[:3]


def test_8_determinism(criterion, capsys):
    outputs = []
    for fmt in ("text", "structured", "text"):
        assert main(["--format", fmt, "verify", "--n", "2", "--max", "4"]) == 0
        outputs.append((fmt, capsys.readouterr().out))
    in_process = outputs[0][1] == outputs[2][1]
    runs = []
    for seed in ("1", "2"):
        env = dict(os.environ, PYTHONHASHSEED=seed)
        proc = subprocess.run(
            [sys.executable, "-m", "traceforms", "--format", "structured", "verify", "--n", "2", "--max", "4"],
            capture_output=True,
            env=env,
            check=False,
        )
        runs.append((proc.returncode, proc.stdout))
    cross_process = runs[0] == runs[1] and runs[0][1].decode() == outputs[1][1]
    ok = criterion("8 determinism: repeated verify runs are byte-identical", in_process and cross_process)
    assert ok
