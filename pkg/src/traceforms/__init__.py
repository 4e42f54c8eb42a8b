"""Exact computation with GL_n-invariant differential forms on n x n matrices."""

from .config import DEFAULT_CAPS, Caps
from .forms import Form, FormMatrix, coordinate_matrix, differential_matrix, exterior_derivative, wedge
from .generators import canonical_label, enumerate_generator_products, omega, sigma, tau
from .invariance import conjugation_pullback, invariant_subspace, is_invariant, lie_derivative
from .perm import Permutation
from .schurweyl import SlotSplit, cycle_factorization, phi_form, spanning_set

__all__ = [
    "Caps",
    "DEFAULT_CAPS",
    "Form",
    "FormMatrix",
    "Permutation",
    "SlotSplit",
    "canonical_label",
    "conjugation_pullback",
    "coordinate_matrix",
    "cycle_factorization",
    "differential_matrix",
    "enumerate_generator_products",
    "exterior_derivative",
    "invariant_subspace",
    "is_invariant",
    "lie_derivative",
    "omega",
    "phi_form",
    "sigma",
    "spanning_set",
    "tau",
    "wedge",
]
