"""Exact computations with s-linked chains, linked alternating and symplectic forms,
and linked Grassmannians over k(s) and at the special fiber s = 0."""

from .chain import LinkedChain, check_s_linked, check_weakly_linked, composite, rank_profile, standard_chain, structure_decomposition
from .errors import LinkedGrassError
from .forms import LinkedForm, check_symplectic, exponent, extend_form, form_space_dimension, restrict_form
from .grassmann import LinkedSubspace, TangentReport, example_fixture, push_and_saturate, random_exact_isotropic, verify_point
from .linalg import Matrix, Subspace
from .scalar import FieldDesc, Scalar

__all__ = [
    "FieldDesc",
    "LinkedChain",
    "LinkedForm",
    "LinkedGrassError",
    "LinkedSubspace",
    "Matrix",
    "Scalar",
    "Subspace",
    "TangentReport",
    "check_s_linked",
    "check_symplectic",
    "check_weakly_linked",
    "composite",
    "example_fixture",
    "exponent",
    "extend_form",
    "form_space_dimension",
    "push_and_saturate",
    "random_exact_isotropic",
    "rank_profile",
    "restrict_form",
    "standard_chain",
    "structure_decomposition",
    "verify_point",
]
