"""Certified simple-spectrum perturbation and Kronecker binomial inversion.

Core ideas: invertible matrices with pairwise-distinct eigenvalues are
generic, so a seeded randomized search finds them arbitrarily close to any
input, and every returned matrix carries a recomputable certificate
(eigenvalue gap, invertibility margin, and a safe perturbation radius).  On
top of that sits a constructive inverse for X = A (x) C + B (x) D as a sum
of at most min{p, q} Kronecker products.
"""

from .errors import (
    EXIT_CODES,
    AttemptsExhaustedError,
    DegeneratePencilError,
    EigenConvergenceError,
    InputError,
    KronspecError,
    ParseError,
    PreconditionError,
    ReconstructionError,
    SingularMatrixError,
)
from .kron import (
    BinomialInverseOptions,
    KroneckerBinomial,
    KronRankReport,
    KronRankWarning,
    KronSumDecomposition,
    adjugate_poly,
    binomial_inverse,
    evaluate_binomial,
    kron_product,
    kron_rank,
    pencil_spectrum,
    preprocess_binomial,
    rearrange,
    reconstruct,
)
from .matio import format_matrix, parse_matrix, read_matrix, write_matrix
from .matrices import (
    Field,
    Matrix,
    RandomSource,
    add,
    as_matrix,
    condition_number,
    determinant,
    frobenius_norm,
    identity,
    inverse,
    is_invertible,
    multiply,
    retag,
    sample_gaussian,
    scale,
    singular_values,
    smallest_singular_value,
    spectral_norm,
    subtract,
    zeros,
)
from .perturb import (
    PerturbOutcome,
    PerturbSpec,
    SelfMap,
    SelfMapKind,
    apply_selfmap,
    perturb_pair,
    perturb_pair_inverse,
    perturb_single,
    perturb_tuple,
)
from .spectra import (
    DEFAULT_GAP_TOL,
    SpectrumReport,
    certify_openness,
    char_poly_discriminant,
    eigendecompose,
    quadratic_discriminant,
    simplicity_report,
)

__all__ = [
    "EXIT_CODES",
    "AttemptsExhaustedError",
    "DegeneratePencilError",
    "EigenConvergenceError",
    "InputError",
    "KronspecError",
    "ParseError",
    "PreconditionError",
    "ReconstructionError",
    "SingularMatrixError",
    "BinomialInverseOptions",
    "KroneckerBinomial",
    "KronRankReport",
    "KronRankWarning",
    "KronSumDecomposition",
    "adjugate_poly",
    "binomial_inverse",
    "evaluate_binomial",
    "kron_product",
    "kron_rank",
    "pencil_spectrum",
    "preprocess_binomial",
    "rearrange",
    "reconstruct",
    "format_matrix",
    "parse_matrix",
    "read_matrix",
    "write_matrix",
    "Field",
    "Matrix",
    "RandomSource",
    "add",
    "as_matrix",
    "condition_number",
    "determinant",
    "frobenius_norm",
    "identity",
    "inverse",
    "is_invertible",
    "multiply",
    "retag",
    "sample_gaussian",
    "scale",
    "singular_values",
    "smallest_singular_value",
    "spectral_norm",
    "subtract",
    "zeros",
    "PerturbOutcome",
    "PerturbSpec",
    "SelfMap",
    "SelfMapKind",
    "apply_selfmap",
    "perturb_pair",
    "perturb_pair_inverse",
    "perturb_single",
    "perturb_tuple",
    "DEFAULT_GAP_TOL",
    "SpectrumReport",
    "certify_openness",
    "char_poly_discriminant",
    "eigendecompose",
    "quadratic_discriminant",
    "simplicity_report",
]
