"""Eigenvalues plus machine-checkable simplicity and openness certificates.

A spectrum counts as *simple* when every pairwise eigenvalue gap clears a
threshold scaled to the magnitudes of that pair, so a few huge eigenvalues
of a badly non-normal matrix cannot mask genuinely separated small ones;
for a simple spectrum the report also carries a certified perturbation
radius ``min_gap / (2 * kappa2(V))`` (Bauer-Fike with the eigenvector-matrix
condition number), below which any spectral-norm perturbation provably
keeps the spectrum simple.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EigenConvergenceError, InputError, PreconditionError
from .matrices import (
    TOL_SING,
    Field,
    Matrix,
    RandomSource,
    add,
    frobenius_norm,
    sample_gaussian,
    scale,
    singular_values,
    spectral_norm,
)

DEFAULT_GAP_TOL = 1e-8

# Residual contract of the dense eigensolver, ||a v - lambda v||_2 <= TOL_EIG * ||a||_2,
# honored for n <= 64.
TOL_EIG = 1e-10


@dataclass(frozen=True)
class SpectrumReport:
    """Certificate summarizing one matrix's spectrum.

    ``eigenvalues`` are sorted lexicographically by (real, imag) so reports
    are bit-reproducible.  ``min_gap`` is +inf for 1x1 input; ``safe_radius``
    is positive exactly when the spectrum is simple (and may be +inf for 1x1).
    ``eig_condition`` is defined only for simple spectra.
    """

    eigenvalues: tuple[complex, ...]
    min_gap: float
    is_simple: bool
    is_invertible: bool
    eig_condition: float | None
    safe_radius: float
    gap_tol_used: float

    def as_payload(self) -> dict:
        return {
            "eigenvalues": [[z.real, z.imag] for z in self.eigenvalues],
            "min_gap": _finite_or_none(self.min_gap),
            "is_simple": self.is_simple,
            "is_invertible": self.is_invertible,
            "eig_condition": _finite_or_none(self.eig_condition),
            "safe_radius": _finite_or_none(self.safe_radius),
            "gap_tol_used": self.gap_tol_used,
        }


def _finite_or_none(x: float | None) -> float | None:
    # +inf (1x1 spectra) has no JSON representation; serialize as null
    if x is None or not math.isfinite(x):
        return None
    return float(x)


def eigendecompose(a: Matrix) -> tuple[np.ndarray, Matrix]:
    """Dense eigensolve; returns (eigenvalues, eigenvector matrix).

    Eigenvalues come back sorted by (real, imag); eigenvector columns are
    unit 2-norm and permuted consistently.
    """
    if not a.is_square:
        raise InputError(f"eigendecomposition needs a square matrix, got {a.n_rows}x{a.n_cols}")
    try:
        w, v = np.linalg.eig(a.data)
    except np.linalg.LinAlgError as exc:
        raise EigenConvergenceError(
            f"eigensolver did not converge for a {a.n_rows}x{a.n_cols} matrix within the LAPACK iteration cap"
        ) from exc
    order = np.lexsort((w.imag, w.real))
    return w[order], Matrix(v[:, order], Field.COMPLEX)


def _min_pairwise_gap(w: np.ndarray) -> float:
    if w.size < 2:
        return float("inf")
    diff = np.abs(w[:, None] - w[None, :])
    np.fill_diagonal(diff, np.inf)
    return float(diff.min())


def _pairwise_simple(w: np.ndarray, gap_tol: float) -> bool:
    # Each pair is judged against its own scale: |li - lj| must exceed
    # gap_tol * max(1, |li|, |lj|).  A per-matrix norm threshold would let
    # one large eigenvalue veto well-separated small ones whenever the
    # matrix is far from normal (e.g. a product with a near-singular
    # factor), even though those small gaps are computed accurately.
    if w.size < 2:
        return True
    diff = np.abs(w[:, None] - w[None, :])
    mags = np.abs(w)
    lim = gap_tol * np.maximum(1.0, np.maximum(mags[:, None], mags[None, :]))
    np.fill_diagonal(diff, np.inf)
    return bool(np.all(diff > lim))


def simplicity_report(a: Matrix, gap_tol: float = DEFAULT_GAP_TOL) -> SpectrumReport:
    """Compute the full simplicity/invertibility certificate for ``a``.

    Simplicity requires every eigenvalue pair to be separated by more than
    ``gap_tol * max(1, |l_i|, |l_j|)``.  Invertibility requires every
    eigenvalue magnitude to exceed ``gap_tol * max(1, ||a||_F)`` and
    sigma_min/sigma_max to clear the global singularity gate.
    """
    if gap_tol <= 0:
        raise InputError(f"gap_tol must be positive, got {gap_tol}")
    w, v = eigendecompose(a)
    threshold = gap_tol * max(1.0, frobenius_norm(a))
    min_gap = _min_pairwise_gap(w)
    simple = _pairwise_simple(w, gap_tol)

    sig = singular_values(a)
    invertible = bool(np.abs(w).min() > threshold) and bool(sig[-1] > TOL_SING * sig[0])

    if simple:
        sig_v = singular_values(v)
        condition = float(sig_v[0] / sig_v[-1]) if sig_v[-1] > 0 else float("inf")
        safe_radius = min_gap / (2.0 * condition)
    else:
        condition = None
        safe_radius = 0.0

    return SpectrumReport(
        eigenvalues=tuple(complex(z) for z in w),
        min_gap=min_gap,
        is_simple=bool(simple),
        is_invertible=invertible,
        eig_condition=condition,
        safe_radius=float(safe_radius),
        gap_tol_used=float(gap_tol),
    )


def char_poly_discriminant(a: Matrix) -> complex:
    """prod_{i<j} (lambda_i - lambda_j)^2 from the computed eigenvalues.

    Guarded to n <= 8: larger orders overflow and condition too poorly for
    the product to mean anything.
    """
    if not a.is_square:
        raise InputError(f"discriminant needs a square matrix, got {a.n_rows}x{a.n_cols}")
    if a.n_rows > 8:
        raise InputError(f"discriminant is limited to n <= 8, got n={a.n_rows}")
    w, _ = eigendecompose(a)
    disc = complex(1.0)
    for i in range(len(w) - 1):
        for j in range(i + 1, len(w)):
            d = w[i] - w[j]
            disc *= d * d
    return disc


def quadratic_discriminant(a: Matrix) -> complex:
    """Closed form tr(a)^2 - 4 det(a) for 2x2 input; cross-check path."""
    if a.data.shape != (2, 2):
        raise InputError(f"closed-form discriminant is defined for 2x2 matrices, got {a.n_rows}x{a.n_cols}")
    d = a.data
    tr = d[0, 0] + d[1, 1]
    det = d[0, 0] * d[1, 1] - d[0, 1] * d[1, 0]
    return complex(tr * tr - 4.0 * det)


def certify_openness(a: Matrix, report: SpectrumReport, trials: int, rng: RandomSource) -> bool:
    """Probe the certified radius: perturb at 0.9 * safe_radius ``trials`` times.

    Every probe must stay simple; a False return therefore signals a defect
    in the certificate, not an unlucky draw.
    """
    if not report.is_simple:
        raise PreconditionError("openness certification requires a simple spectrum")
    radius = 0.9 * report.safe_radius
    if not math.isfinite(radius):
        # 1x1 spectra are simple under any perturbation; probe at a sane scale
        radius = max(1.0, spectral_norm(a))
    for _ in range(trials):
        g = sample_gaussian(a.n_rows, a.field, rng)
        e = scale(g, radius / spectral_norm(g))
        if not simplicity_report(add(a, e), report.gap_tol_used).is_simple:
            return False
    return True
