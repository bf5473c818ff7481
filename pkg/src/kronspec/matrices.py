"""Dense square matrices over the real or complex field, plus seeded sampling.

Entries always live in a row-major complex128 array; the field tag records
whether the matrix is semantically real, in which case every imaginary part
is required to be exactly zero.  Matrices are immutable values: operations
return fresh objects and never mutate their arguments.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import InputError, SingularMatrixError

# Relative sigma_min/sigma_max threshold below which a matrix is treated as
# singular.  Strictly inside the double-precision noise floor for n <= 64.
TOL_SING = 1e-12

# Multiplies kappa(a) * 1e-15 in the inverse residual contract.
TOL_SOLVE = 100.0


class Field(enum.Enum):
    REAL = "real"
    COMPLEX = "complex"

    def combine(self, other: "Field") -> "Field":
        if self is Field.REAL and other is Field.REAL:
            return Field.REAL
        return Field.COMPLEX


@dataclass(frozen=True, eq=False)
class Matrix:
    """Immutable dense matrix; ``data`` is a read-only complex128 array."""

    data: np.ndarray
    field: Field = Field.COMPLEX

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.complex128, order="C", copy=True)
        if arr.ndim != 2:
            raise InputError(f"matrix data must be 2-dimensional, got ndim={arr.ndim}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InputError(f"matrix must have positive dimensions, got {arr.shape}")
        if self.field is Field.REAL and arr.imag.any():
            raise InputError("real-tagged matrix has nonzero imaginary parts")
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def n_rows(self) -> int:
        return self.data.shape[0]

    @property
    def n_cols(self) -> int:
        return self.data.shape[1]

    @property
    def is_square(self) -> bool:
        return self.data.shape[0] == self.data.shape[1]

    def __repr__(self) -> str:
        return f"Matrix({self.n_rows}x{self.n_cols}, {self.field.value})"


def as_matrix(values, field: Field | None = None) -> Matrix:
    """Build a Matrix from any array-like; infers the field tag when omitted.

    The inferred tag is REAL exactly when every imaginary part is zero.  An
    explicit REAL tag is validated, an explicit COMPLEX tag always accepted.
    """
    arr = np.asarray(values, dtype=np.complex128)
    if field is None:
        field = Field.COMPLEX if arr.imag.any() else Field.REAL
    return Matrix(arr, field)


def retag(m: Matrix, field: Field) -> Matrix:
    if m.field is field:
        return m
    return Matrix(m.data, field)  # REAL target re-validates zero imag


def identity(n: int, field: Field = Field.REAL) -> Matrix:
    return Matrix(np.eye(n, dtype=np.complex128), field)


def zeros(n: int, field: Field = Field.REAL) -> Matrix:
    return Matrix(np.zeros((n, n), dtype=np.complex128), field)


def _require_square(m: Matrix, what: str = "matrix") -> None:
    if not m.is_square:
        raise InputError(f"{what} must be square, got {m.n_rows}x{m.n_cols}")


def multiply(a: Matrix, b: Matrix) -> Matrix:
    if a.n_cols != b.n_rows:
        raise InputError(f"dimension mismatch in multiply: {a.n_rows}x{a.n_cols} times {b.n_rows}x{b.n_cols}")
    if a.field is not b.field:
        raise InputError("multiply requires operands with the same field tag")
    return Matrix(a.data @ b.data, a.field)


def add(a: Matrix, b: Matrix) -> Matrix:
    if a.data.shape != b.data.shape:
        raise InputError(f"dimension mismatch in add: {a.data.shape} vs {b.data.shape}")
    return Matrix(a.data + b.data, a.field.combine(b.field))


def subtract(a: Matrix, b: Matrix) -> Matrix:
    if a.data.shape != b.data.shape:
        raise InputError(f"dimension mismatch in subtract: {a.data.shape} vs {b.data.shape}")
    return Matrix(a.data - b.data, a.field.combine(b.field))


def scale(a: Matrix, s: complex) -> Matrix:
    s = complex(s)
    field = a.field if s.imag == 0.0 else Field.COMPLEX
    return Matrix(a.data * s, field)


def singular_values(a: Matrix) -> np.ndarray:
    """Singular values in descending order."""
    return np.linalg.svd(a.data, compute_uv=False)


def smallest_singular_value(a: Matrix) -> float:
    return float(singular_values(a)[-1])


def condition_number(a: Matrix) -> float:
    """2-norm condition number; +inf for numerically singular input."""
    sig = singular_values(a)
    if sig[-1] == 0.0:
        return float("inf")
    return float(sig[0] / sig[-1])


def is_invertible(a: Matrix, tol_sing: float = TOL_SING) -> bool:
    """Relative gate: sigma_min > tol_sing * sigma_max."""
    if not a.is_square:
        return False
    sig = singular_values(a)
    return bool(sig[-1] > tol_sing * sig[0])


def inverse(a: Matrix, tol_sing: float = TOL_SING) -> Matrix:
    """Invert by pivoted elimination after a relative singular-value gate.

    Raises SingularMatrixError when sigma_min <= tol_sing * sigma_max; the
    error exposes the smallest-singular-value estimate.
    """
    _require_square(a)
    sig = singular_values(a)
    if sig[-1] <= tol_sing * sig[0]:
        raise SingularMatrixError(
            "matrix is singular at the working tolerance",
            sigma_min=float(sig[-1]),
            sigma_max=float(sig[0]),
        )
    if a.field is Field.REAL:
        # real LU path keeps imaginary parts exactly zero
        inv = np.linalg.solve(a.data.real, np.eye(a.n_rows))
        return Matrix(inv.astype(np.complex128), Field.REAL)
    inv = np.linalg.solve(a.data, np.eye(a.n_rows, dtype=np.complex128))
    return Matrix(inv, Field.COMPLEX)


def determinant(a: Matrix) -> complex:
    _require_square(a)
    if a.field is Field.REAL:
        return complex(np.linalg.det(a.data.real))
    return complex(np.linalg.det(a.data))


def frobenius_norm(a: Matrix) -> float:
    return float(np.linalg.norm(a.data, "fro"))


def spectral_norm(a: Matrix) -> float:
    return float(np.linalg.norm(a.data, 2))


@dataclass
class RandomSource:
    """Seeded deterministic random stream (PCG64 behind a SeedSequence).

    ``derive`` creates statistically independent child streams keyed by a
    tuple of integers; identical (seed, key, draw sequence) always reproduces
    identical scalars, which is what makes search traces replayable.
    """

    seed: int
    spawn_key: tuple[int, ...] = ()

    def __post_init__(self):
        if not (0 <= int(self.seed) < 2**64):
            raise InputError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        self.seed = int(self.seed)
        self._generator = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(entropy=self.seed, spawn_key=self.spawn_key))
        )

    def derive(self, *key: int) -> "RandomSource":
        return RandomSource(self.seed, self.spawn_key + tuple(int(k) for k in key))

    def uniform(self) -> float:
        return float(self._generator.uniform())

    def standard_normal(self, shape) -> np.ndarray:
        return self._generator.standard_normal(shape)


def sample_gaussian(n: int, field: Field, rng: RandomSource) -> Matrix:
    """n x n matrix of i.i.d. standard normals (per component for COMPLEX).

    Draw order is fixed: the real part block first, then the imaginary one.
    """
    if n < 1:
        raise InputError(f"matrix order must be positive, got {n}")
    re = rng.standard_normal((n, n))
    if field is Field.REAL:
        return Matrix(re.astype(np.complex128), Field.REAL)
    im = rng.standard_normal((n, n))
    return Matrix(re + 1j * im, Field.COMPLEX)
