"""Randomized search for nearby tuples with simple spectra and simple products.

Given matrices A_1..A_k, self-maps f_1..f_k of the invertible group, and a
budget eps, the search returns perturbed matrices A_ie such that every A_ie
is invertible with a simple spectrum, every ||A_i - A_ie||_F stays strictly
under eps, and the product f_1(A_1e) ... f_k(A_ke) has a simple spectrum.

The search is two-staged.  Stage 1 independently moves each matrix within
eps/2 until its own certificate holds.  Stage 2 re-samples only one
designated matrix inside a ball around its stage-1 intermediate with radius
r < eps/2, probing the product; candidates are re-certified from scratch,
and the radius shrinks geometrically whenever a candidate loses its own
certificate.  Because simple-spectrum matrices are generic, random probes
succeed after very few attempts, and every accepted matrix carries a
recomputed certificate rather than a probabilistic claim.

All randomness flows from the spec seed through per-attempt derived streams
keyed by (stage, matrix index, attempt index), so attempts are independent
and outcomes reproducible.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import AttemptsExhaustedError, InputError, PreconditionError, SingularMatrixError
from .matrices import (
    Field,
    Matrix,
    RandomSource,
    add,
    frobenius_norm,
    inverse,
    is_invertible,
    multiply,
    retag,
    sample_gaussian,
    scale,
    subtract,
)
from .spectra import DEFAULT_GAP_TOL, SpectrumReport, simplicity_report

# stream-key tags
_KEY_SINGLE = 0
_KEY_STAGE1 = 1
_KEY_STAGE2 = 2


class SelfMapKind(enum.Enum):
    IDENTITY = "identity"
    INVERSE = "inverse"
    TRANSPOSE = "transpose"
    CONJUGATE_TRANSPOSE = "conjugate_transpose"
    LEFT_MUL = "left_mul"
    RIGHT_MUL = "right_mul"
    SIMILARITY = "similarity"


_PARAMETRIC = {SelfMapKind.LEFT_MUL, SelfMapKind.RIGHT_MUL, SelfMapKind.SIMILARITY}


@dataclass(frozen=True)
class SelfMap:
    """A concrete homeomorphism of the invertible group onto itself.

    Parametric variants carry an attached matrix that must itself pass the
    invertibility gate.
    """

    kind: SelfMapKind
    matrix: Matrix | None = None

    def __post_init__(self):
        if self.kind in _PARAMETRIC:
            if self.matrix is None:
                raise InputError(f"self-map {self.kind.value} requires an attached matrix")
            if not self.matrix.is_square:
                raise InputError("attached self-map matrix must be square")
            if not is_invertible(self.matrix):
                raise SingularMatrixError(f"attached matrix of self-map {self.kind.value} is singular")
        elif self.matrix is not None:
            raise InputError(f"self-map {self.kind.value} takes no attached matrix")

    @staticmethod
    def identity() -> "SelfMap":
        return SelfMap(SelfMapKind.IDENTITY)

    @staticmethod
    def inverse() -> "SelfMap":
        return SelfMap(SelfMapKind.INVERSE)

    @staticmethod
    def transpose() -> "SelfMap":
        return SelfMap(SelfMapKind.TRANSPOSE)

    @staticmethod
    def conjugate_transpose() -> "SelfMap":
        return SelfMap(SelfMapKind.CONJUGATE_TRANSPOSE)

    @staticmethod
    def left_mul(m: Matrix) -> "SelfMap":
        return SelfMap(SelfMapKind.LEFT_MUL, m)

    @staticmethod
    def right_mul(m: Matrix) -> "SelfMap":
        return SelfMap(SelfMapKind.RIGHT_MUL, m)

    @staticmethod
    def similarity(s: Matrix) -> "SelfMap":
        return SelfMap(SelfMapKind.SIMILARITY, s)


def apply_selfmap(f: SelfMap, m: Matrix) -> Matrix:
    """Apply the map's action; the argument must pass the invertibility gate."""
    if not m.is_square:
        raise InputError(f"self-maps act on square matrices, got {m.n_rows}x{m.n_cols}")
    if not is_invertible(m):
        raise SingularMatrixError("self-map applied to a singular matrix")
    if f.kind is SelfMapKind.IDENTITY:
        return m
    if f.kind is SelfMapKind.INVERSE:
        return inverse(m)
    if f.kind is SelfMapKind.TRANSPOSE:
        return Matrix(m.data.T, m.field)
    if f.kind is SelfMapKind.CONJUGATE_TRANSPOSE:
        return Matrix(m.data.conj().T, m.field)
    attached = f.matrix
    common = m.field.combine(attached.field)
    m2, a2 = retag(m, common), retag(attached, common)
    if f.kind is SelfMapKind.LEFT_MUL:
        return multiply(a2, m2)
    if f.kind is SelfMapKind.RIGHT_MUL:
        return multiply(m2, a2)
    # similarity: S m S^-1 preserves the spectrum
    return multiply(multiply(a2, m2), inverse(a2))


@dataclass(frozen=True)
class PerturbSpec:
    """Search parameters: budget, certificate tolerance, attempt policy, seed."""

    eps: float
    gap_tol: float = DEFAULT_GAP_TOL
    max_attempts: int = 64
    stage2_shrink: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if not (self.eps > 0):
            raise PreconditionError(f"eps must be positive, got {self.eps}")
        if not (self.gap_tol > 0):
            raise PreconditionError(f"gap_tol must be positive, got {self.gap_tol}")
        if self.max_attempts < 1:
            raise PreconditionError(f"max_attempts must be >= 1, got {self.max_attempts}")
        if not (0.0 < self.stage2_shrink < 1.0):
            raise PreconditionError(f"stage2_shrink must lie in (0, 1), got {self.stage2_shrink}")
        if not (0 <= self.seed < 2**64):
            raise PreconditionError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass(frozen=True)
class AttemptRecord:
    """One candidate of a single-matrix search."""

    index: int
    delta: float
    is_simple: bool
    is_invertible: bool

    def as_payload(self) -> dict:
        return {
            "index": self.index,
            "delta": self.delta,
            "is_simple": self.is_simple,
            "is_invertible": self.is_invertible,
        }


@dataclass(frozen=True)
class SingleSearchTrace:
    matrix_index: int
    budget: float
    attempts: tuple[AttemptRecord, ...]
    accepted_index: int | None

    def as_payload(self) -> dict:
        return {
            "matrix_index": self.matrix_index,
            "budget": self.budget,
            "attempts": [a.as_payload() for a in self.attempts],
            "accepted_index": self.accepted_index,
        }


@dataclass(frozen=True)
class ProductAttemptRecord:
    """One candidate of the stage-2 ball search on the designated matrix."""

    index: int
    radius: float
    delta_from_intermediate: float
    total_delta: float
    candidate_simple: bool
    candidate_invertible: bool
    product_simple: bool | None  # None when the candidate failed its own gate

    def as_payload(self) -> dict:
        return {
            "index": self.index,
            "radius": self.radius,
            "delta_from_intermediate": self.delta_from_intermediate,
            "total_delta": self.total_delta,
            "candidate_simple": self.candidate_simple,
            "candidate_invertible": self.candidate_invertible,
            "product_simple": self.product_simple,
        }


@dataclass(frozen=True)
class SearchTrace:
    """Full log of a tuple search: stage-1 runs, intermediates, stage-2 ball."""

    stage1: tuple[SingleSearchTrace, ...]
    intermediates: tuple[Matrix, ...]
    designated_index: int
    stage2_initial_radius: float
    stage2_attempts: tuple[ProductAttemptRecord, ...]
    stage2_accepted_index: int | None

    def as_payload(self) -> dict:
        return {
            "stage1": [t.as_payload() for t in self.stage1],
            "intermediates": [_matrix_payload(m) for m in self.intermediates],
            "designated_index": self.designated_index,
            "stage2_initial_radius": self.stage2_initial_radius,
            "stage2_attempts": [a.as_payload() for a in self.stage2_attempts],
            "stage2_accepted_index": self.stage2_accepted_index,
        }


def _matrix_payload(m: Matrix) -> dict:
    return {
        "field": m.field.value,
        "rows": m.n_rows,
        "cols": m.n_cols,
        "data": [[z.real, z.imag] for z in m.data.ravel()],
    }


@dataclass(frozen=True)
class PerturbOutcome:
    """Certified result of a tuple search; every invariant is re-checkable."""

    perturbed: tuple[Matrix, ...]
    deltas: tuple[float, ...]
    product: Matrix
    product_report: SpectrumReport
    per_matrix_reports: tuple[SpectrumReport, ...]
    attempts_used: int
    trace: SearchTrace

    def as_payload(self) -> dict:
        return {
            "perturbed": [_matrix_payload(m) for m in self.perturbed],
            "deltas": list(self.deltas),
            "product": _matrix_payload(self.product),
            "product_report": self.product_report.as_payload(),
            "per_matrix_reports": [r.as_payload() for r in self.per_matrix_reports],
            "attempts_used": self.attempts_used,
            "trace": self.trace.as_payload(),
        }


def _single_search(
    a: Matrix,
    budget: float,
    spec: PerturbSpec,
    key: tuple[int, ...],
    matrix_index: int,
) -> tuple[Matrix, SpectrumReport, SingleSearchTrace]:
    """Move ``a`` strictly less than ``budget`` until simple and invertible.

    Attempt 0 is ``a`` itself (zero delta); attempt t >= 1 adds a Gaussian
    direction scaled to Frobenius norm budget * u with u ~ U(0,1), drawn from
    the stream derived by (key, t).
    """
    root = RandomSource(spec.seed)
    attempts: list[AttemptRecord] = []
    for t in range(spec.max_attempts):
        if t == 0:
            candidate, delta = a, 0.0
        else:
            rng = root.derive(*key, t)
            g = sample_gaussian(a.n_rows, a.field, rng)
            u = rng.uniform()
            step = scale(g, budget * u / frobenius_norm(g))
            candidate = add(a, step)
            delta = frobenius_norm(subtract(candidate, a))
        report = simplicity_report(candidate, spec.gap_tol)
        attempts.append(AttemptRecord(t, delta, report.is_simple, report.is_invertible))
        if report.is_simple and report.is_invertible and delta < budget:
            trace = SingleSearchTrace(matrix_index, budget, tuple(attempts), t)
            return candidate, report, trace
    trace = SingleSearchTrace(matrix_index, budget, tuple(attempts), None)
    raise AttemptsExhaustedError(
        f"no simple invertible matrix found within {budget:g} of matrix {matrix_index} "
        f"after {spec.max_attempts} attempts (budget may sit below the tolerance floor)",
        trace=trace,
    )


def perturb_single(a: Matrix, spec: PerturbSpec) -> tuple[Matrix, SpectrumReport]:
    """Nearest-effort single-matrix version: simple invertible a_e, ||a - a_e||_F < eps."""
    if not a.is_square:
        raise InputError(f"perturb_single needs a square matrix, got {a.n_rows}x{a.n_cols}")
    matrix, report, _ = _single_search(a, spec.eps, spec, (_KEY_SINGLE, 0), 0)
    return matrix, report


def _product(mats: list[Matrix]) -> Matrix:
    out = mats[0]
    for m in mats[1:]:
        out = multiply(retag(out, out.field.combine(m.field)), retag(m, out.field.combine(m.field)))
    return out


def perturb_tuple(
    matrices: list[Matrix] | tuple[Matrix, ...],
    maps: list[SelfMap] | tuple[SelfMap, ...],
    spec: PerturbSpec,
    designated_index: int = 0,
) -> PerturbOutcome:
    """Two-stage search making the mapped product of a k-tuple simple.

    Stage 1 certifies each matrix within eps/2; stage 2 re-samples only the
    designated matrix inside a ball of initial radius stage2_shrink * eps/2
    around its stage-1 intermediate until the product of mapped matrices is
    simple, re-certifying every candidate.  Totals stay strictly under eps
    by the triangle inequality.
    """
    matrices = list(matrices)
    maps = list(maps)
    if len(matrices) < 1:
        raise InputError("perturb_tuple needs at least one matrix")
    if len(matrices) != len(maps):
        raise InputError(f"got {len(matrices)} matrices but {len(maps)} self-maps")
    n = matrices[0].n_rows
    for i, m in enumerate(matrices):
        if not m.is_square:
            raise InputError(f"matrix {i} must be square, got {m.n_rows}x{m.n_cols}")
        if m.n_rows != n:
            raise InputError(f"matrix {i} is {m.n_rows}x{m.n_cols}, expected order {n}")
    k = len(matrices)
    if not (0 <= designated_index < k):
        raise InputError(f"designated_index {designated_index} out of range for k={k}")

    half = spec.eps / 2.0
    stage1_traces: list[SingleSearchTrace] = []
    intermediates: list[Matrix] = []
    reports: list[SpectrumReport] = []
    for i, m in enumerate(matrices):
        mat, rep, tr = _single_search(m, half, spec, (_KEY_STAGE1, i), i)
        intermediates.append(mat)
        reports.append(rep)
        stage1_traces.append(tr)

    d = designated_index
    tilde = intermediates[d]
    # Frobenius ball strictly inside the remaining eps/2 budget.  The radius
    # is NOT capped by the intermediate's safe radius: a near-singular
    # intermediate can carry a safe radius orders of magnitude below eps,
    # which would starve the product search.  Soundness is unaffected
    # because every candidate is re-certified from scratch; the radius
    # shrinks only when a candidate loses its own certificate, which is
    # the one failure mode a smaller ball provably repairs.
    r0 = spec.stage2_shrink * half

    mapped = [apply_selfmap(maps[i], intermediates[i]) for i in range(k)]
    root = RandomSource(spec.seed)
    stage2_attempts: list[ProductAttemptRecord] = []
    radius = r0
    for t in range(spec.max_attempts):
        if t == 0:
            candidate, step_delta, cand_report = tilde, 0.0, reports[d]
        else:
            rng = root.derive(_KEY_STAGE2, t)
            g = sample_gaussian(n, tilde.field, rng)
            u = rng.uniform()
            step = scale(g, radius * u / frobenius_norm(g))
            candidate = add(tilde, step)
            step_delta = frobenius_norm(subtract(candidate, tilde))
            cand_report = simplicity_report(candidate, spec.gap_tol)
        total_delta = frobenius_norm(subtract(candidate, matrices[d]))
        cand_ok = cand_report.is_simple and cand_report.is_invertible and total_delta < spec.eps
        product_simple: bool | None = None
        if cand_ok:
            mapped[d] = apply_selfmap(maps[d], candidate)
            product = _product(mapped)
            product_report = simplicity_report(product, spec.gap_tol)
            product_simple = product_report.is_simple
        stage2_attempts.append(
            ProductAttemptRecord(
                t, radius, step_delta, total_delta, cand_report.is_simple, cand_report.is_invertible, product_simple
            )
        )
        if not cand_ok and t > 0:
            radius *= spec.stage2_shrink
        if cand_ok and product_simple:
            finals = list(intermediates)
            finals[d] = candidate
            final_reports = list(reports)
            final_reports[d] = cand_report
            deltas = tuple(frobenius_norm(subtract(finals[i], matrices[i])) for i in range(k))
            trace = SearchTrace(
                stage1=tuple(stage1_traces),
                intermediates=tuple(intermediates),
                designated_index=d,
                stage2_initial_radius=r0,
                stage2_attempts=tuple(stage2_attempts),
                stage2_accepted_index=t,
            )
            attempts_used = sum(len(tr.attempts) for tr in stage1_traces) + len(stage2_attempts)
            return PerturbOutcome(
                perturbed=tuple(finals),
                deltas=deltas,
                product=product,
                product_report=product_report,
                per_matrix_reports=tuple(final_reports),
                attempts_used=attempts_used,
                trace=trace,
            )
    trace = SearchTrace(
        stage1=tuple(stage1_traces),
        intermediates=tuple(intermediates),
        designated_index=d,
        stage2_initial_radius=r0,
        stage2_attempts=tuple(stage2_attempts),
        stage2_accepted_index=None,
    )
    raise AttemptsExhaustedError(
        f"no candidate made the mapped product simple after {spec.max_attempts} stage-2 attempts",
        trace=trace,
    )


def perturb_pair(a: Matrix, b: Matrix, f: SelfMap, g: SelfMap, spec: PerturbSpec) -> PerturbOutcome:
    """Pair version: perturb (a, b) so a_e, b_e and f(a_e) g(b_e) are all simple."""
    return perturb_tuple([a, b], [f, g], spec, designated_index=0)


def perturb_pair_inverse(a: Matrix, b: Matrix, spec: PerturbSpec) -> PerturbOutcome:
    """Pair search for the product a_e * b_e^{-1} (maps: identity, inverse)."""
    return perturb_pair(a, b, SelfMap.identity(), SelfMap.inverse(), spec)
