"""Pydantic request/response models shared by the HTTP service and the CLI.

Matrices travel as row-major lists of [re, im] pairs so real and complex
payloads share one shape.  Non-finite floats never appear in responses:
infinite gaps and radii (1x1 spectra) serialize as null.
"""

from __future__ import annotations

import math
from typing import Any, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field as PField, field_validator, model_validator

from ..matrices import Field, Matrix
from ..perturb import PerturbSpec, SelfMap, SelfMapKind

_MAP_KINDS = tuple(k.value for k in SelfMapKind)


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class MatrixPayload(StrictModel):
    """A dense matrix: data is row-major, one [re, im] pair per entry."""

    field: Literal["real", "complex"]
    rows: int = PField(ge=1)
    cols: int = PField(ge=1)
    data: list[tuple[float, float]]

    @model_validator(mode="after")
    def _check(self):
        if len(self.data) != self.rows * self.cols:
            raise ValueError(f"expected {self.rows * self.cols} entries, got {len(self.data)}")
        for k, (re, im) in enumerate(self.data):
            if not (math.isfinite(re) and math.isfinite(im)):
                raise ValueError(f"entry {k} is not finite")
            if self.field == "real" and im != 0.0:
                raise ValueError(f"entry {k} has nonzero imaginary part in a real matrix")
        return self

    def to_matrix(self) -> Matrix:
        arr = np.array([complex(re, im) for re, im in self.data], dtype=np.complex128)
        return Matrix(arr.reshape(self.rows, self.cols), Field(self.field))

    @classmethod
    def from_matrix(cls, m: Matrix) -> "MatrixPayload":
        return cls(
            field=m.field.value,
            rows=m.n_rows,
            cols=m.n_cols,
            data=[(z.real, z.imag) for z in m.data.ravel()],
        )


class SelfMapPayload(StrictModel):
    kind: Literal["identity", "inverse", "transpose", "conjugate_transpose", "left_mul", "right_mul", "similarity"]
    matrix: Optional[MatrixPayload] = None

    def to_selfmap(self) -> SelfMap:
        m = self.matrix.to_matrix() if self.matrix is not None else None
        return SelfMap(SelfMapKind(self.kind), m)


class PerturbSpecPayload(StrictModel):
    eps: float = 1e-2
    gap_tol: float = 1e-8
    max_attempts: int = 64
    stage2_shrink: float = 0.5
    seed: int = 0

    def to_spec(self) -> PerturbSpec:
        return PerturbSpec(
            eps=self.eps,
            gap_tol=self.gap_tol,
            max_attempts=self.max_attempts,
            stage2_shrink=self.stage2_shrink,
            seed=self.seed,
        )


class SpectrumRequest(StrictModel):
    matrix: MatrixPayload
    gap_tol: float = 1e-8


class SpectrumReportPayload(StrictModel):
    eigenvalues: list[tuple[float, float]]
    min_gap: Optional[float]
    is_simple: bool
    is_invertible: bool
    eig_condition: Optional[float]
    safe_radius: Optional[float]
    gap_tol_used: float


class PerturbPairRequest(StrictModel):
    a: MatrixPayload
    b: MatrixPayload
    map_f: SelfMapPayload = SelfMapPayload(kind="identity")
    map_g: SelfMapPayload = SelfMapPayload(kind="inverse")
    spec: PerturbSpecPayload = PerturbSpecPayload()


class PerturbTupleRequest(StrictModel):
    matrices: list[MatrixPayload]
    maps: list[SelfMapPayload]
    spec: PerturbSpecPayload = PerturbSpecPayload()
    designated_index: int = 0

    @field_validator("matrices")
    @classmethod
    def _nonempty(cls, v):
        if not v:
            raise ValueError("matrices must be nonempty")
        return v


class PerturbResponse(StrictModel):
    perturbed: list[MatrixPayload]
    deltas: list[float]
    product: MatrixPayload
    product_report: SpectrumReportPayload
    per_matrix_reports: list[SpectrumReportPayload]
    attempts_used: int
    trace: dict[str, Any]


class KronInverseRequest(StrictModel):
    a: MatrixPayload
    b: MatrixPayload
    c: MatrixPayload
    d: MatrixPayload
    gap_tol: float = 1e-8
    tol_recon: float = 1e-8
    branch: Literal["auto", "spectral", "adjugate"] = "auto"
    rank_check: Literal["warn", "reject", "skip"] = "warn"
    rank_tol: float = 1e-9
    auto_preprocess: bool = False
    delta: float = 1e-4
    spec: PerturbSpecPayload = PerturbSpecPayload()


class KronTermPayload(StrictModel):
    L: MatrixPayload
    R: MatrixPayload


class KronSumPayload(StrictModel):
    p: int
    q: int
    terms: list[KronTermPayload]


class KronRankPayload(StrictModel):
    singular_values: list[float]
    numeric_rank: int
    tol_used: float


class KronInverseResponse(StrictModel):
    decomposition: KronSumPayload
    residual: float
    condition: float
    reconstruction_rank: KronRankPayload
    preprocessed: bool
    perturbation: Optional[PerturbResponse]


class KronRankRequest(StrictModel):
    matrix: MatrixPayload
    p: int = PField(ge=1)
    q: int = PField(ge=1)
    tol: float = 1e-9


class SelftestRequest(StrictModel):
    trials: Optional[int] = None
    nmax: int = 8
    seed: int = 0


class SuiteResult(StrictModel):
    name: str
    trials: int
    passed: bool
    failures: list[str]


class SelftestResponse(StrictModel):
    suites: list[SuiteResult]
    all_passed: bool
    trials: Optional[int]
    nmax: int
    seed: int


class HealthResponse(StrictModel):
    status: Literal["ok"]
    name: str
    version: str
