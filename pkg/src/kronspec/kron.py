"""Kronecker products, Kronecker (tensor) rank, and binomial inversion.

The centerpiece inverts X = A (x) C + B (x) D, with A, B of order p and C, D
of order q, as a sum of at most min{p, q} Kronecker products.  Factoring
X = (B (x) I)(B^-1 A (x) C + I (x) D) and diagonalizing the pencil
M = B^-1 A = S diag(lambda) S^-1 turns the middle factor block-diagonal with
blocks lambda_i C + D, giving the p-term form

    X^-1 = sum_i (S E_ii S^-1 B^-1) (x) (lambda_i C + D)^-1.

Writing each block inverse through the adjugate polynomial
adj(lambda c + d) = sum_j lambda^j M_j and regrouping by powers of lambda
yields the q-term form

    X^-1 = sum_j (S diag_i(lambda_i^j / d_i) S^-1 B^-1) (x) M_j,

with d_i = det(lambda_i C + D).  The shorter branch is picked automatically.
When the preconditions fail (no invertible factor on the p side, or a
non-simple pencil spectrum), `preprocess_binomial` replaces (A, B) by a
certified nearby pair and the inversion applies to the perturbed binomial.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    DegeneratePencilError,
    InputError,
    PreconditionError,
    ReconstructionError,
    SingularMatrixError,
)
from .matrices import (
    Field,
    Matrix,
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
)
from .perturb import PerturbOutcome, PerturbSpec, perturb_pair_inverse
from .spectra import DEFAULT_GAP_TOL, SpectrumReport, eigendecompose, simplicity_report

DEFAULT_RANK_TOL = 1e-9
DEFAULT_RECON_TOL = 1e-8

# retries for the adjugate interpolation when a node lands on a singular pencil value
_NODE_NUDGE_RETRIES = 64
_NODE_NUDGE_FACTOR = 1.0 + 2.0**-20


class KronRankWarning(UserWarning):
    """Input binomial does not look like a generic two-term Kronecker sum."""


@dataclass(frozen=True)
class KroneckerBinomial:
    """X = a (x) c + b (x) d with a, b of order p and c, d of order q."""

    a: Matrix
    b: Matrix
    c: Matrix
    d: Matrix

    def __post_init__(self):
        for name, m in (("a", self.a), ("b", self.b), ("c", self.c), ("d", self.d)):
            if not m.is_square:
                raise InputError(f"binomial factor {name} must be square, got {m.n_rows}x{m.n_cols}")
        if self.a.n_rows != self.b.n_rows:
            raise InputError(f"factors a and b must share an order, got {self.a.n_rows} and {self.b.n_rows}")
        if self.c.n_rows != self.d.n_rows:
            raise InputError(f"factors c and d must share an order, got {self.c.n_rows} and {self.d.n_rows}")
        fields = {m.field for m in (self.a, self.b, self.c, self.d)}
        if len(fields) != 1:
            raise InputError("all four binomial factors must carry the same field tag")

    @property
    def p(self) -> int:
        return self.a.n_rows

    @property
    def q(self) -> int:
        return self.c.n_rows

    @property
    def field(self) -> Field:
        return self.a.field

    def swapped(self) -> "KroneckerBinomial":
        """Exchange the two summands; evaluates to the same matrix."""
        return KroneckerBinomial(self.b, self.a, self.d, self.c)


@dataclass(frozen=True)
class KronSumDecomposition:
    """A sum sum_k L_k (x) R_k with L_k of order p and R_k of order q."""

    terms: tuple[tuple[Matrix, Matrix], ...]
    p: int
    q: int

    def __post_init__(self):
        if not self.terms:
            raise InputError("decomposition needs at least one term")
        for k, (left, right) in enumerate(self.terms):
            if left.n_rows != self.p or left.n_cols != self.p:
                raise InputError(f"term {k}: left factor must be {self.p}x{self.p}")
            if right.n_rows != self.q or right.n_cols != self.q:
                raise InputError(f"term {k}: right factor must be {self.q}x{self.q}")

    def as_payload(self) -> dict:
        def mat(m: Matrix) -> dict:
            return {
                "field": m.field.value,
                "rows": m.n_rows,
                "cols": m.n_cols,
                "data": [[z.real, z.imag] for z in m.data.ravel()],
            }

        return {
            "p": self.p,
            "q": self.q,
            "terms": [{"L": mat(left), "R": mat(right)} for left, right in self.terms],
        }


@dataclass(frozen=True)
class KronRankReport:
    """Numeric Kronecker rank: singular spectrum of the rearranged matrix."""

    singular_values: tuple[float, ...]
    numeric_rank: int
    tol_used: float

    def as_payload(self) -> dict:
        return {
            "singular_values": list(self.singular_values),
            "numeric_rank": self.numeric_rank,
            "tol_used": self.tol_used,
        }


def kron_product(l: Matrix, r: Matrix) -> Matrix:
    """Kronecker product; block (i, j) equals l[i, j] * r."""
    if not l.is_square or not r.is_square:
        raise InputError("kron_product needs square factors")
    return Matrix(np.kron(l.data, r.data), l.field.combine(r.field))


def evaluate_binomial(b: KroneckerBinomial) -> Matrix:
    """Assemble a (x) c + b (x) d as a dense pq x pq matrix."""
    return add(kron_product(b.a, b.c), kron_product(b.b, b.d))


def rearrange(x: Matrix, p: int, q: int) -> Matrix:
    """Reshuffle a pq x pq matrix into p^2 x q^2 block-vectorized form.

    Row i + j*p holds the column-stacked q x q block at block position
    (i, j), so a single Kronecker term L (x) R maps to the rank-one outer
    product vec(L) vec(R)^T.  Linear and bit-exact: every output entry is a
    copy of one input entry.
    """
    if p < 1 or q < 1:
        raise InputError(f"block orders must be positive, got p={p}, q={q}")
    if x.n_rows != p * q or x.n_cols != p * q:
        raise InputError(f"expected a {p * q}x{p * q} matrix for p={p}, q={q}, got {x.n_rows}x{x.n_cols}")
    blocks = x.data.reshape(p, q, p, q)
    # axes: (block row i, inner row k, block col j, inner col l) -> (j, i, l, k)
    out = blocks.transpose(2, 0, 3, 1).reshape(p * p, q * q)
    return Matrix(out, x.field)


def kron_rank(x: Matrix, p: int, q: int, tol: float = DEFAULT_RANK_TOL) -> KronRankReport:
    """Count singular values of the rearranged matrix above tol * sigma_1."""
    if not (tol > 0):
        raise InputError(f"tol must be positive, got {tol}")
    r = rearrange(x, p, q)
    sigma = np.linalg.svd(r.data, compute_uv=False)
    top = float(sigma[0]) if sigma.size else 0.0
    if top == 0.0:
        rank = 0
    else:
        rank = int(np.count_nonzero(sigma > tol * top))
    return KronRankReport(tuple(float(s) for s in sigma), rank, tol)


def pencil_spectrum(
    a: Matrix, b: Matrix, gap_tol: float = DEFAULT_GAP_TOL
) -> tuple[np.ndarray, Matrix, SpectrumReport]:
    """Eigenvalues and eigenvectors of b^-1 a, plus its simplicity report."""
    if not a.is_square or not b.is_square or a.n_rows != b.n_rows:
        raise InputError(f"pencil factors must be square of equal order, got {a.n_rows}x{a.n_cols} and {b.n_rows}x{b.n_cols}")
    if not is_invertible(b):
        raise SingularMatrixError(
            "pencil denominator is singular",
            hint="replace the pair with a certified nearby one via preprocess_binomial",
        )
    common = a.field.combine(b.field)
    if common is Field.REAL:
        m = as_matrix(np.linalg.solve(b.data.real, a.data.real), Field.REAL)
    else:
        m = Matrix(np.linalg.solve(b.data, a.data), Field.COMPLEX)
    report = simplicity_report(m, gap_tol)
    w, s = eigendecompose(m)
    return w, s, report


def adjugate_poly(c: Matrix, d: Matrix) -> list[Matrix]:
    """Coefficients M_j of adj(lambda c + d) = sum_j lambda^j M_j, j < q.

    Interpolates at q scaled roots of unity, radius max(1, ||d||_F/||c||_F),
    evaluating the adjugate as det * inverse at each node.  If a node hits a
    singular pencil value the radius is nudged by a factor of 1 + 2^-20 and
    all nodes are re-tried; exhausting the retries signals a pencil that is
    singular identically.
    """
    if not c.is_square or not d.is_square or c.n_rows != d.n_rows:
        raise InputError("adjugate_poly needs square matrices of equal order")
    q = c.n_rows
    common = c.field.combine(d.field)
    if q == 1:
        return [retag(identity(1), common)]
    nc, nd = frobenius_norm(c), frobenius_norm(d)
    rho = max(1.0, nd / nc) if nc > 0 else 1.0
    nodes = None
    for _ in range(_NODE_NUDGE_RETRIES + 1):
        trial = rho * np.exp(2j * np.pi * np.arange(q) / q)
        mats = [Matrix(lam * c.data + d.data, Field.COMPLEX) for lam in trial]
        if all(is_invertible(m) for m in mats):
            nodes = trial
            break
        rho *= _NODE_NUDGE_FACTOR
    if nodes is None:
        raise DegeneratePencilError(
            "no invertible interpolation nodes found; lambda*c + d appears singular for every lambda"
        )
    values = np.stack([(determinant(m) * inverse(m).data).ravel() for m in mats])
    vander = np.vander(nodes, increasing=True)
    coeffs = np.linalg.solve(vander, values)
    out = []
    for j in range(q):
        block = coeffs[j].reshape(q, q)
        if common is Field.REAL:
            # exact coefficients are real for real pencils; drop rounding noise
            out.append(as_matrix(block.real, Field.REAL))
        else:
            out.append(Matrix(block, Field.COMPLEX))
    return out


@dataclass(frozen=True)
class BinomialInverseOptions:
    """Knobs for binomial_inverse.

    branch: "auto" picks the shorter of the spectral (p-term) and adjugate
    (q-term) forms; forcing either is allowed for cross-checks.
    rank_check: "warn" (default) warns when the input's numeric Kronecker
    rank is not 2, "reject" raises, "skip" omits the check.
    """

    gap_tol: float = DEFAULT_GAP_TOL
    tol_recon: float = DEFAULT_RECON_TOL
    branch: str = "auto"
    rank_check: str = "warn"
    rank_tol: float = DEFAULT_RANK_TOL

    def __post_init__(self):
        if self.branch not in ("auto", "spectral", "adjugate"):
            raise InputError(f"branch must be auto, spectral, or adjugate, got {self.branch!r}")
        if self.rank_check not in ("warn", "reject", "skip"):
            raise InputError(f"rank_check must be warn, reject, or skip, got {self.rank_check!r}")
        if not (self.gap_tol > 0):
            raise InputError(f"gap_tol must be positive, got {self.gap_tol}")
        if not (self.tol_recon > 0):
            raise InputError(f"tol_recon must be positive, got {self.tol_recon}")
        if not (self.rank_tol > 0):
            raise InputError(f"rank_tol must be positive, got {self.rank_tol}")


def _spectral_terms(w, s: Matrix, s_inv: Matrix, b_inv: Matrix, binom: KroneckerBinomial):
    terms = []
    for i in range(binom.p):
        block = binom.c.data * w[i] + binom.d.data
        block_m = Matrix(block, Field.COMPLEX)
        left = np.outer(s.data[:, i], s_inv.data[i, :]) @ b_inv.data
        terms.append((as_matrix(left), as_matrix(inverse(block_m).data)))
    return terms


def _adjugate_terms(w, s: Matrix, s_inv: Matrix, b_inv: Matrix, binom: KroneckerBinomial):
    coeff_mats = adjugate_poly(binom.c, binom.d)
    dets = np.array(
        [determinant(Matrix(binom.c.data * lam + binom.d.data, Field.COMPLEX)) for lam in w]
    )
    terms = []
    for j in range(binom.q):
        weights = w**j / dets
        left = (s.data * weights) @ s_inv.data @ b_inv.data
        terms.append((as_matrix(left), coeff_mats[j]))
    return terms


def binomial_inverse(
    binom: KroneckerBinomial, opts: BinomialInverseOptions | None = None
) -> KronSumDecomposition:
    """Invert a (x) c + b (x) d as a Kronecker sum with <= min{p, q} terms.

    Preconditions: b (or, after swapping the summands, a) must be
    invertible, the pencil spectrum of (a, b) must be simple, and every
    lambda_i c + d must be invertible; failures raise a precondition error
    pointing at preprocess_binomial.  The reconstruction is verified against
    the identity on both sides to tol_recon * cond(X) before returning.
    """
    opts = opts if opts is not None else BinomialInverseOptions()
    work = binom
    if not is_invertible(work.b):
        if is_invertible(work.a):
            work = work.swapped()
        else:
            raise PreconditionError(
                "neither left factor passes the invertibility gate; "
                "run preprocess_binomial to move to a nearby valid binomial"
            )
    try:
        w, s, report = pencil_spectrum(work.a, work.b, opts.gap_tol)
    except SingularMatrixError as exc:
        raise PreconditionError(str(exc)) from exc
    if not report.is_simple:
        raise PreconditionError(
            "pencil spectrum is not simple (min gap "
            f"{report.min_gap:.3e} at gap_tol {opts.gap_tol:g}); "
            "run preprocess_binomial to move to a nearby valid binomial"
        )
    bad = [i for i in range(work.p) if not is_invertible(Matrix(work.c.data * w[i] + work.d.data, Field.COMPLEX))]
    if bad:
        raise PreconditionError(
            f"pencil value lambda_i*c + d is singular at eigenvalue index(es) {bad}; "
            "run preprocess_binomial to move to a nearby valid binomial"
        )

    x = evaluate_binomial(binom)
    if opts.rank_check != "skip":
        rank = kron_rank(x, binom.p, binom.q, opts.rank_tol).numeric_rank
        if rank != 2:
            msg = f"input binomial has numeric Kronecker rank {rank}, expected 2"
            if opts.rank_check == "reject":
                raise PreconditionError(msg)
            warnings.warn(msg, KronRankWarning, stacklevel=2)

    s_inv = inverse(s)
    b_inv = inverse(work.b)
    branch = opts.branch
    if branch == "auto":
        branch = "spectral" if work.p <= work.q else "adjugate"
    if branch == "spectral":
        terms = _spectral_terms(w, s, s_inv, b_inv, work)
    else:
        terms = _adjugate_terms(w, s, s_inv, b_inv, work)
    decomp = KronSumDecomposition(tuple(terms), work.p, work.q)

    rec = reconstruct(decomp)
    n = x.n_rows
    eye = np.eye(n)
    resid = max(
        float(np.linalg.norm(x.data @ rec.data - eye)),
        float(np.linalg.norm(rec.data @ x.data - eye)),
    )
    cond_x = condition_number(x)
    tol = opts.tol_recon * cond_x
    if not (resid <= tol):
        raise ReconstructionError(
            "reconstruction residual exceeds tolerance; the pencil eigenbasis is "
            f"ill-conditioned (cond(S) = {condition_number(s):.3e})",
            residual=resid,
            tolerance=tol,
            condition=cond_x,
        )
    return decomp


def preprocess_binomial(
    binom: KroneckerBinomial, delta: float, spec: PerturbSpec | None = None
) -> tuple[KroneckerBinomial, PerturbOutcome]:
    """Replace (a, b) by a certified pair within delta so inversion applies.

    Runs the identity/inverse pair search with budget delta: the perturbed
    a_e, b_e are invertible with simple spectra and a_e b_e^-1 has a simple
    spectrum, which transfers to b_e^-1 a_e by similarity.  c and d are
    untouched.  Already-valid inputs return unchanged (the search tries the
    zero perturbation first).
    """
    if not (delta > 0):
        raise PreconditionError(f"delta must be positive, got {delta}")
    spec = spec if spec is not None else PerturbSpec(eps=delta)
    if spec.eps != delta:
        spec = replace(spec, eps=delta)
    outcome = perturb_pair_inverse(binom.a, binom.b, spec)
    a_e, b_e = outcome.perturbed
    return KroneckerBinomial(a_e, b_e, binom.c, binom.d), outcome


def reconstruct(d: KronSumDecomposition) -> Matrix:
    """Sum the Kronecker terms in ascending index order."""
    total = kron_product(d.terms[0][0], d.terms[0][1])
    for left, right in d.terms[1:]:
        total = add(total, kron_product(left, right))
    return total
