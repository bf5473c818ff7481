"""Request -> response functions shared by the HTTP routes and the CLI.

Each handler is pure: it converts payloads to core types, runs one core
operation, and packs the result back into a response model.  Domain errors
propagate as KronspecError for the caller to map (exit code or HTTP status).
"""

from __future__ import annotations

import numpy as np

from ..errors import PreconditionError
from ..kron import (
    BinomialInverseOptions,
    KroneckerBinomial,
    binomial_inverse,
    evaluate_binomial,
    kron_rank,
    preprocess_binomial,
    reconstruct,
)
from ..matrices import condition_number
from ..perturb import PerturbOutcome, perturb_pair, perturb_tuple
from ..spectra import simplicity_report
from . import schemas as S


def spectrum(req: S.SpectrumRequest) -> S.SpectrumReportPayload:
    report = simplicity_report(req.matrix.to_matrix(), req.gap_tol)
    return S.SpectrumReportPayload(**report.as_payload())


def _outcome_response(outcome: PerturbOutcome) -> S.PerturbResponse:
    return S.PerturbResponse(**outcome.as_payload())


def perturb_pair_op(req: S.PerturbPairRequest) -> S.PerturbResponse:
    outcome = perturb_pair(
        req.a.to_matrix(),
        req.b.to_matrix(),
        req.map_f.to_selfmap(),
        req.map_g.to_selfmap(),
        req.spec.to_spec(),
    )
    return _outcome_response(outcome)


def perturb_tuple_op(req: S.PerturbTupleRequest) -> S.PerturbResponse:
    outcome = perturb_tuple(
        [m.to_matrix() for m in req.matrices],
        [m.to_selfmap() for m in req.maps],
        req.spec.to_spec(),
        designated_index=req.designated_index,
    )
    return _outcome_response(outcome)


def kron_inverse_op(req: S.KronInverseRequest) -> S.KronInverseResponse:
    binom = KroneckerBinomial(
        req.a.to_matrix(), req.b.to_matrix(), req.c.to_matrix(), req.d.to_matrix()
    )
    opts = BinomialInverseOptions(
        gap_tol=req.gap_tol,
        tol_recon=req.tol_recon,
        branch=req.branch,
        rank_check=req.rank_check,
        rank_tol=req.rank_tol,
    )
    work = binom
    preprocessed = False
    evidence = None
    try:
        decomp = binomial_inverse(work, opts)
    except PreconditionError:
        if not req.auto_preprocess:
            raise
        work, outcome = preprocess_binomial(binom, req.delta, req.spec.to_spec())
        evidence = _outcome_response(outcome)
        preprocessed = True
        decomp = binomial_inverse(work, opts)

    x = evaluate_binomial(work)
    rec = reconstruct(decomp)
    eye = np.eye(x.n_rows)
    residual = max(
        float(np.linalg.norm(x.data @ rec.data - eye)),
        float(np.linalg.norm(rec.data @ x.data - eye)),
    )
    rank = kron_rank(rec, decomp.p, decomp.q, req.rank_tol)
    return S.KronInverseResponse(
        decomposition=S.KronSumPayload(**decomp.as_payload()),
        residual=residual,
        condition=condition_number(x),
        reconstruction_rank=S.KronRankPayload(**rank.as_payload()),
        preprocessed=preprocessed,
        perturbation=evidence,
    )


def kron_rank_op(req: S.KronRankRequest) -> S.KronRankPayload:
    report = kron_rank(req.matrix.to_matrix(), req.p, req.q, req.tol)
    return S.KronRankPayload(**report.as_payload())


def selftest_op(req: S.SelftestRequest) -> S.SelftestResponse:
    from ..selftest import run_all

    summary = run_all(trials=req.trials, nmax=req.nmax, seed=req.seed)
    return S.SelftestResponse(**summary)
