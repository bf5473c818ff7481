"""FastAPI application exposing the core operations over HTTP.

Domain errors map onto statuses by kind: input 400, precondition 422,
exhausted 409, numeric 500.  Bodies always carry {"error": {kind, message,
details}} so scripted clients can branch without parsing prose.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from ..errors import KronspecError
from . import handlers
from . import schemas as S

_STATUS_BY_KIND = {"input": 400, "precondition": 422, "exhausted": 409, "numeric": 500}


def create_app() -> FastAPI:
    app = FastAPI(title="kronspec", docs_url=None, redoc_url=None)

    @app.exception_handler(KronspecError)
    async def _domain_error(request: Request, exc: KronspecError) -> JSONResponse:
        status = _STATUS_BY_KIND.get(exc.kind, 500)
        return JSONResponse(status_code=status, content={"error": exc.payload()})

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError) -> JSONResponse:
        messages = []
        for err in exc.errors():
            loc = ".".join(str(part) for part in err.get("loc", ()))
            messages.append(f"{loc}: {err.get('msg', 'invalid')}")
        payload = {"kind": "input", "message": "; ".join(messages) or "invalid request", "details": {}}
        return JSONResponse(status_code=400, content={"error": payload})

    @app.get("/health", response_model=S.HealthResponse)
    def health() -> S.HealthResponse:
        try:
            from importlib.metadata import version

            ver = version("kronspec")
        except Exception:
            ver = "0.0.0"
        return S.HealthResponse(status="ok", name="kronspec", version=ver)

    @app.post("/spectrum", response_model=S.SpectrumReportPayload)
    def spectrum(req: S.SpectrumRequest) -> S.SpectrumReportPayload:
        return handlers.spectrum(req)

    @app.post("/perturb/pair", response_model=S.PerturbResponse)
    def perturb_pair(req: S.PerturbPairRequest) -> S.PerturbResponse:
        return handlers.perturb_pair_op(req)

    @app.post("/perturb/tuple", response_model=S.PerturbResponse)
    def perturb_tuple(req: S.PerturbTupleRequest) -> S.PerturbResponse:
        return handlers.perturb_tuple_op(req)

    @app.post("/kron/inverse", response_model=S.KronInverseResponse)
    def kron_inverse(req: S.KronInverseRequest) -> S.KronInverseResponse:
        return handlers.kron_inverse_op(req)

    @app.post("/kron/rank", response_model=S.KronRankPayload)
    def kron_rank(req: S.KronRankRequest) -> S.KronRankPayload:
        return handlers.kron_rank_op(req)

    @app.post("/selftest", response_model=S.SelftestResponse)
    def selftest(req: S.SelftestRequest) -> S.SelftestResponse:
        return handlers.selftest_op(req)

    return app
