"""Command-line surface: every operation, reproducible seeds, JSON reports.

Commands run in-process by default; --server URL sends the same typed
request to a running service instead, so local and remote invocations print
identical bytes.  Exit codes: 0 ok, 2 bad input, 3 numeric failure,
4 attempts exhausted, 5 precondition violated; a failing selftest exits 1.
Results go to stdout (or --out); stderr carries diagnostics only.
"""

from __future__ import annotations

import json
import sys

import click

from .errors import EXIT_CODES, InputError, KronspecError
from .matio import read_matrix
from .matrices import Field, Matrix, retag
from .service import handlers
from .service import schemas as S

_MAP_ALIASES = {
    "identity": "identity",
    "inverse": "inverse",
    "transpose": "transpose",
    "conjugate_transpose": "conjugate_transpose",
    "leftmul": "left_mul",
    "left_mul": "left_mul",
    "rightmul": "right_mul",
    "right_mul": "right_mul",
    "similarity": "similarity",
}
_PARAMETRIC_MAPS = {"left_mul", "right_mul", "similarity"}


def _coerce_field(m: Matrix, field_tag: str) -> Matrix:
    if field_tag == "real":
        import numpy as np

        if np.any(m.data.imag != 0.0):
            raise InputError("matrix has nonzero imaginary entries; cannot coerce to the real field")
        return retag(m, Field.REAL)
    return retag(m, Field.COMPLEX)


def _load(path: str, fmt: str, field_tag: str) -> S.MatrixPayload:
    return S.MatrixPayload.from_matrix(_coerce_field(read_matrix(path, fmt), field_tag))


def _parse_map(token: str, fmt: str, field_tag: str) -> S.SelfMapPayload:
    # normalize only the map name; the attached path must stay untouched
    name, _, path = token.strip().partition(":")
    name = name.lower().replace("-", "_")
    kind = _MAP_ALIASES.get(name)
    if kind is None:
        raise InputError(f"unknown self-map {token!r}; expected one of {sorted(set(_MAP_ALIASES))}")
    if kind in _PARAMETRIC_MAPS:
        if not path:
            raise InputError(f"self-map {name!r} needs an attached matrix file, e.g. {name}:M.mm")
        return S.SelfMapPayload(kind=kind, matrix=_load(path, fmt, field_tag))
    if path:
        raise InputError(f"self-map {name!r} takes no attached matrix file")
    return S.SelfMapPayload(kind=kind)


def _canonical(payload: dict) -> str:
    return json.dumps(payload, indent=2, allow_nan=False) + "\n"


def _emit(payload: dict, out: str | None) -> None:
    text = _canonical(payload)
    if out is None:
        click.echo(text, nl=False)
        return
    try:
        with open(out, "w") as fh:
            fh.write(text)
    except OSError as exc:
        click.echo(f"error (input): cannot write {out}: {exc}", err=True)
        sys.exit(EXIT_CODES["input"])


def _fail(kind: str, message: str) -> None:
    click.echo(f"error ({kind}): {message}", err=True)
    sys.exit(EXIT_CODES.get(kind, EXIT_CODES["numeric"]))


def _build_client(server: str):
    # separate function so tests can swap in an in-process test client
    import httpx

    return httpx.Client(base_url=server, timeout=600.0)


def _dispatch(server: str | None, route: str, handler, request) -> dict:
    if not server:
        try:
            return handler(request).model_dump(mode="json")
        except KronspecError as exc:
            _fail(exc.kind, str(exc))
    client = _build_client(server)
    try:
        resp = client.post(route, json=request.model_dump(mode="json"))
    except Exception as exc:
        _fail("input", f"cannot reach server {server}: {exc}")
    finally:
        client.close()
    if resp.status_code >= 400:
        try:
            err = resp.json()["error"]
            kind, message = err["kind"], err["message"]
        except Exception:
            kind, message = "numeric", f"server returned status {resp.status_code}"
        _fail(kind, message)
    return resp.json()


def _io_options(fn):
    for opt in (
        click.option("--format", "fmt", type=click.Choice(["mm", "json"]), default="mm", show_default=True, help="input matrix file format"),
        click.option("--field", "field_tag", type=click.Choice(["real", "complex"]), default="complex", show_default=True, help="field tag to coerce inputs to"),
        click.option("--out", type=click.Path(dir_okay=False), default=None, help="write the JSON result here instead of stdout"),
        click.option("--server", default=None, metavar="URL", help="send the request to a running service at URL"),
    ):
        fn = opt(fn)
    return fn


def _search_options(fn):
    for opt in (
        click.option("--eps", default=1e-2, show_default=True, help="perturbation budget (Frobenius)"),
        click.option("--gap-tol", default=1e-8, show_default=True, help="relative eigenvalue-gap tolerance"),
        click.option("--seed", default=0, show_default=True, help="base seed; all randomness derives from it"),
        click.option("--max-attempts", default=64, show_default=True, help="attempt cap per search stage"),
    ):
        fn = opt(fn)
    return fn


@click.group()
def main() -> None:
    """Certified spectra, perturbation search, and Kronecker binomial inversion."""


@main.command()
@click.argument("matrix_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--gap-tol", default=1e-8, show_default=True, help="relative eigenvalue-gap tolerance")
@_io_options
def spectrum(matrix_file, gap_tol, fmt, field_tag, out, server) -> None:
    """Report eigenvalues, gap, invertibility, and the certified safe radius."""
    try:
        req = S.SpectrumRequest(matrix=_load(matrix_file, fmt, field_tag), gap_tol=gap_tol)
    except KronspecError as exc:
        _fail(exc.kind, str(exc))
    _emit(_dispatch(server, "/spectrum", handlers.spectrum, req), out)


@main.command()
@click.argument("a_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("b_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--map-f", default="identity", show_default=True, help="self-map applied to the first matrix")
@click.option("--map-g", default="inverse", show_default=True, help="self-map applied to the second matrix")
@_search_options
@_io_options
def perturb(a_file, b_file, map_f, map_g, eps, gap_tol, seed, max_attempts, fmt, field_tag, out, server) -> None:
    """Perturb a pair so both matrices and the mapped product have simple spectra."""
    try:
        req = S.PerturbPairRequest(
            a=_load(a_file, fmt, field_tag),
            b=_load(b_file, fmt, field_tag),
            map_f=_parse_map(map_f, fmt, field_tag),
            map_g=_parse_map(map_g, fmt, field_tag),
            spec=S.PerturbSpecPayload(eps=eps, gap_tol=gap_tol, max_attempts=max_attempts, seed=seed),
        )
    except KronspecError as exc:
        _fail(exc.kind, str(exc))
    _emit(_dispatch(server, "/perturb/pair", handlers.perturb_pair_op, req), out)


@main.command(name="perturb-tuple")
@click.argument("matrix_files", type=click.Path(exists=True, dir_okay=False), nargs=-1, required=True)
@click.option("--maps", "maps_csv", default=None, help="comma-separated self-maps, one per matrix (default: all identity)")
@click.option("--designated", default=0, show_default=True, help="index re-sampled in stage 2")
@_search_options
@_io_options
def perturb_tuple_cmd(matrix_files, maps_csv, designated, eps, gap_tol, seed, max_attempts, fmt, field_tag, out, server) -> None:
    """Perturb a k-tuple so each matrix and the mapped product have simple spectra."""
    try:
        tokens = ["identity"] * len(matrix_files) if maps_csv is None else maps_csv.split(",")
        if len(tokens) != len(matrix_files):
            raise InputError(f"got {len(matrix_files)} matrices but {len(tokens)} self-maps")
        req = S.PerturbTupleRequest(
            matrices=[_load(p, fmt, field_tag) for p in matrix_files],
            maps=[_parse_map(t, fmt, field_tag) for t in tokens],
            spec=S.PerturbSpecPayload(eps=eps, gap_tol=gap_tol, max_attempts=max_attempts, seed=seed),
            designated_index=designated,
        )
    except KronspecError as exc:
        _fail(exc.kind, str(exc))
    _emit(_dispatch(server, "/perturb/tuple", handlers.perturb_tuple_op, req), out)


@main.command(name="kron-inverse")
@click.argument("a_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("b_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("c_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("d_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--p", "p", type=int, required=True, help="order of the left factors")
@click.option("--q", "q", type=int, required=True, help="order of the right factors")
@click.option("--auto-preprocess", is_flag=True, help="on precondition failure, perturb (a, b) within --delta and retry")
@click.option("--delta", default=1e-4, show_default=True, help="preprocessing perturbation budget")
@_search_options
@_io_options
def kron_inverse_cmd(a_file, b_file, c_file, d_file, p, q, auto_preprocess, delta, eps, gap_tol, seed, max_attempts, fmt, field_tag, out, server) -> None:
    """Invert a (x) c + b (x) d as a Kronecker sum with at most min(p, q) terms."""
    try:
        loaded = {name: _load(path, fmt, field_tag) for name, path in
                  (("a", a_file), ("b", b_file), ("c", c_file), ("d", d_file))}
        for name, expected in (("a", p), ("b", p), ("c", q), ("d", q)):
            m = loaded[name]
            if m.rows != expected or m.cols != expected:
                raise InputError(f"factor {name} is {m.rows}x{m.cols}, expected {expected}x{expected}")
        req = S.KronInverseRequest(
            **loaded,
            gap_tol=gap_tol,
            auto_preprocess=auto_preprocess,
            delta=delta,
            spec=S.PerturbSpecPayload(eps=eps, gap_tol=gap_tol, max_attempts=max_attempts, seed=seed),
        )
    except KronspecError as exc:
        _fail(exc.kind, str(exc))
    _emit(_dispatch(server, "/kron/inverse", handlers.kron_inverse_op, req), out)


@main.command(name="kron-rank")
@click.argument("x_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--p", "p", type=int, required=True, help="order of the left factors")
@click.option("--q", "q", type=int, required=True, help="order of the right factors")
@click.option("--tol", default=1e-9, show_default=True, help="relative singular-value cutoff")
@_io_options
def kron_rank_cmd(x_file, p, q, tol, fmt, field_tag, out, server) -> None:
    """Numeric Kronecker rank of a pq x pq matrix via the rearrangement SVD."""
    try:
        req = S.KronRankRequest(matrix=_load(x_file, fmt, field_tag), p=p, q=q, tol=tol)
    except KronspecError as exc:
        _fail(exc.kind, str(exc))
    _emit(_dispatch(server, "/kron/rank", handlers.kron_rank_op, req), out)


@main.command()
@click.option("--trials", default=None, type=int, help="cap per-suite sample counts (0 = vacuous pass)")
@click.option("--nmax", default=8, show_default=True, help="largest matrix order exercised")
@click.option("--seed", default=0, show_default=True, help="base seed for all suites")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="write the JSON summary here instead of stdout")
@click.option("--server", default=None, metavar="URL", help="run the suites on a remote service")
def selftest(trials, nmax, seed, out, server) -> None:
    """Run the property suites; exit 0 only if every suite passes."""
    req = S.SelftestRequest(trials=trials, nmax=nmax, seed=seed)
    payload = _dispatch(server, "/selftest", handlers.selftest_op, req)
    _emit(payload, out)
    if not payload["all_passed"]:
        sys.exit(1)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host, port) -> None:
    """Start the HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
