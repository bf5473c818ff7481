"""HTTP service: routes, payload validation, and error-to-status mapping."""

import numpy as np
import pytest
from fastapi.testclient import TestClient

from kronspec import KronRankWarning
from kronspec.service.app import _STATUS_BY_KIND, create_app


@pytest.fixture(scope="module")
def client():
    with TestClient(create_app()) as c:
        yield c


def _payload(arr, field="complex"):
    arr = np.asarray(arr, dtype=np.complex128)
    return {
        "field": field,
        "rows": arr.shape[0],
        "cols": arr.shape[1],
        "data": [[z.real, z.imag] for z in arr.ravel()],
    }


def _identity(n, field="complex"):
    return _payload(np.eye(n), field)


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    body = resp.json()
    assert body["status"] == "ok"
    assert body["name"] == "kronspec"
    assert isinstance(body["version"], str)


# /spectrum


def test_spectrum_of_a_diagonal_matrix(client):
    resp = client.post("/spectrum", json={"matrix": _payload(np.diag([1.0, 2.0]))})
    assert resp.status_code == 200
    body = resp.json()
    assert body["is_simple"] and body["is_invertible"]
    assert body["min_gap"] == pytest.approx(1.0)
    assert body["eigenvalues"] == [[1.0, 0.0], [2.0, 0.0]]
    assert body["gap_tol_used"] == 1e-8


def test_spectrum_serializes_infinities_as_null(client):
    resp = client.post("/spectrum", json={"matrix": _payload([[3.0]])})
    assert resp.status_code == 200
    body = resp.json()
    assert body["min_gap"] is None
    assert body["safe_radius"] is None
    assert body["is_simple"]


def test_spectrum_rejects_extra_fields(client):
    resp = client.post(
        "/spectrum", json={"matrix": _identity(2), "surprise": 1}
    )
    assert resp.status_code == 400
    assert resp.json()["error"]["kind"] == "input"


def test_spectrum_rejects_wrong_entry_count(client):
    bad = _identity(2)
    bad["data"] = bad["data"][:-1]
    resp = client.post("/spectrum", json={"matrix": bad})
    assert resp.status_code == 400
    assert "expected 4 entries" in resp.json()["error"]["message"]


def test_spectrum_rejects_non_finite_entries(client):
    # hand-rolled body: the test client's own encoder refuses inf, but a
    # hostile caller can still put the bare Infinity literal on the wire
    raw = (
        '{"matrix": {"field": "complex", "rows": 2, "cols": 2, '
        '"data": [[Infinity, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]}}'
    )
    resp = client.post(
        "/spectrum", content=raw, headers={"content-type": "application/json"}
    )
    assert resp.status_code == 400
    assert "not finite" in resp.json()["error"]["message"]


def test_real_matrix_with_imaginary_part_is_rejected(client):
    bad = _identity(2, field="real")
    bad["data"][1] = [0.0, 0.5]
    resp = client.post("/spectrum", json={"matrix": bad})
    assert resp.status_code == 400
    assert "imaginary" in resp.json()["error"]["message"]


def test_non_square_spectrum_is_an_input_error(client):
    rect = {
        "field": "complex",
        "rows": 1,
        "cols": 2,
        "data": [[1.0, 0.0], [2.0, 0.0]],
    }
    resp = client.post("/spectrum", json={"matrix": rect})
    assert resp.status_code == 400
    assert resp.json()["error"]["kind"] == "input"


# /perturb/pair and /perturb/tuple


def test_perturb_pair_on_the_identity_pair(client):
    req = {"a": _identity(2), "b": _identity(2), "spec": {"eps": 1e-2, "seed": 3}}
    resp = client.post("/perturb/pair", json=req)
    assert resp.status_code == 200
    body = resp.json()
    assert len(body["perturbed"]) == 2
    assert all(d < 1e-2 for d in body["deltas"])
    assert body["product_report"]["is_simple"]
    assert body["product_report"]["is_invertible"]
    assert all(r["is_simple"] for r in body["per_matrix_reports"])
    assert body["attempts_used"] >= 2
    assert "stage1" in body["trace"] and "stage2_attempts" in body["trace"]


def test_perturb_pair_is_deterministic_bytes(client):
    req = {"a": _identity(3), "b": _identity(3), "spec": {"eps": 1e-3, "seed": 11}}
    first = client.post("/perturb/pair", json=req)
    second = client.post("/perturb/pair", json=req)
    assert first.status_code == second.status_code == 200
    assert first.content == second.content


def test_perturb_tuple_with_mixed_maps(client):
    rng = np.random.default_rng(5)
    mats = [_payload(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))) for _ in range(3)]
    req = {
        "matrices": mats,
        "maps": [{"kind": "transpose"}, {"kind": "inverse"}, {"kind": "identity"}],
        "spec": {"eps": 1e-2, "seed": 0},
        "designated_index": 1,
    }
    resp = client.post("/perturb/tuple", json=req)
    assert resp.status_code == 200
    body = resp.json()
    assert len(body["perturbed"]) == 3
    assert body["product_report"]["is_simple"]


def test_perturb_tuple_map_count_mismatch(client):
    req = {"matrices": [_identity(2), _identity(2)], "maps": [{"kind": "identity"}]}
    resp = client.post("/perturb/tuple", json=req)
    assert resp.status_code == 400
    assert resp.json()["error"]["kind"] == "input"


def test_perturb_tuple_rejects_empty_input(client):
    resp = client.post("/perturb/tuple", json={"matrices": [], "maps": []})
    assert resp.status_code == 400


def test_left_mul_map_requires_a_matrix(client):
    req = {
        "a": _identity(2),
        "b": _identity(2),
        "map_f": {"kind": "left_mul"},
        "map_g": {"kind": "identity"},
    }
    resp = client.post("/perturb/pair", json=req)
    assert resp.status_code == 400
    assert resp.json()["error"]["kind"] == "input"


def test_perturb_exhaustion_maps_to_409(client):
    # gap_tol 0.5 is unreachable for eps-scale perturbations of the identity,
    # so the stage-1 search must exhaust its single attempt
    req = {
        "a": _identity(2),
        "b": _identity(2),
        "spec": {"eps": 1e-3, "gap_tol": 0.5, "max_attempts": 1},
    }
    resp = client.post("/perturb/pair", json=req)
    assert resp.status_code == 409
    body = resp.json()["error"]
    assert body["kind"] == "exhausted"
    assert "trace" in body["details"]


# /kron/inverse


def test_kron_inverse_on_a_generic_instance(client):
    rng = np.random.default_rng(7)
    def draw(n):
        return _payload(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))

    req = {"a": draw(2), "b": draw(2), "c": draw(3), "d": draw(3)}
    resp = client.post("/kron/inverse", json=req)
    assert resp.status_code == 200
    body = resp.json()
    assert body["decomposition"]["p"] == 2
    assert body["decomposition"]["q"] == 3
    assert len(body["decomposition"]["terms"]) <= 2
    assert body["residual"] <= 1e-8 * body["condition"]
    assert body["reconstruction_rank"]["numeric_rank"] <= 2
    assert body["preprocessed"] is False
    assert body["perturbation"] is None


def test_kron_inverse_identity_pencil_is_422(client):
    req = {"a": _identity(2), "b": _identity(2), "c": _identity(2), "d": _identity(2)}
    resp = client.post("/kron/inverse", json=req)
    assert resp.status_code == 422
    body = resp.json()["error"]
    assert body["kind"] == "precondition"
    assert "preprocess_binomial" in body["message"]


def test_kron_inverse_auto_preprocess_rescues_the_identity_pencil(client):
    req = {
        "a": _identity(2),
        "b": _identity(2),
        "c": _identity(2),
        "d": _identity(2),
        "auto_preprocess": True,
        "delta": 1e-4,
        "spec": {"eps": 1.0, "seed": 2},
    }
    # c = d keeps the assembled matrix at Kronecker rank 1 even after the
    # (a, b) pair is repaired, so the structural rank check still warns
    with pytest.warns(KronRankWarning):
        resp = client.post("/kron/inverse", json=req)
    assert resp.status_code == 200
    body = resp.json()
    assert body["preprocessed"] is True
    assert body["perturbation"] is not None
    assert all(d < 1e-4 for d in body["perturbation"]["deltas"])
    assert body["residual"] <= 1e-8 * body["condition"]


def test_kron_inverse_exhausted_preprocess_maps_to_409(client):
    req = {
        "a": _identity(2),
        "b": _identity(2),
        "c": _identity(2),
        "d": _identity(2),
        "auto_preprocess": True,
        "delta": 1e-3,
        "spec": {"eps": 1.0, "gap_tol": 0.5, "max_attempts": 1},
    }
    resp = client.post("/kron/inverse", json=req)
    assert resp.status_code == 409
    assert resp.json()["error"]["kind"] == "exhausted"


def test_kron_inverse_impossible_residual_tolerance_is_500(client):
    rng = np.random.default_rng(9)
    def draw(n):
        return _payload(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))

    req = {"a": draw(2), "b": draw(2), "c": draw(2), "d": draw(2), "tol_recon": 1e-300}
    resp = client.post("/kron/inverse", json=req)
    assert resp.status_code == 500
    body = resp.json()["error"]
    assert body["kind"] == "numeric"
    assert "residual" in body["details"]


def test_kron_inverse_dimension_mismatch_is_400(client):
    req = {"a": _identity(2), "b": _identity(3), "c": _identity(2), "d": _identity(2)}
    resp = client.post("/kron/inverse", json=req)
    assert resp.status_code == 400


# /kron/rank


def test_kron_rank_route(client):
    resp = client.post(
        "/kron/rank",
        json={"matrix": _payload(np.diag([2.0, 4.0, 3.0, 5.0])), "p": 2, "q": 2},
    )
    assert resp.status_code == 200
    body = resp.json()
    assert body["numeric_rank"] == 2
    assert body["tol_used"] == 1e-9
    assert body["singular_values"] == sorted(body["singular_values"], reverse=True)


def test_kron_rank_dimension_mismatch_is_400(client):
    resp = client.post("/kron/rank", json={"matrix": _identity(4), "p": 3, "q": 2})
    assert resp.status_code == 400


# /selftest


def test_selftest_route_with_zero_trials(client):
    resp = client.post("/selftest", json={"trials": 0, "nmax": 4, "seed": 1})
    assert resp.status_code == 200
    body = resp.json()
    assert body["all_passed"] is True
    assert body["trials"] == 0
    assert len(body["suites"]) >= 8
    for suite in body["suites"]:
        assert suite["passed"] is True
        assert suite["failures"] == []


def test_selftest_rejects_bad_nmax(client):
    resp = client.post("/selftest", json={"nmax": 99})
    assert resp.status_code == 400


# status mapping


def test_status_map_covers_every_error_kind():
    assert _STATUS_BY_KIND == {
        "input": 400,
        "precondition": 422,
        "exhausted": 409,
        "numeric": 500,
    }
