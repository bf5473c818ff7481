"""Spectrum certificates: eigenvalues, gap thresholds, and openness probes."""

import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kronspec import (
    Field,
    InputError,
    PreconditionError,
    RandomSource,
    as_matrix,
    certify_openness,
    char_poly_discriminant,
    eigendecompose,
    identity,
    quadratic_discriminant,
    sample_gaussian,
    simplicity_report,
)
from kronspec.spectra import TOL_EIG


def _gaussian(n, seed):
    rng = np.random.default_rng(seed)
    return as_matrix(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))


# eigendecomposition contract


def test_eigendecompose_sorts_lexicographically():
    w, _ = eigendecompose(as_matrix(np.diag([3.0, 1.0, 2.0])))
    assert np.array_equal(w.real, [1.0, 2.0, 3.0])


def test_eigendecompose_rejects_non_square():
    with pytest.raises(InputError):
        eigendecompose(as_matrix(np.ones((2, 3))))


@pytest.mark.parametrize("n", [2, 8, 16, 64])
def test_eigenpair_residual_contract(n):
    a = _gaussian(n, n)
    w, v = eigendecompose(a)
    norm_a = np.linalg.norm(a.data, 2)
    for i in range(n):
        col = v.data[:, i]
        assert np.linalg.norm(col) == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.norm(a.data @ col - w[i] * col) <= TOL_EIG * norm_a


def test_eigenvector_columns_follow_the_eigenvalue_order():
    a = as_matrix(np.diag([2.0, 1.0]))
    w, v = eigendecompose(a)
    for i in range(2):
        np.testing.assert_allclose(a.data @ v.data[:, i], w[i] * v.data[:, i], atol=1e-12)


# simplicity and invertibility certificates


def test_identity_spectrum_is_not_simple():
    r = simplicity_report(identity(2))
    assert not r.is_simple
    assert r.min_gap == 0.0
    assert r.safe_radius == 0.0
    assert r.eig_condition is None
    assert r.is_invertible


def test_distinct_diagonal_is_simple_with_exact_certificate():
    r = simplicity_report(as_matrix(np.diag([1.0, 2.0])))
    assert r.is_simple and r.is_invertible
    assert r.min_gap == pytest.approx(1.0)
    assert r.eig_condition == pytest.approx(1.0)
    assert r.safe_radius == pytest.approx(0.5)


def test_nilpotent_block_is_neither_simple_nor_invertible():
    j = as_matrix(np.eye(4, k=1))
    r = simplicity_report(j)
    assert not r.is_simple
    assert not r.is_invertible


def test_simple_but_singular_matrix():
    r = simplicity_report(as_matrix(np.diag([0.0, 1.0, 2.0])))
    assert r.is_simple
    assert not r.is_invertible


def test_one_by_one_report_has_infinite_gap():
    r = simplicity_report(as_matrix([[3.0]]))
    assert r.is_simple and r.is_invertible
    assert math.isinf(r.min_gap)
    assert math.isinf(r.safe_radius)
    payload = r.as_payload()
    assert payload["min_gap"] is None
    assert payload["safe_radius"] is None


def test_gap_threshold_is_per_pair_not_per_matrix():
    # one huge eigenvalue must not veto a well-separated small pair
    r = simplicity_report(as_matrix(np.diag([0.0, 1e-3, 1e9])))
    assert r.is_simple
    # two huge eigenvalues do need a gap on their own scale
    r = simplicity_report(as_matrix(np.diag([1e9, 1e9 + 1.0])))
    assert not r.is_simple
    r = simplicity_report(as_matrix(np.diag([1e9, 2e9])))
    assert r.is_simple


def test_gap_threshold_absolute_floor():
    # below the gap_tol floor even tiny-norm matrices are rejected
    r = simplicity_report(as_matrix(np.diag([0.0, 1e-9])))
    assert not r.is_simple
    assert simplicity_report(as_matrix(np.diag([0.0, 1e-9])), gap_tol=1e-10).is_simple


def test_invertibility_uses_norm_relative_eigenvalue_floor():
    assert not simplicity_report(as_matrix(np.diag([1e-10, 1.0]))).is_invertible
    assert simplicity_report(as_matrix(np.diag([1e-6, 1.0]))).is_invertible


def test_invertibility_singular_value_gate():
    # eigenvalues far from zero, yet numerically singular by sigma ratio
    a = as_matrix([[1.0, 1e7], [0.0, 2.0]])
    r = simplicity_report(a)
    assert r.is_simple
    assert not r.is_invertible


def test_gap_tol_must_be_positive():
    with pytest.raises(InputError):
        simplicity_report(identity(2), gap_tol=0.0)


def test_report_payload_shape():
    p = simplicity_report(as_matrix(np.diag([1.0, 2.0])), gap_tol=1e-7).as_payload()
    assert p["eigenvalues"] == [[1.0, 0.0], [2.0, 0.0]]
    assert p["gap_tol_used"] == 1e-7
    assert set(p) == {
        "eigenvalues",
        "min_gap",
        "is_simple",
        "is_invertible",
        "eig_condition",
        "safe_radius",
        "gap_tol_used",
    }


@given(n=st.integers(2, 6), seed=st.integers(0, 10**9))
def test_report_invariants_on_random_input(n, seed):
    a = _gaussian(n, seed)
    r = simplicity_report(a)
    w = np.array([complex(re, im) for re, im in r.as_payload()["eigenvalues"]])
    diff = np.abs(w[:, None] - w[None, :])
    np.fill_diagonal(diff, np.inf)
    assert r.min_gap == pytest.approx(float(diff.min()))
    assert np.array_equal(w, w[np.lexsort((w.imag, w.real))])
    if r.is_simple:
        assert r.min_gap > 0
        assert r.safe_radius > 0
        assert r.eig_condition >= 1.0
        assert abs(char_poly_discriminant(a)) > 0
    else:
        assert r.safe_radius == 0.0
        assert r.eig_condition is None


# discriminants


def test_discriminant_of_2x2_worked_example():
    a = as_matrix([[1.0, 2.0], [3.0, 4.0]])
    assert char_poly_discriminant(a) == pytest.approx(33.0)
    assert quadratic_discriminant(a) == pytest.approx(33.0)


def test_discriminant_of_diagonal():
    a = as_matrix(np.diag([0.0, 1.0, 2.0]))
    assert char_poly_discriminant(a) == pytest.approx(4.0)


def test_discriminant_zero_for_repeated_eigenvalues():
    assert char_poly_discriminant(identity(2)) == pytest.approx(0.0)


@given(seed=st.integers(0, 10**9))
def test_discriminant_matches_closed_form_on_2x2(seed):
    a = _gaussian(2, seed)
    disc = char_poly_discriminant(a)
    closed = quadratic_discriminant(a)
    assert disc == pytest.approx(closed, rel=1e-9, abs=1e-12)


def test_discriminant_guards():
    with pytest.raises(InputError):
        char_poly_discriminant(as_matrix(np.ones((2, 3))))
    with pytest.raises(InputError):
        char_poly_discriminant(identity(9))
    with pytest.raises(InputError):
        quadratic_discriminant(identity(3))


def test_companion_matrix_of_cubic_roots_of_unity():
    # z^3 = 1: companion matrix eigenvalues are the three cube roots
    comp = as_matrix([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    w, _ = eigendecompose(comp)
    expected = np.array([np.exp(2j * np.pi * k / 3) for k in range(3)])
    expected = expected[np.lexsort((expected.imag, expected.real))]
    np.testing.assert_allclose(w, expected, atol=1e-9)


def test_rotation_matrix_eigenvalues_are_plus_minus_i():
    # the real parts are machine noise, so sort by imaginary part and
    # compare as a multiset
    rot = as_matrix([[0.0, -1.0], [1.0, 0.0]])
    w, _ = eigendecompose(rot)
    np.testing.assert_allclose(sorted(w, key=lambda z: z.imag), [-1j, 1j], atol=1e-12)
    assert simplicity_report(rot).is_simple


# openness probes


def test_certified_radius_survives_probing():
    a = _gaussian(5, 11)
    report = simplicity_report(a)
    assert report.is_simple
    assert certify_openness(a, report, trials=50, rng=RandomSource(3))


def test_openness_requires_simple_spectrum():
    with pytest.raises(PreconditionError):
        certify_openness(identity(2), simplicity_report(identity(2)), 1, RandomSource(0))


def test_openness_for_1x1_uses_fallback_radius():
    a = as_matrix([[2.0]])
    assert certify_openness(a, simplicity_report(a), trials=5, rng=RandomSource(1))


def test_openness_detects_an_oversized_radius():
    # barely separated pair: probes beyond the honest radius push the gap
    # under the tolerance floor with decent probability, so an inflated
    # certificate is caught while the honest one never is
    a = as_matrix(np.diag([0.0, 3e-8]), Field.COMPLEX)
    honest = simplicity_report(a)
    assert honest.is_simple
    doctored = dataclasses.replace(honest, safe_radius=4 * honest.safe_radius)
    results = [
        certify_openness(a, doctored, trials=300, rng=RandomSource(s)) for s in range(8)
    ]
    assert not all(results)


@given(n=st.integers(2, 5), seed=st.integers(0, 10**9))
def test_openness_probe_is_deterministic(n, seed):
    a = sample_gaussian(n, Field.COMPLEX, RandomSource(seed))
    report = simplicity_report(a)
    if not report.is_simple:
        return
    first = certify_openness(a, report, 5, RandomSource(seed + 1))
    second = certify_openness(a, report, 5, RandomSource(seed + 1))
    assert first is second is True
