"""Core matrix type: construction, arithmetic, gates, and seeded sampling."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kronspec import (
    Field,
    InputError,
    Matrix,
    RandomSource,
    SingularMatrixError,
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
    sample_gaussian,
    scale,
    singular_values,
    spectral_norm,
    subtract,
    zeros,
)


def _gaussian(n, seed, field=Field.COMPLEX):
    rng = np.random.default_rng(seed)
    data = rng.standard_normal((n, n))
    if field is Field.COMPLEX:
        data = data + 1j * rng.standard_normal((n, n))
    return as_matrix(data, field)


# construction and tagging


def test_as_matrix_infers_real_for_real_data():
    m = as_matrix([[1.0, 2.0], [3.0, 4.0]])
    assert m.field is Field.REAL
    assert m.n_rows == m.n_cols == 2


def test_as_matrix_infers_complex_when_any_imag():
    m = as_matrix([[1.0, 2.0 + 1j], [3.0, 4.0]])
    assert m.field is Field.COMPLEX


def test_real_tag_rejects_imaginary_entries():
    with pytest.raises(InputError):
        as_matrix([[1j]], Field.REAL)


def test_matrix_rejects_wrong_ndim():
    with pytest.raises(InputError):
        as_matrix([1.0, 2.0])
    with pytest.raises(InputError):
        Matrix(np.zeros((2, 2, 2)))


def test_matrix_rejects_empty_dimensions():
    with pytest.raises(InputError):
        Matrix(np.zeros((0, 3)))


def test_matrix_data_is_immutable():
    m = as_matrix(np.eye(2))
    with pytest.raises(ValueError):
        m.data[0, 0] = 5.0


def test_matrix_copies_its_input():
    src = np.eye(2, dtype=np.complex128)
    m = Matrix(src)
    src[0, 0] = 7.0
    assert m.data[0, 0] == 1.0


def test_identity_and_zeros():
    assert np.array_equal(identity(3).data, np.eye(3))
    assert np.array_equal(zeros(2).data, np.zeros((2, 2)))
    assert identity(3, Field.COMPLEX).field is Field.COMPLEX


def test_retag_roundtrip_and_validation():
    m = as_matrix(np.eye(2))
    up = retag(m, Field.COMPLEX)
    assert up.field is Field.COMPLEX
    assert retag(up, Field.REAL).field is Field.REAL
    with pytest.raises(InputError):
        retag(as_matrix([[1j]]), Field.REAL)


# arithmetic against the numpy oracle


def test_arithmetic_matches_numpy():
    a = _gaussian(4, 1)
    b = _gaussian(4, 2)
    np.testing.assert_array_equal(add(a, b).data, a.data + b.data)
    np.testing.assert_array_equal(subtract(a, b).data, a.data - b.data)
    np.testing.assert_array_equal(multiply(a, b).data, a.data @ b.data)
    np.testing.assert_array_equal(scale(a, 2.5).data, a.data * 2.5)


def test_multiply_requires_matching_shapes_and_fields():
    a = as_matrix(np.ones((2, 3)))
    b = as_matrix(np.ones((2, 2)))
    with pytest.raises(InputError):
        multiply(a, b)
    with pytest.raises(InputError):
        multiply(identity(2, Field.REAL), identity(2, Field.COMPLEX))


def test_add_requires_matching_shapes():
    with pytest.raises(InputError):
        add(identity(2), identity(3))


def test_scale_by_complex_upgrades_field():
    m = identity(2, Field.REAL)
    assert scale(m, 2.0).field is Field.REAL
    assert scale(m, 1j).field is Field.COMPLEX


def test_field_combine():
    assert Field.REAL.combine(Field.REAL) is Field.REAL
    assert Field.REAL.combine(Field.COMPLEX) is Field.COMPLEX
    assert Field.COMPLEX.combine(Field.REAL) is Field.COMPLEX


# norms, singular values, conditioning


def test_norms_match_numpy():
    a = _gaussian(5, 3)
    assert frobenius_norm(a) == pytest.approx(np.linalg.norm(a.data, "fro"))
    assert spectral_norm(a) == pytest.approx(np.linalg.norm(a.data, 2))


def test_singular_values_descending():
    sig = singular_values(_gaussian(6, 4))
    assert np.all(np.diff(sig) <= 0)


def test_condition_number_of_identity_is_one():
    assert condition_number(identity(4)) == pytest.approx(1.0)


def test_condition_number_of_zero_is_infinite():
    assert condition_number(zeros(3)) == np.inf


def test_determinant_matches_numpy():
    a = _gaussian(4, 5)
    assert determinant(a) == pytest.approx(np.linalg.det(a.data))
    r = _gaussian(4, 6, Field.REAL)
    d = determinant(r)
    assert d.imag == 0.0
    assert d.real == pytest.approx(np.linalg.det(r.data.real))


# invertibility gate and inversion


def test_inverse_matches_numpy():
    a = _gaussian(5, 7)
    np.testing.assert_allclose(inverse(a).data, np.linalg.inv(a.data), atol=1e-12)


def test_inverse_of_real_matrix_stays_real():
    r = _gaussian(4, 8, Field.REAL)
    inv = inverse(r)
    assert inv.field is Field.REAL
    assert not inv.data.imag.any()


def test_inverse_rejects_singular():
    with pytest.raises(SingularMatrixError) as err:
        inverse(as_matrix(np.diag([1.0, 0.0])))
    assert "sigma_min" in err.value.details


def test_invertibility_gate_is_relative():
    # scaling cannot turn a singular matrix invertible
    base = np.diag([1.0, 1e-15])
    assert not is_invertible(as_matrix(base))
    assert not is_invertible(as_matrix(base * 1e12))
    assert is_invertible(as_matrix(np.diag([1.0, 1e-9])))


def test_is_invertible_false_for_non_square():
    assert not is_invertible(as_matrix(np.ones((2, 3))))


@given(n=st.integers(2, 6), seed=st.integers(0, 10**9))
def test_inverse_roundtrip(n, seed):
    a = _gaussian(n, seed)
    if condition_number(a) > 1e8:
        return
    eye = multiply(a, inverse(a))
    np.testing.assert_allclose(eye.data, np.eye(n), atol=1e-8)


@given(n=st.integers(1, 6), seed=st.integers(0, 10**9))
def test_triangle_inequality(n, seed):
    a = _gaussian(n, seed)
    b = _gaussian(n, seed + 1)
    assert frobenius_norm(add(a, b)) <= frobenius_norm(a) + frobenius_norm(b) + 1e-12
    assert spectral_norm(a) <= frobenius_norm(a) + 1e-12


# seeded randomness


def test_random_source_is_reproducible():
    a = sample_gaussian(3, Field.COMPLEX, RandomSource(42))
    b = sample_gaussian(3, Field.COMPLEX, RandomSource(42))
    np.testing.assert_array_equal(a.data, b.data)


def test_derived_streams_are_independent_of_draw_order():
    root = RandomSource(7)
    first = sample_gaussian(2, Field.REAL, root.derive(1, 5))
    root2 = RandomSource(7)
    root2.derive(3, 3).uniform()  # unrelated sibling draw
    second = sample_gaussian(2, Field.REAL, root2.derive(1, 5))
    np.testing.assert_array_equal(first.data, second.data)


def test_different_keys_give_different_streams():
    root = RandomSource(7)
    a = sample_gaussian(2, Field.REAL, root.derive(0))
    b = sample_gaussian(2, Field.REAL, root.derive(1))
    assert not np.array_equal(a.data, b.data)


def test_seed_range_is_validated():
    with pytest.raises(InputError):
        RandomSource(-1)
    with pytest.raises(InputError):
        RandomSource(2**64)


def test_sample_gaussian_field_tags():
    assert sample_gaussian(3, Field.REAL, RandomSource(0)).field is Field.REAL
    assert sample_gaussian(3, Field.COMPLEX, RandomSource(0)).field is Field.COMPLEX
    with pytest.raises(InputError):
        sample_gaussian(0, Field.REAL, RandomSource(0))
