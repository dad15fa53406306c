import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from schrobs.linalg import (
    BudgetError,
    ShapeError,
    hermitian_split,
    kron,
    matexp,
    opnorm2,
)

from conftest import I2, S01, S10, X, Y, random_matrix


def test_kron_identity():
    assert np.array_equal(kron(I2, I2), np.eye(4))


def test_kron_sigma01_sigma10_single_entry():
    m = kron(S01, S10)
    expected = np.zeros((4, 4))
    expected[1, 2] = 1.0
    assert np.array_equal(m, expected)


def test_kron_xx_flips_both_bits():
    e00 = np.array([1, 0, 0, 0])
    assert np.array_equal(kron(X, X) @ e00, [0, 0, 0, 1])


def test_kron_index_formula(rng):
    a = random_matrix(rng, 3)[:, :2]
    b = random_matrix(rng, 2)
    m = kron(a, b)
    assert m.shape == (6, 4)
    for i in range(3):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    assert abs(m[i * 2 + k, j * 2 + l] - a[i, j] * b[k, l]) <= 1e-15 * abs(a[i, j] * b[k, l])


def test_kron_associative(rng):
    a, b, c = (random_matrix(rng, 2) for _ in range(3))
    assert np.max(np.abs(kron(kron(a, b), c) - kron(a, kron(b, c)))) <= 1e-14


def test_kron_budget():
    big = np.eye(2**8)
    with pytest.raises(BudgetError):
        kron(big, big)


def test_kron_rejects_empty():
    with pytest.raises(ShapeError):
        kron(np.zeros((0, 0)), I2)


def test_matexp_zero_is_identity():
    assert np.allclose(matexp(np.zeros((3, 3)), 2.5), np.eye(3), atol=0)


def test_matexp_ix_quarter_turn():
    # exp(i theta X) = cos(theta) I + i sin(theta) X
    u = matexp(1j * (np.pi / 2) * X, 1.0)
    assert np.max(np.abs(u - 1j * X)) < 1e-12


def test_matexp_diagonal_decay():
    r, t = 0.03, 1.7
    u = matexp(np.diag([-r, -r]), t)
    assert np.allclose(u, np.exp(-r * t) * np.eye(2), rtol=1e-14)


def test_matexp_non_hermitian_matches_series(rng):
    m = random_matrix(rng, 4) * 0.3
    series = np.eye(4, dtype=complex)
    term = np.eye(4, dtype=complex)
    for k in range(1, 40):
        term = term @ m / k
        series = series + term
    assert np.linalg.norm(matexp(m) - series, 2) <= 1e-12 * np.linalg.norm(series, 2)


def test_matexp_rejects_non_square():
    with pytest.raises(ShapeError):
        matexp(np.zeros((2, 3)))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_matexp_skew_hermitian_unitary(seed, n):
    rng = np.random.default_rng(seed)
    h = random_matrix(rng, n)
    s = (h - h.conj().T) / 2
    u = matexp(s, 1.0)
    assert np.max(np.abs(u.conj().T @ u - np.eye(n))) <= 1e-11


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-1, 1), st.floats(-1, 1))
def test_matexp_semigroup(seed, t1, t2):
    rng = np.random.default_rng(seed)
    m = random_matrix(rng, 4)
    m *= 10.0 / np.linalg.norm(m, 2) * rng.uniform(0.1, 1.0)
    lhs = matexp(m, t1 + t2)
    rhs = matexp(m, t1) @ matexp(m, t2)
    assert np.max(np.abs(lhs - rhs)) <= 1e-10 * max(1.0, np.max(np.abs(lhs)))


def test_opnorm2_examples():
    assert abs(opnorm2(np.eye(5)) - 1) < 1e-12
    assert abs(opnorm2(2 * X) - 2) < 1e-12
    assert abs(opnorm2(S01 + S10) - 1) < 1e-12
    assert opnorm2(np.zeros((3, 3))) == 0.0


def test_opnorm2_matches_svd(rng):
    for n in (2, 7, 16, 300):
        m = random_matrix(rng, n)
        ref = np.linalg.svd(m, compute_uv=False)[0]
        assert abs(opnorm2(m) - ref) <= 1e-10 * ref


def test_opnorm2_start_vector_orthogonal_to_top():
    # The all-equal start vector is orthogonal to (1,-1); top singular value is 3.
    m = np.array([[1.0, -1.0], [-1.0, 1.0]]) * 1.5 + 0.1 * np.eye(2)
    assert abs(opnorm2(m) - np.linalg.norm(m, 2)) < 1e-12


def test_hermitian_split_hermitian_input(rng):
    a = random_matrix(rng, 4)
    h = a + a.conj().T
    m1, m2 = hermitian_split(h)
    assert np.allclose(m1, h, atol=1e-14)
    assert np.max(np.abs(m2)) < 1e-14


def test_hermitian_split_sigma01():
    m1, m2 = hermitian_split(S01)
    assert np.allclose(m1, X / 2, atol=1e-15)
    assert np.allclose(m2, Y / 2, atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 8))
def test_hermitian_split_properties(seed, n):
    rng = np.random.default_rng(seed)
    m = random_matrix(rng, n)
    m1, m2 = hermitian_split(m)
    assert np.array_equal(m1, m1.conj().T)
    assert np.array_equal(m2, m2.conj().T)
    assert np.max(np.abs(m1 + 1j * m2 - m)) <= 1e-14 * max(1.0, np.max(np.abs(m)))
