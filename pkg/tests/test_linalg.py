"""Numerical kernel tests: QR, pseudo-inverse, rounding, exact integer matrices."""

import numpy as np
import pytest

from mimo_sim.errors import (
    DimensionMismatchError,
    NotUnimodularError,
    RankDeficientError,
    SingularMatrixError,
)
from mimo_sim.linalg import (
    GaussianIntegerMatrix,
    invert_unimodular,
    offdiag_frobenius_sq,
    qr_decompose,
    right_pseudo_inverse,
    round_to_gaussian_integer,
)


def test_qr_hand_example():
    a = np.array([[3.0, 0.0], [4.0, 0.0], [0.0, 1.0]])
    q, r = qr_decompose(a)
    assert np.allclose(r, [[5.0, 0.0], [0.0, 1.0]], atol=1e-12)
    assert np.allclose(q @ r, a, atol=1e-12)


def test_qr_reconstruction_and_diagonal_convention():
    rng = np.random.default_rng(7)
    for _ in range(20):
        rows = rng.integers(2, 9)
        cols = rng.integers(1, rows + 1)
        a = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
        q, r = qr_decompose(a)
        assert np.allclose(q @ r, a, atol=1e-10)
        assert np.allclose(q.conj().T @ q, np.eye(cols), atol=1e-10)
        d = np.diagonal(r)
        assert np.all(d.imag == 0.0)
        assert np.all(d.real > 0.0)
        assert np.allclose(np.tril(r, -1), 0.0, atol=1e-12)


def test_qr_rejects_wide_and_rank_deficient():
    with pytest.raises(DimensionMismatchError):
        qr_decompose(np.ones((2, 3)))
    with pytest.raises(RankDeficientError):
        qr_decompose(np.array([[1.0, 0.0], [2.0, 0.0], [3.0, 0.0]]))
    rank_one = np.outer([1.0, 2.0, 3.0], [1.0, 1.0]) + 0j
    with pytest.raises(RankDeficientError):
        qr_decompose(rank_one)


def test_right_pseudo_inverse_hand_example():
    a = np.array([[1.0, 0.0, 0.0], [0.0, 2.0, 0.0]])
    x = right_pseudo_inverse(a)
    assert np.allclose(x, [[1.0, 0.0], [0.0, 0.5], [0.0, 0.0]], atol=1e-12)
    assert np.allclose(a @ x, np.eye(2), atol=1e-12)


def test_right_pseudo_inverse_random():
    rng = np.random.default_rng(11)
    for _ in range(20):
        rows = rng.integers(1, 7)
        cols = rng.integers(rows, 10)
        a = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
        x = right_pseudo_inverse(a)
        assert np.allclose(a @ x, np.eye(rows), atol=1e-9)


def test_right_pseudo_inverse_errors():
    with pytest.raises(DimensionMismatchError):
        right_pseudo_inverse(np.ones((3, 2)))
    with pytest.raises(SingularMatrixError):
        right_pseudo_inverse(np.array([[1.0, 0.0], [1.0, 0.0]]))


def test_offdiag_frobenius_sq():
    a = np.array([[0.0, 1j], [2.0, 0.0]])
    assert offdiag_frobenius_sq(a) == pytest.approx(5.0)
    assert offdiag_frobenius_sq(np.diag([3.0, 4.0, 5.0])) == 0.0
    with pytest.raises(DimensionMismatchError):
        offdiag_frobenius_sq(np.ones((2, 3)))


def test_round_to_gaussian_integer_half_away_from_zero():
    assert round_to_gaussian_integer(1.5 - 0.5j) == 2.0 - 1.0j
    assert round_to_gaussian_integer(-2.49 + 3.51j) == -2.0 + 4.0j
    assert round_to_gaussian_integer(-0.5 - 1.5j) == -1.0 - 2.0j
    arr = round_to_gaussian_integer(np.array([0.49, 0.5, -0.5]))
    assert np.array_equal(arr, np.array([0.0, 1.0, -1.0], dtype=complex))


def test_gaussian_integer_matrix_basics():
    eye = GaussianIntegerMatrix.identity(3)
    assert eye.is_identity()
    assert eye.shape == (3, 3)
    t = GaussianIntegerMatrix.from_complex(np.array([[1.0, -2.0 + 1j], [0.0, 1.0]]))
    assert t.re[0, 1] == -2 and t.im[0, 1] == 1
    assert np.allclose(t.to_complex(), [[1.0, -2.0 + 1j], [0.0, 1.0]])
    with pytest.raises(ValueError):
        GaussianIntegerMatrix.from_complex(np.array([[0.3]]))
    with pytest.raises(DimensionMismatchError):
        GaussianIntegerMatrix([[1]], [[0], [0]])


def test_gaussian_integer_matmul_is_exact_at_huge_magnitudes():
    # 10^20 overflows any float mantissa; the object arrays must not round.
    big = 10**20
    a = GaussianIntegerMatrix([[1, big], [0, 1]], [[0, 0], [0, 0]])
    b = GaussianIntegerMatrix([[1, -big], [0, 1]], [[0, 0], [0, 0]])
    assert (a @ b).is_identity()
    assert (a @ b).re[0, 1] == 0


def test_gaussian_integer_determinant():
    t = GaussianIntegerMatrix([[2, 0], [0, 3]], [[0, 0], [0, 0]])
    assert t.determinant() == (6, 0)
    rot = GaussianIntegerMatrix([[0, -1], [1, 0]], [[0, 0], [0, 0]])
    assert rot.determinant() == (1, 0)
    imag = GaussianIntegerMatrix([[0, 0], [0, 1]], [[1, 0], [0, 0]])
    assert imag.determinant() == (0, 1)
    with pytest.raises(DimensionMismatchError):
        GaussianIntegerMatrix([[1, 0]], [[0, 0]]).determinant()


def test_invert_unimodular_hand_example():
    t = GaussianIntegerMatrix([[1, 0], [-2, 1]], [[0, 0], [0, 0]])
    inv = invert_unimodular(t)
    assert inv == GaussianIntegerMatrix([[1, 0], [2, 1]], [[0, 0], [0, 0]])
    assert (t @ inv).is_identity()
    assert (inv @ t).is_identity()


def test_invert_unimodular_complex_and_huge():
    t = GaussianIntegerMatrix([[0, 0], [0, 1]], [[1, 0], [0, 0]])  # diag(i, 1)
    inv = invert_unimodular(t)
    assert (t @ inv).is_identity()
    big = 10**20
    shear = GaussianIntegerMatrix([[1, big], [0, 1]], [[0, 0], [0, 0]])
    inv = invert_unimodular(shear)
    assert inv.re[0, 1] == -big
    assert (shear @ inv).is_identity()


def test_invert_unimodular_rejects_non_unimodular():
    with pytest.raises(NotUnimodularError):
        invert_unimodular(GaussianIntegerMatrix([[2, 0], [0, 1]], [[0, 0], [0, 0]]))
    with pytest.raises(NotUnimodularError):
        # det = 1 + i has squared magnitude 2
        invert_unimodular(GaussianIntegerMatrix([[1, 0], [0, 1]], [[1, 0], [0, 0]]))
    with pytest.raises(NotUnimodularError):
        invert_unimodular(GaussianIntegerMatrix([[1, 0]], [[0, 0]]))
    with pytest.raises(NotUnimodularError):
        invert_unimodular(GaussianIntegerMatrix([[0, 0], [0, 0]], [[0, 0], [0, 0]]))
