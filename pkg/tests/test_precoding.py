"""Zero-forcing and lattice-aided precoder tests."""

import numpy as np
import pytest

from mimo_sim.errors import (
    DegenerateInputError,
    DimensionalityViolationError,
    SingularMatrixError,
)
from mimo_sim.precoding import lr_zf_precode, power_scale, zf_precode


def test_zf_diagonal_channel():
    h = np.diag([2.0, 4.0]).astype(complex)
    f = zf_precode(h)
    assert np.allclose(f, np.diag([0.5, 0.25]), atol=1e-12)


def test_zf_wide_channel():
    h = np.array([[1.0, 0.0, 0.0], [0.0, 2.0, 0.0]], dtype=complex)
    f = zf_precode(h)
    assert np.allclose(h @ f, np.eye(2), atol=1e-12)
    assert np.allclose(f, [[1.0, 0.0], [0.0, 0.5], [0.0, 0.0]], atol=1e-12)


def test_zf_random_channels_invert_from_the_right():
    rng = np.random.default_rng(23)
    for _ in range(25):
        rows = int(rng.integers(1, 7))
        cols = int(rng.integers(rows, 10))
        h = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
        f = zf_precode(h)
        assert np.allclose(h @ f, np.eye(rows), atol=1e-9)


def test_zf_rejects_overloaded_and_singular():
    with pytest.raises(DimensionalityViolationError):
        zf_precode(np.ones((3, 2), dtype=complex))
    with pytest.raises(SingularMatrixError):
        zf_precode(np.array([[1.0, 0.0], [1.0, 0.0]], dtype=complex))


def test_lr_zf_identities():
    rng = np.random.default_rng(31)
    h = rng.standard_normal((3, 5)) + 1j * rng.standard_normal((3, 5))
    f_tilde, reduction = lr_zf_precode(h)
    t_inv = reduction.transform_inv.to_complex()
    assert np.allclose(h @ f_tilde, t_inv, atol=1e-9)
    assert np.allclose(f_tilde, zf_precode(h) @ t_inv, atol=1e-9)


def test_power_scale_oracles():
    # beta^2 * symbol_energy * ||F||_F^2 = power
    assert power_scale(np.eye(2), 1.0, 2.0) == pytest.approx(0.5)
    assert power_scale(np.eye(2), 1.0, 1.0) == pytest.approx(1.0 / np.sqrt(2.0))
    f = np.array([[3.0, 0.0], [0.0, 4.0]])
    assert power_scale(f, 50.0, 2.0) == pytest.approx(1.0)


def test_power_scale_errors():
    with pytest.raises(DegenerateInputError):
        power_scale(np.zeros((2, 2)), 1.0, 2.0)
    with pytest.raises(DegenerateInputError):
        power_scale(np.array([[np.inf]]), 1.0, 2.0)
    with pytest.raises(ValueError):
        power_scale(np.eye(2), 0.0, 2.0)
    with pytest.raises(ValueError):
        power_scale(np.eye(2), 1.0, -1.0)


def test_reduced_precoder_needs_less_power_on_average():
    # The reduction shortens the dual basis, so the scaled precoder usually
    # radiates the same power with a larger beta.  Check the median over many
    # draws rather than per-draw dominance.
    rng = np.random.default_rng(47)
    beta_plain = []
    beta_reduced = []
    for _ in range(1000):
        h = rng.standard_normal((6, 8)) + 1j * rng.standard_normal((6, 8))
        f = zf_precode(h)
        f_tilde, _ = lr_zf_precode(h)
        beta_plain.append(power_scale(f, 1.0, 2.0))
        beta_reduced.append(power_scale(f_tilde, 1.0, 2.0))
    assert np.median(beta_reduced) >= np.median(beta_plain)
