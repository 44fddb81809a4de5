"""Physical layer tests: channels, QPSK, noise bookkeeping, detection."""

import numpy as np
import pytest

from mimo_sim.coordination import SystemShape
from mimo_sim.errors import DimensionMismatchError, NotUnimodularError
from mimo_sim.lattice import clll_reduce
from mimo_sim.linalg import GaussianIntegerMatrix, invert_unimodular
from mimo_sim.phy import (
    QPSK_BITS_PER_SYMBOL,
    QPSK_SYMBOL_ENERGY,
    add_awgn,
    ebn0_to_sigma2,
    generate_channel,
    lattice_detect,
    linear_detect,
    qpsk_demodulate,
    qpsk_modulate,
)


def test_generate_channel_shapes_and_stacking():
    shape = SystemShape.uniform(3, 2, 5)
    channels = generate_channel(shape, np.random.default_rng(1))
    assert channels.stacked.shape == (6, 5)
    assert len(channels.per_user) == 3
    assert all(h.shape == (2, 5) for h in channels.per_user)
    assert np.array_equal(np.vstack(channels.per_user), channels.stacked)


def test_generate_channel_statistics():
    shape = SystemShape.uniform(4, 4, 500)
    channels = generate_channel(shape, np.random.default_rng(2))
    h = channels.stacked
    assert abs(np.mean(h)) < 0.05
    assert np.var(h) == pytest.approx(1.0, rel=0.1)
    # Halves of the unit variance per real dimension.
    assert np.var(h.real) == pytest.approx(0.5, rel=0.15)


def test_qpsk_constellation():
    symbols = qpsk_modulate([0, 0, 1, 0, 1, 1, 0, 1])
    assert np.array_equal(symbols, [1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j])
    assert np.all(symbols.real**2 + symbols.imag**2 == QPSK_SYMBOL_ENERGY)
    with pytest.raises(DimensionMismatchError):
        qpsk_modulate([0, 1, 0])


def test_qpsk_demodulation():
    assert np.array_equal(qpsk_demodulate(np.array([-0.3 - 2.0j])), [1, 1])
    assert np.array_equal(qpsk_demodulate(np.array([0.9 + 1.2j])), [0, 0])
    assert np.array_equal(qpsk_demodulate(np.array([0.0 + 0.0j])), [0, 0])


def test_qpsk_roundtrip():
    rng = np.random.default_rng(3)
    bits = rng.integers(0, 2, size=400)
    assert np.array_equal(qpsk_demodulate(qpsk_modulate(bits)), bits)


def test_gray_mapping_adjacent_points_differ_in_one_bit():
    ring = [1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j]
    for a, b in zip(ring, ring[1:] + ring[:1]):
        bits_a = qpsk_demodulate(np.array([a]))
        bits_b = qpsk_demodulate(np.array([b]))
        assert np.sum(bits_a != bits_b) == 1


def test_ebn0_to_sigma2_oracles():
    # sigma^2 = (M_R P) / (M_T N 10^(dB/10))
    assert ebn0_to_sigma2(0.0, 10, 10, 2) == pytest.approx(0.5)
    assert ebn0_to_sigma2(10.0, 16, 10, 2) == pytest.approx(0.08)
    assert ebn0_to_sigma2(float("inf"), 16, 10, 2) == 0.0
    grid = [ebn0_to_sigma2(db, 16, 10, 2) for db in (0.0, 5.0, 10.0, 15.0)]
    assert all(b < a for a, b in zip(grid, grid[1:]))
    with pytest.raises(ValueError):
        ebn0_to_sigma2(0.0, 0, 10, 2)
    with pytest.raises(ValueError):
        ebn0_to_sigma2(0.0, 10, 10, 2, power=0.0)


def test_add_awgn():
    rng = np.random.default_rng(4)
    x = rng.standard_normal(10) + 1j * rng.standard_normal(10)
    assert np.array_equal(add_awgn(x, 0.0, rng), x)
    noisy = add_awgn(np.zeros(200000, dtype=complex), 0.3, rng)
    assert np.var(noisy) == pytest.approx(0.3, rel=0.05)
    with pytest.raises(ValueError):
        add_awgn(x, -0.1, rng)


def test_linear_detect():
    bits = np.array([0, 1, 1, 1, 0, 0])
    y = 0.37 * qpsk_modulate(bits)
    assert np.array_equal(linear_detect(y, 0.37), bits)
    with pytest.raises(ValueError):
        linear_detect(y, 0.0)


def test_lattice_detect_identity_matches_linear_bitwise():
    rng = np.random.default_rng(5)
    eye = GaussianIntegerMatrix.identity(4)
    for _ in range(200):
        y = 3.0 * (rng.standard_normal(4) + 1j * rng.standard_normal(4))
        assert np.array_equal(lattice_detect(y, 0.8, eye), linear_detect(y, 0.8))


def exhaustive_frames(streams):
    for word in range(4**streams):
        bits = [(word >> k) & 1 for k in range(2 * streams)]
        yield np.array(bits)


def test_lattice_detect_roundtrip_all_frames():
    shear = GaussianIntegerMatrix([[1, 0], [-2, 1]], [[0, 0], [0, 0]])
    rng = np.random.default_rng(6)
    basis = rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
    from_reduction = clll_reduce(basis).transform
    for transform in (shear, from_reduction):
        n = transform.shape[0]
        t_inv = invert_unimodular(transform)
        beta = 0.6
        for bits in exhaustive_frames(n):
            s = qpsk_modulate(bits)
            y = beta * (t_inv.to_complex() @ s)
            assert np.array_equal(lattice_detect(y, beta, transform, t_inv), bits)


def test_lattice_detect_small_noise_does_not_break_roundtrip():
    transform = GaussianIntegerMatrix([[1, 1], [0, 1]], [[0, -1], [0, 0]])
    t_inv = invert_unimodular(transform)
    rng = np.random.default_rng(7)
    beta = 1.3
    for _ in range(100):
        bits = rng.integers(0, 2, size=4)
        s = qpsk_modulate(bits)
        y = beta * (t_inv.to_complex() @ s) + 0.01 * (
            rng.standard_normal(2) + 1j * rng.standard_normal(2)
        )
        assert np.array_equal(lattice_detect(y, beta, transform, t_inv), bits)


def test_lattice_detect_errors():
    eye = GaussianIntegerMatrix.identity(2)
    y = np.ones(2, dtype=complex)
    with pytest.raises(ValueError):
        lattice_detect(y, 0.0, eye)
    with pytest.raises(DimensionMismatchError):
        lattice_detect(np.ones(3, dtype=complex), 1.0, eye)
    doubled = GaussianIntegerMatrix([[2, 0], [0, 1]], [[0, 0], [0, 0]])
    with pytest.raises(NotUnimodularError):
        lattice_detect(y, 1.0, doubled)


def test_bits_per_symbol_constant():
    assert QPSK_BITS_PER_SYMBOL == 2
