"""Channels, QPSK mapping, noise, and symbol detection.

Channel entries are i.i.d. circularly-symmetric complex Gaussian with unit
variance (one half per real dimension).  QPSK uses the Gray mapping
(b0, b1) -> (1 - 2 b0) + j (1 - 2 b1), so each symbol carries two bits and has
energy 2.  The lattice-domain detector quantizes in the transformed coordinates
z = T^{-1} s, where the QPSK alphabet becomes a translate of the scaled
Gaussian-integer lattice 2 Z[i]^r.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError
from .linalg import GaussianIntegerMatrix, invert_unimodular, round_to_gaussian_integer

QPSK_BITS_PER_SYMBOL = 2
QPSK_SYMBOL_ENERGY = 2.0


@dataclass
class ChannelSet:
    """Per-user channel blocks and their row-stacked composite."""

    per_user: tuple
    stacked: np.ndarray


def generate_channel(shape, rng):
    """Draw one i.i.d. CN(0, 1) downlink channel for every user.

    Args:
        shape: SystemShape with the system dimensions.
        rng: numpy Generator.

    Returns:
        ChannelSet whose stacked matrix is total_rx_antennas x tx_antennas.
    """
    m_r = shape.total_rx_antennas
    m_t = shape.tx_antennas
    stacked = np.sqrt(0.5) * (
        rng.standard_normal((m_r, m_t)) + 1j * rng.standard_normal((m_r, m_t))
    )
    per_user = []
    row = 0
    for m in shape.rx_antennas:
        per_user.append(stacked[row : row + m])
        row += m
    return ChannelSet(per_user=tuple(per_user), stacked=stacked)


def qpsk_modulate(bits):
    """Map interleaved bit pairs onto QPSK symbols, Gray coded.

    bits[2i] drives the real part and bits[2i + 1] the imaginary part of
    symbol i: (0, 0) -> 1+1j, (1, 0) -> -1+1j, (1, 1) -> -1-1j, (0, 1) -> 1-1j.
    """
    bits = np.asarray(bits)
    if bits.size % 2 != 0:
        raise DimensionMismatchError("bit vector length must be even")
    b0 = bits[0::2]
    b1 = bits[1::2]
    return (1 - 2 * b0) + 1j * (1 - 2 * b1)


def qpsk_demodulate(symbols):
    """Slice symbols to the nearest QPSK point and demap; ties go to bit 0."""
    symbols = np.asarray(symbols)
    bits = np.empty(2 * symbols.size, dtype=np.int64)
    bits[0::2] = symbols.real < 0
    bits[1::2] = symbols.imag < 0
    return bits


def ebn0_to_sigma2(ebn0_db, rx_antennas, tx_antennas, bits_per_symbol=QPSK_BITS_PER_SYMBOL, power=1.0):
    """Noise variance for a target Eb/N0 in dB.

    Eb/N0 = (M_R P_s) / (M_T N sigma^2), so sigma^2 scales with the receive
    array size and inversely with the transmit array size and the bit rate.
    An infinite ebn0_db is the noiseless sentinel and maps to 0.
    """
    if rx_antennas < 1 or tx_antennas < 1 or bits_per_symbol < 1 or power <= 0:
        raise ValueError("antenna counts, bits per symbol, and power must be positive")
    ratio = 10.0 ** (float(ebn0_db) / 10.0)
    if np.isinf(ratio):
        return 0.0
    return (rx_antennas * power) / (tx_antennas * bits_per_symbol * ratio)


def add_awgn(signal, sigma2, rng):
    """Add circularly-symmetric complex Gaussian noise of variance sigma2.

    sigma2 = 0 returns the input unchanged (noiseless sentinel).
    """
    if sigma2 < 0:
        raise ValueError(f"noise variance must be >= 0, got {sigma2}")
    signal = np.asarray(signal, dtype=np.complex128)
    if sigma2 == 0.0:
        return signal
    noise = np.sqrt(sigma2 / 2.0) * (
        rng.standard_normal(signal.shape) + 1j * rng.standard_normal(signal.shape)
    )
    return signal + noise


def linear_detect(received, beta):
    """Undo the power scaling and slice each stream independently."""
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    return qpsk_demodulate(np.asarray(received, dtype=np.complex128) / beta)


def lattice_detect(received, beta, transform, transform_inv=None):
    """Detect QPSK symbols transmitted through a lattice-reduced precoder.

    The receiver sees (up to noise and residual interference) beta T^{-1} s.
    QPSK symbols live on 2 Z[i]^r shifted by d = (1+1j) * ones, so z = T^{-1} s
    lies on 2 Z[i]^r shifted by t = T^{-1} d.  Quantization rounds in z space,
    maps back through T, and slices to the alphabet:

        z_hat = 2 round((y / beta + t) / 2) - t,   s_hat = T z_hat.

    With the identity transform this reduces bit-for-bit to linear_detect.

    Args:
        received: filtered receive vector, one entry per stream.
        beta: power scaling applied at the transmitter, > 0.
        transform: unimodular GaussianIntegerMatrix T from the reduction.
        transform_inv: optional exact inverse of T; computed (and validated)
            when omitted.

    Raises:
        NotUnimodularError: if the inverse must be computed and T is not unimodular.
        DimensionMismatchError: if the vector length does not match T.
    """
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    y = np.asarray(received, dtype=np.complex128)
    n = transform.shape[0]
    if transform.shape[1] != n or y.shape != (n,):
        raise DimensionMismatchError(
            f"received vector {y.shape} does not match transform {transform.shape}"
        )
    if transform_inv is None:
        transform_inv = invert_unimodular(transform)
    t_c = transform.to_complex() if isinstance(transform, GaussianIntegerMatrix) else np.asarray(transform)
    t_inv_c = (
        transform_inv.to_complex()
        if isinstance(transform_inv, GaussianIntegerMatrix)
        else np.asarray(transform_inv)
    )
    shift = t_inv_c @ ((1.0 + 1.0j) * np.ones(n))
    z_hat = 2.0 * round_to_gaussian_integer((y / beta + shift) / 2.0) - shift
    s_hat = t_c @ z_hat
    return qpsk_demodulate(s_hat)
