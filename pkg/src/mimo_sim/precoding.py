"""Zero-forcing precoding, with and without lattice-reduction aid."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, DimensionalityViolationError
from .lattice import clll_reduce
from .linalg import GaussianIntegerMatrix, right_pseudo_inverse


@dataclass
class Precoder:
    """Transmit precoder with its power scaling and optional lattice transform.

    For the plain zero-forcing family, matrix is F and the transforms are None.
    For the lattice-aided family, matrix is F_tilde = F T^{-1} and the exact
    transform pair (T, T^{-1}) from the reduction rides along for detection.
    """

    matrix: np.ndarray
    beta: float = 1.0
    lattice_transform: GaussianIntegerMatrix | None = None
    lattice_transform_inv: GaussianIntegerMatrix | None = None


def zf_precode(h_eff):
    """Zero-forcing precoder F = H^H (H H^H)^{-1} of an effective channel.

    Args:
        h_eff: effective channel, streams x tx_antennas, full row rank.

    Returns:
        F with h_eff @ F = identity(streams).

    Raises:
        DimensionalityViolationError: if there are more streams than transmit antennas.
        SingularMatrixError: if H H^H is (numerically) singular.
    """
    h_eff = np.asarray(h_eff, dtype=np.complex128)
    if h_eff.ndim != 2 or h_eff.shape[0] > h_eff.shape[1]:
        raise DimensionalityViolationError(
            f"cannot zero-force {h_eff.shape[0]} streams over {h_eff.shape[1]} antennas"
        )
    return right_pseudo_inverse(h_eff)


def lr_zf_precode(h_eff, params=None):
    """Lattice-reduction-aided zero-forcing precoder.

    Reduces the row basis of the effective channel, then zero-forces the
    reduced basis.  The result equals zf_precode(h_eff) @ T^{-1} up to
    floating-point error, and h_eff @ F_tilde = T^{-1}.

    Returns:
        Tuple (f_tilde, reduction) where reduction is the LatticeReductionResult
        carrying the exact transform pair.
    """
    reduction = clll_reduce(h_eff, params)
    f_tilde = zf_precode(reduction.reduced)
    return f_tilde, reduction


def power_scale(f, power, symbol_energy):
    """Scaling beta so that beta^2 E||F s||^2 equals the power budget.

    With zero-mean symbols of per-entry energy symbol_energy and identity
    covariance shape, E||F s||^2 = symbol_energy * trace(F F^H).

    Args:
        f: precoding matrix.
        power: transmit power budget, > 0.
        symbol_energy: mean squared modulus of one constellation symbol, > 0.

    Raises:
        DegenerateInputError: if F has zero (or non-finite) Frobenius norm.
    """
    if power <= 0 or symbol_energy <= 0:
        raise ValueError("power and symbol_energy must be positive")
    f = np.asarray(f, dtype=np.complex128)
    tr = float(np.sum(np.abs(f) ** 2))
    if not np.isfinite(tr) or tr == 0.0:
        raise DegenerateInputError("precoder has zero or non-finite Frobenius norm")
    return float(np.sqrt(power / (symbol_energy * tr)))
