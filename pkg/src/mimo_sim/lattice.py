"""Complex LLL reduction of row bases with exact unimodular bookkeeping.

A basis is a full-row-rank complex matrix whose rows span a lattice over the
Gaussian integers.  Reduction conditions are evaluated on the R factor of the
QR decomposition of the transposed basis: with basis.T = Q R,

    size condition:    |Re r[l, m]| <= 1/2 |r[l, l]|   and
                       |Im r[l, m]| <= 1/2 |r[l, l]|   for l < m
    Lovasz condition:  delta |r[m-1, m-1]|^2 <= |r[m, m]|^2 + |r[m-1, m]|^2

for a shaping parameter delta in (1/2, 1].  The size condition is the
componentwise one that rounding to Gaussian integers can achieve; the
modulus of a reduced entry can still reach sqrt(2)/2 of the diagonal entry
(the covering radius of the Gaussian integers), so no reduction can promise
a modulus bound of one half.  The reduction returns the reduced
basis together with the unimodular transform T and its exact inverse, so that
reduced = T @ basis and basis = T^{-1} @ reduced hold by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonTerminatingError, RankDeficientError
from .linalg import RANK_TOL, GaussianIntegerMatrix, _round_half_away

DEFAULT_DELTA = 0.75
DEFAULT_MAX_ITERATIONS = 10**6

# Absolute slack applied to both reduction inequalities when re-checking a
# basis from a fresh QR factorization.
CHECK_SLACK = 1e-9


def _validate_delta(delta):
    if not 0.5 < delta <= 1.0:
        raise ValueError(f"delta must lie in (1/2, 1], got {delta}")


@dataclass(frozen=True)
class ReductionParams:
    """Knobs of the reduction: Lovasz delta and the elementary-operation budget."""

    delta: float = DEFAULT_DELTA
    max_iterations: int = DEFAULT_MAX_ITERATIONS

    def __post_init__(self):
        _validate_delta(self.delta)
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")


@dataclass
class LatticeReductionResult:
    """Outcome of one reduction run.

    reduced equals transform.to_complex() @ basis; transform_inv is the exact
    Gaussian-integer inverse of transform, accumulated alongside it.
    """

    reduced: np.ndarray
    transform: GaussianIntegerMatrix
    transform_inv: GaussianIntegerMatrix
    swap_count: int = 0
    size_reduction_count: int = 0


def _qr_of_transpose(basis):
    """QR of basis.T with the diagonal of R rotated to be real non-negative."""
    b = np.asarray(basis, dtype=np.complex128).T
    q, r = np.linalg.qr(b)
    diag = np.diagonal(r)
    mags = np.abs(diag)
    phases = np.where(mags > 0, diag / np.where(mags > 0, mags, 1.0), 1.0)
    r = r * np.conj(phases)[:, None]
    r[np.diag_indices(r.shape[0])] = mags
    return q * phases, r


def _check_rank(basis, r):
    scale = np.sqrt(np.max(np.sum(np.abs(basis) ** 2, axis=1)))
    if scale == 0.0 or np.any(np.abs(np.diagonal(r)) < RANK_TOL * scale):
        raise RankDeficientError("basis rows are not linearly independent")


def clll_reduce(basis, params=None):
    """Reduce a row basis with the complex LLL algorithm.

    Args:
        basis: complex matrix, rows <= cols, full row rank; rows span the lattice.
        params: ReductionParams; defaults to delta = 3/4 and a 10^6 operation budget.

    Returns:
        LatticeReductionResult with the reduced basis, the exact unimodular
        transform T (reduced = T @ basis), its exact inverse, and the number of
        column swaps and size reductions performed.

    Raises:
        RankDeficientError: if the rows are linearly dependent.
        NonTerminatingError: if the elementary-operation budget is exhausted.
    """
    if params is None:
        params = ReductionParams()
    basis = np.asarray(basis, dtype=np.complex128)
    if basis.ndim != 2 or basis.shape[0] > basis.shape[1]:
        raise RankDeficientError(f"basis must have rows <= cols, got {basis.shape}")
    n = basis.shape[0]
    _, r = _qr_of_transpose(basis)
    _check_rank(basis, r)
    delta = params.delta
    budget = params.max_iterations

    # Column transform U on basis.T and its inverse V, both exact.  The row
    # transform of the returned result is T = U.T with T^{-1} = V.T.
    u_re = np.zeros((n, n), dtype=object)
    u_im = np.zeros((n, n), dtype=object)
    v_re = np.zeros((n, n), dtype=object)
    v_im = np.zeros((n, n), dtype=object)
    for i in range(n):
        u_re[i, i] = 1
        v_re[i, i] = 1

    ops = 0
    swaps = 0
    size_reds = 0

    def size_reduce(k, l):
        nonlocal ops, size_reds
        ratio = r[l, k] / r[l, l]
        mu_re = _round_half_away(ratio.real)
        mu_im = _round_half_away(ratio.imag)
        if mu_re == 0 and mu_im == 0:
            return
        mu = complex(mu_re, mu_im)
        r[: l + 1, k] -= mu * r[: l + 1, l]
        # Column op on U: col k -= mu * col l.  Inverse op on V: row l += mu * row k.
        u_re[:, k] -= mu_re * u_re[:, l] - mu_im * u_im[:, l]
        u_im[:, k] -= mu_re * u_im[:, l] + mu_im * u_re[:, l]
        v_re[l, :] += mu_re * v_re[k, :] - mu_im * v_im[k, :]
        v_im[l, :] += mu_re * v_im[k, :] + mu_im * v_re[k, :]
        ops += 1
        size_reds += 1

    k = 1
    while k < n:
        if ops >= budget:
            raise NonTerminatingError(f"reduction exceeded {budget} elementary operations")
        size_reduce(k, k - 1)
        if delta * abs(r[k - 1, k - 1]) ** 2 > abs(r[k, k]) ** 2 + abs(r[k - 1, k]) ** 2:
            # Lovasz condition failed: swap the two basis vectors.
            r[:, [k - 1, k]] = r[:, [k, k - 1]]
            u_re[:, [k - 1, k]] = u_re[:, [k, k - 1]]
            u_im[:, [k - 1, k]] = u_im[:, [k, k - 1]]
            v_re[[k - 1, k], :] = v_re[[k, k - 1], :]
            v_im[[k - 1, k], :] = v_im[[k, k - 1], :]
            # Re-triangularize rows k-1, k with a Givens rotation.
            alpha = r[k - 1, k - 1]
            beta = r[k, k - 1]
            rho = np.hypot(abs(alpha), abs(beta))
            g = np.array(
                [[np.conj(alpha) / rho, np.conj(beta) / rho], [-beta / rho, alpha / rho]],
                dtype=np.complex128,
            )
            r[k - 1 : k + 1, k - 1 :] = g @ r[k - 1 : k + 1, k - 1 :]
            r[k - 1, k - 1] = rho
            r[k, k - 1] = 0.0
            mag = abs(r[k, k])
            if mag > 0:
                r[k, k:] *= np.conj(r[k, k]) / mag
                r[k, k] = mag
            ops += 1
            swaps += 1
            k = max(k - 1, 1)
        else:
            for l in range(k - 2, -1, -1):
                size_reduce(k, l)
            k += 1

    transform = GaussianIntegerMatrix(u_re.T.copy(), u_im.T.copy())
    transform_inv = GaussianIntegerMatrix(v_re.T.copy(), v_im.T.copy())
    reduced = transform.to_complex() @ basis
    return LatticeReductionResult(
        reduced=reduced,
        transform=transform,
        transform_inv=transform_inv,
        swap_count=swaps,
        size_reduction_count=size_reds,
    )


def is_clll_reduced(basis, delta=DEFAULT_DELTA, tol=CHECK_SLACK):
    """Check both reduction conditions on a fresh QR of the transposed basis.

    Each inequality is tested with an absolute slack of tol to absorb
    floating-point drift.

    Raises:
        RankDeficientError: if the rows are linearly dependent.
    """
    _validate_delta(delta)
    basis = np.asarray(basis, dtype=np.complex128)
    _, r = _qr_of_transpose(basis)
    _check_rank(basis, r)
    n = basis.shape[0]
    for m in range(1, n):
        for l in range(m):
            bound = 0.5 * abs(r[l, l]) + tol
            if abs(r[l, m].real) > bound or abs(r[l, m].imag) > bound:
                return False
    for m in range(1, n):
        if delta * abs(r[m - 1, m - 1]) ** 2 > abs(r[m, m]) ** 2 + abs(r[m - 1, m]) ** 2 + tol:
            return False
    return True


def orthogonality_defect(basis):
    """Product of row norms divided by the lattice volume; 1 iff rows orthogonal.

    Raises:
        RankDeficientError: if the rows are linearly dependent.
    """
    basis = np.asarray(basis, dtype=np.complex128)
    _, r = _qr_of_transpose(basis)
    _check_rank(basis, r)
    norms = np.sqrt(np.sum(np.abs(basis) ** 2, axis=1))
    # vol(L)^2 = det(basis basis^H) = prod |r_ii|^2
    log_defect = float(np.sum(np.log(norms)) - np.sum(np.log(np.abs(np.diagonal(r)))))
    return float(np.exp(log_defect))


def is_unimodular(t):
    """True iff t is square with Gaussian-integer entries and |det t| = 1."""
    n, m = t.shape
    if n != m:
        return False
    dr, di = t.determinant()
    return dr * dr + di * di == 1
