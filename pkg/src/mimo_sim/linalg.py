"""Dense complex linear algebra and exact Gaussian-integer matrix arithmetic.

Floating-point work (QR factorization, right pseudo-inverses, interference
energies) runs on complex128 numpy arrays.  Unimodular transforms produced by
lattice reduction are kept exact: ``GaussianIntegerMatrix`` stores real and
imaginary parts as arbitrary-precision Python integers, and inversion runs in
rational arithmetic so no floating point ever touches it.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import (
    DegenerateInputError,
    DimensionMismatchError,
    NotUnimodularError,
    RankDeficientError,
    SingularMatrixError,
)

# Relative threshold under which a diagonal of R flags a rank deficiency.
RANK_TOL = 1e-12

# Condition-number estimate above which a Gram matrix is treated as singular.
COND_LIMIT = 1e12


def qr_decompose(a):
    """Householder QR factorization with a real non-negative diagonal of R.

    Args:
        a: complex matrix with rows >= cols.

    Returns:
        Tuple (q, r) with a = q @ r, q having orthonormal columns and r upper
        triangular with real entries >= 0 on its diagonal.

    Raises:
        DimensionMismatchError: if a has more columns than rows.
        RankDeficientError: if a diagonal of R falls below RANK_TOL times the
            largest column norm of a.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionMismatchError(f"expected a matrix, got ndim={a.ndim}")
    rows, cols = a.shape
    if rows < cols:
        raise DimensionMismatchError(f"QR needs rows >= cols, got {rows}x{cols}")
    q, r = np.linalg.qr(a)
    # LAPACK leaves arbitrary phases on the diagonal; rotate them away so the
    # diagonal is real and non-negative.
    diag = np.diagonal(r)
    phases = np.where(np.abs(diag) > 0, diag / np.where(np.abs(diag) > 0, np.abs(diag), 1.0), 1.0)
    q = q * phases
    r = r * np.conj(phases)[:, None]
    scale = np.sqrt(np.max(np.sum(np.abs(a) ** 2, axis=0))) if a.size else 0.0
    small = np.abs(np.diagonal(r)) < RANK_TOL * scale
    if np.any(small) or (a.size and scale == 0.0):
        raise RankDeficientError(f"rank-deficient input: {int(np.sum(small))} negligible pivot(s)")
    # Guard against stray -0.0 imaginary parts on the diagonal.
    r[np.diag_indices(cols)] = np.abs(diag)
    return q, r


def right_pseudo_inverse(a):
    """Right pseudo-inverse X = A^H (A A^H)^{-1} of a full-row-rank matrix.

    Computed from a QR factorization of A^H rather than the normal equations,
    which keeps the effective condition number at cond(A) instead of cond(A)^2.

    Args:
        a: complex matrix with rows <= cols and full row rank.

    Returns:
        Matrix x with a @ x = identity(rows).

    Raises:
        DimensionMismatchError: if a has more rows than columns.
        SingularMatrixError: if A A^H is singular or its condition estimate
            exceeds COND_LIMIT.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionMismatchError(f"expected a matrix, got ndim={a.ndim}")
    rows, cols = a.shape
    if rows > cols:
        raise DimensionMismatchError(f"right inverse needs rows <= cols, got {rows}x{cols}")
    q, r = np.linalg.qr(a.conj().T)
    mags = np.abs(np.diagonal(r))
    lo = float(np.min(mags)) if mags.size else 0.0
    hi = float(np.max(mags)) if mags.size else 0.0
    # cond(A A^H) ~ (max |r_ii| / min |r_ii|)^2 since A A^H = R^H R.
    if lo == 0.0 or (hi / lo) ** 2 > COND_LIMIT:
        raise SingularMatrixError("A A^H is singular or ill-conditioned beyond 1e12")
    return q @ np.linalg.inv(r).conj().T


def offdiag_frobenius_sq(a):
    """Squared Frobenius norm of the off-diagonal part of a square matrix.

    Raises:
        DimensionMismatchError: if a is not square.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {a.shape}")
    total = float(np.sum(np.abs(a) ** 2))
    return total - float(np.sum(np.abs(np.diagonal(a)) ** 2))


def round_to_gaussian_integer(z):
    """Round real and imaginary parts to the nearest integer, halves away from zero.

    Accepts scalars or arrays; returns complex128 with integral components.
    """
    z = np.asarray(z, dtype=np.complex128)
    re = np.sign(z.real) * np.floor(np.abs(z.real) + 0.5)
    im = np.sign(z.imag) * np.floor(np.abs(z.imag) + 0.5)
    return re + 1j * im


def _round_half_away(x):
    """Round a float to int, halves away from zero."""
    if x >= 0.0:
        return int(np.floor(x + 0.5))
    return -int(np.floor(-x + 0.5))


class GaussianIntegerMatrix:
    """Exact matrix over the Gaussian integers Z[i].

    Real and imaginary parts live in separate object-dtype arrays holding
    Python integers, so arithmetic never rounds regardless of magnitude.
    """

    __slots__ = ("re", "im")

    def __init__(self, re, im):
        re = np.array(re, dtype=object)
        im = np.array(im, dtype=object)
        if re.shape != im.shape or re.ndim != 2:
            raise DimensionMismatchError("re and im must be 2-d arrays of equal shape")
        self.re = re
        self.im = im

    @classmethod
    def identity(cls, n):
        re = np.zeros((n, n), dtype=object)
        for i in range(n):
            re[i, i] = 1
        return cls(re, np.zeros((n, n), dtype=object))

    @classmethod
    def from_parts(cls, re, im):
        """Wrap integer-valued arrays (no copy semantics guaranteed)."""
        return cls(re, im)

    @classmethod
    def from_complex(cls, a, tol=1e-9):
        """Convert a complex array whose entries are integral within tol."""
        a = np.asarray(a, dtype=np.complex128)
        re = np.round(a.real)
        im = np.round(a.imag)
        if np.max(np.abs(a.real - re), initial=0.0) > tol or np.max(np.abs(a.imag - im), initial=0.0) > tol:
            raise ValueError("entries are not Gaussian integers within tolerance")
        re_obj = np.array([[int(v) for v in row] for row in re.tolist()], dtype=object).reshape(a.shape)
        im_obj = np.array([[int(v) for v in row] for row in im.tolist()], dtype=object).reshape(a.shape)
        return cls(re_obj, im_obj)

    @property
    def shape(self):
        return self.re.shape

    def to_complex(self):
        return self.re.astype(np.complex128) + 1j * self.im.astype(np.complex128)

    def __matmul__(self, other):
        if not isinstance(other, GaussianIntegerMatrix):
            return NotImplemented
        if self.shape[1] != other.shape[0]:
            raise DimensionMismatchError(f"cannot multiply {self.shape} by {other.shape}")
        re = self.re @ other.re - self.im @ other.im
        im = self.re @ other.im + self.im @ other.re
        return GaussianIntegerMatrix(re, im)

    def __eq__(self, other):
        if not isinstance(other, GaussianIntegerMatrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and bool(np.all(self.re == other.re))
            and bool(np.all(self.im == other.im))
        )

    def __repr__(self):
        return f"GaussianIntegerMatrix(re={self.re.tolist()}, im={self.im.tolist()})"

    def is_identity(self):
        n, m = self.shape
        if n != m:
            return False
        eye = GaussianIntegerMatrix.identity(n)
        return self == eye

    def determinant(self):
        """Exact determinant as an (re, im) pair of Python integers."""
        n, m = self.shape
        if n != m:
            raise DimensionMismatchError("determinant needs a square matrix")
        dr, di = _exact_determinant(self.re, self.im)
        if dr.denominator != 1 or di.denominator != 1:
            raise AssertionError("integer matrix produced a non-integer determinant")
        return int(dr), int(di)


def _exact_determinant(re, im):
    """Determinant of an integer matrix via fraction-exact Gaussian elimination."""
    n = re.shape[0]
    a = [[(Fraction(int(re[i, j])), Fraction(int(im[i, j]))) for j in range(n)] for i in range(n)]
    det_re, det_im = Fraction(1), Fraction(0)
    for col in range(n):
        pivot_row = next((r for r in range(col, n) if a[r][col][0] != 0 or a[r][col][1] != 0), None)
        if pivot_row is None:
            return Fraction(0), Fraction(0)
        if pivot_row != col:
            a[col], a[pivot_row] = a[pivot_row], a[col]
            det_re, det_im = -det_re, -det_im
        pr, pi = a[col][col]
        det_re, det_im = det_re * pr - det_im * pi, det_re * pi + det_im * pr
        for r in range(col + 1, n):
            fr, fi = _cdiv(a[r][col], (pr, pi))
            if fr == 0 and fi == 0:
                continue
            for c in range(col, n):
                mr, mi = a[col][c]
                a[r][c] = (a[r][c][0] - (fr * mr - fi * mi), a[r][c][1] - (fr * mi + fi * mr))
    return det_re, det_im


def _cdiv(num, den):
    """Divide two complex rationals given as (re, im) Fraction pairs."""
    nr, ni = num
    dr, di = den
    mag = dr * dr + di * di
    return ((nr * dr + ni * di) / mag, (ni * dr - nr * di) / mag)


def invert_unimodular(t):
    """Exact inverse of a unimodular Gaussian-integer matrix.

    Runs Gauss-Jordan elimination over the rationals Q(i); no floating point
    appears anywhere in the computation.  The result has Gaussian-integer
    entries whenever the input is unimodular.

    Args:
        t: GaussianIntegerMatrix with |det t| = 1.

    Returns:
        GaussianIntegerMatrix inverse with t @ inverse exactly the identity.

    Raises:
        NotUnimodularError: if t is not square or |det t| != 1.
    """
    n, m = t.shape
    if n != m:
        raise NotUnimodularError(f"unimodular matrices are square, got {n}x{m}")
    a = [[(Fraction(int(t.re[i, j])), Fraction(int(t.im[i, j]))) for j in range(n)] for i in range(n)]
    inv = [[(Fraction(1 if i == j else 0), Fraction(0)) for j in range(n)] for i in range(n)]
    det_re, det_im = Fraction(1), Fraction(0)
    for col in range(n):
        pivot_row = next((r for r in range(col, n) if a[r][col][0] != 0 or a[r][col][1] != 0), None)
        if pivot_row is None:
            raise NotUnimodularError("matrix is singular")
        if pivot_row != col:
            a[col], a[pivot_row] = a[pivot_row], a[col]
            inv[col], inv[pivot_row] = inv[pivot_row], inv[col]
            det_re, det_im = -det_re, -det_im
        pr, pi = a[col][col]
        det_re, det_im = det_re * pr - det_im * pi, det_re * pi + det_im * pr
        # Normalize the pivot row to 1.
        for c in range(n):
            a[col][c] = _cdiv(a[col][c], (pr, pi))
            inv[col][c] = _cdiv(inv[col][c], (pr, pi))
        for r in range(n):
            if r == col:
                continue
            fr, fi = a[r][col]
            if fr == 0 and fi == 0:
                continue
            for c in range(n):
                mr, mi = a[col][c]
                a[r][c] = (a[r][c][0] - (fr * mr - fi * mi), a[r][c][1] - (fr * mi + fi * mr))
                mr, mi = inv[col][c]
                inv[r][c] = (inv[r][c][0] - (fr * mr - fi * mi), inv[r][c][1] - (fr * mi + fi * mr))
    if det_re * det_re + det_im * det_im != 1:
        raise NotUnimodularError(f"|det| != 1 (det = {int(det_re)}{int(det_im):+d}i)")
    re = np.zeros((n, n), dtype=object)
    im = np.zeros((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            vr, vi = inv[i][j]
            if vr.denominator != 1 or vi.denominator != 1:
                raise NotUnimodularError("inverse is not Gaussian-integer valued")
            re[i, j] = int(vr)
            im[i, j] = int(vi)
    return GaussianIntegerMatrix(re, im)
