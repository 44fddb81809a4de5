"""Coordinated transmit-receive beamforming for overloaded downlinks.

When the receive antennas across all users outnumber the transmit antennas,
plain zero-forcing is infeasible.  The coordination scheme picks a random
subset of users that keep all of their streams, reduces every remaining user
to a single stream behind a receive filter, and then alternates between
zero-forcing the resulting equivalent channel and matched-filter updates of
the receive filters until the residual multi-user interference falls below a
threshold.  A lattice-aided variant reduces the converged equivalent channel
and re-derives the precoder from the reduced basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatchError,
    InfeasibleError,
    SingularIterateError,
    SingularMatrixError,
)
from .lattice import ReductionParams, clll_reduce
from .linalg import offdiag_frobenius_sq
from .precoding import Precoder, power_scale, zf_precode

# Filters with a norm below this are treated as degenerate.
_FILTER_TINY = 1e-12


@dataclass(frozen=True)
class SystemShape:
    """Downlink dimensions: users, per-user receive antennas, transmit antennas."""

    users: int
    rx_antennas: tuple
    tx_antennas: int

    def __post_init__(self):
        object.__setattr__(self, "rx_antennas", tuple(int(m) for m in self.rx_antennas))
        if self.users < 1:
            raise InfeasibleError(f"need at least one user, got {self.users}")
        if len(self.rx_antennas) != self.users:
            raise InfeasibleError(
                f"rx_antennas lists {len(self.rx_antennas)} users, expected {self.users}"
            )
        if any(m < 1 for m in self.rx_antennas):
            raise InfeasibleError("every user needs at least one receive antenna")
        if self.tx_antennas < self.users:
            raise InfeasibleError(
                f"{self.tx_antennas} transmit antennas cannot serve {self.users} users "
                "one stream each"
            )

    @classmethod
    def uniform(cls, users, rx_per_user, tx_antennas):
        return cls(users, (rx_per_user,) * users, tx_antennas)

    @property
    def total_rx_antennas(self):
        return sum(self.rx_antennas)

    @property
    def loading_coefficient(self):
        return self.total_rx_antennas / self.tx_antennas


@dataclass(frozen=True)
class UserSelection:
    """Partition of the users for one channel realization.

    Selected users keep all of their receive antennas as streams; remaining
    users get a single filtered stream each.  streams is the total stream
    count of the equivalent channel.
    """

    selected: tuple
    remaining: tuple
    streams: int

    @property
    def full_stream_users(self):
        return len(self.selected)

    @property
    def single_stream_users(self):
        return len(self.remaining)


def select_users(shape, rng):
    """Draw a uniformly random set of full-stream users for one realization.

    The number of full-stream users is j = M_T - K whenever the transmit array
    is larger than the user count (capped at K), and zero otherwise, so the
    equivalent channel never has more rows than transmit antennas.

    Raises:
        InfeasibleError: if the resulting stream count exceeds the transmit
            antennas (possible only for non-uniform per-user antenna counts).
    """
    k = shape.users
    j = min(max(shape.tx_antennas - k, 0), k)
    chosen = rng.choice(k, size=j, replace=False)
    selected = tuple(sorted(int(u) for u in chosen))
    remaining = tuple(u for u in range(k) if u not in set(selected))
    streams = sum(shape.rx_antennas[u] for u in selected) + len(remaining)
    if streams > shape.tx_antennas:
        raise InfeasibleError(
            f"selection yields {streams} streams over {shape.tx_antennas} antennas"
        )
    return UserSelection(selected=selected, remaining=remaining, streams=streams)


@dataclass(frozen=True)
class CoordinationParams:
    """Iteration controls plus the parameters of the optional reduction stage."""

    epsilon: float = 1e-5
    max_iterations: int = 20
    reduction: ReductionParams = field(default_factory=ReductionParams)
    power: float = 1.0
    symbol_energy: float = 2.0

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.power <= 0 or self.symbol_energy <= 0:
            raise ValueError("power and symbol_energy must be positive")


@dataclass
class CoordinationResult:
    """Converged (or capped) state of one coordination run.

    The precoder is always re-derived from the returned equivalent channel,
    so the pair composes to (a scaled) identity at working precision whether
    or not the run converged; residual_mui_trace records the cross-iteration
    interference the exit test actually saw.
    """

    equivalent_channel: np.ndarray
    receive_filter: np.ndarray
    precoder: Precoder
    selection: UserSelection
    iterations: int
    residual_mui_trace: tuple
    converged: bool


def assemble_equivalent_channel(per_user, selection, filters):
    """Stack selected users' raw channels over remaining users' filtered rows.

    Args:
        per_user: sequence of per-user channel matrices, each M_k x M_T.
        selection: UserSelection for this realization.
        filters: unit-norm receive filters, one per remaining user, in
            selection.remaining order.

    Returns:
        Equivalent channel of shape (selection.streams, M_T).
    """
    if len(filters) != len(selection.remaining):
        raise DimensionMismatchError(
            f"{len(filters)} filters for {len(selection.remaining)} remaining users"
        )
    blocks = [np.asarray(per_user[u], dtype=np.complex128) for u in selection.selected]
    for w, u in zip(filters, selection.remaining):
        w = np.asarray(w, dtype=np.complex128)
        h = np.asarray(per_user[u], dtype=np.complex128)
        if w.shape != (h.shape[0],):
            raise DimensionMismatchError(
                f"filter of length {w.shape} does not match user {u} with {h.shape[0]} antennas"
            )
        if abs(float(np.linalg.norm(w)) - 1.0) > 1e-9:
            raise ValueError(f"receive filter for user {u} is not unit-norm")
        blocks.append(w.conj() @ h)
    return np.vstack([b if b.ndim == 2 else b[None, :] for b in blocks])


def residual_mui(equivalent_channel, precoder_matrix):
    """Off-diagonal interference energy of equivalent_channel @ precoder_matrix."""
    h_e = np.asarray(equivalent_channel, dtype=np.complex128)
    f = np.asarray(precoder_matrix, dtype=np.complex128)
    if h_e.shape[1] != f.shape[0] or h_e.shape[0] != f.shape[1]:
        raise DimensionMismatchError(
            f"equivalent channel {h_e.shape} and precoder {f.shape} do not compose to a square matrix"
        )
    return offdiag_frobenius_sq(h_e @ f)


def _draw_filters(per_user, remaining, rng):
    filters = []
    for u in remaining:
        m = per_user[u].shape[0]
        w = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        norm = np.linalg.norm(w)
        while norm < _FILTER_TINY:
            w = rng.standard_normal(m) + 1j * rng.standard_normal(m)
            norm = np.linalg.norm(w)
        filters.append(w / norm)
    return filters


def _receive_filter_matrix(shape, selection, filters):
    """Build the block receive filter W_e mapping antenna space to stream space."""
    offsets = np.concatenate(([0], np.cumsum(shape.rx_antennas)))
    w_e = np.zeros((selection.streams, shape.total_rx_antennas), dtype=np.complex128)
    row = 0
    for u in selection.selected:
        m = shape.rx_antennas[u]
        w_e[row : row + m, offsets[u] : offsets[u] + m] = np.eye(m)
        row += m
    for w, u in zip(filters, selection.remaining):
        m = shape.rx_antennas[u]
        w_e[row, offsets[u] : offsets[u] + m] = np.conj(w)
        row += 1
    return w_e


def iterate_flexcobf(per_user, selection, params=None, rng=None):
    """Alternate zero-forcing and matched-filter updates until the MUI dies out.

    Each pass zero-forces the full equivalent channel, re-points every
    remaining user's receive filter at its own precoded stream, and measures
    the off-diagonal energy the new filters see through the old precoder.
    Convergence is that energy falling to params.epsilon or below; runs that
    hit the iteration cap are returned with converged False.

    Either way the returned precoder is zero-forced against the final
    equivalent channel, so transmission built on the result is interference
    free even when the filters were still drifting at the cap.

    Args:
        per_user: sequence of per-user channel matrices, each M_k x M_T.
        selection: UserSelection partitioning the users.
        params: CoordinationParams; defaults apply when omitted.
        rng: numpy Generator for the initial (and any resampled) filters.

    Returns:
        CoordinationResult.  The precoder is the plain zero-forcing one; its
        beta satisfies the configured power budget.

    Raises:
        SingularIterateError: if the equivalent channel stays singular after
            one filter resample.
    """
    if params is None:
        params = CoordinationParams()
    if rng is None:
        rng = np.random.default_rng()
    per_user = [np.asarray(h, dtype=np.complex128) for h in per_user]
    m_t = per_user[0].shape[1]
    if any(h.shape[1] != m_t for h in per_user):
        raise DimensionMismatchError("per-user channels disagree on transmit antennas")
    shape = SystemShape(
        users=len(per_user),
        rx_antennas=tuple(h.shape[0] for h in per_user),
        tx_antennas=m_t,
    )
    offset = sum(shape.rx_antennas[u] for u in selection.selected)

    filters = _draw_filters(per_user, selection.remaining, rng)
    h_e = assemble_equivalent_channel(per_user, selection, filters)

    trace = []
    converged = False
    resampled = False
    iterations = 0
    f = None
    while iterations < params.max_iterations:
        try:
            f = zf_precode(h_e)
        except SingularMatrixError as exc:
            if resampled:
                raise SingularIterateError(
                    "equivalent channel singular twice despite filter resampling"
                ) from exc
            resampled = True
            filters = _draw_filters(per_user, selection.remaining, rng)
            h_e = assemble_equivalent_channel(per_user, selection, filters)
            continue
        iterations += 1
        for idx, u in enumerate(selection.remaining):
            v = per_user[u] @ f[:, offset + idx]
            norm = float(np.linalg.norm(v))
            if norm < _FILTER_TINY:
                raise SingularIterateError(f"matched filter for user {u} vanished")
            filters[idx] = v / norm
            h_e[offset + idx] = filters[idx].conj() @ per_user[u]
        mui = offdiag_frobenius_sq(h_e @ f)
        trace.append(float(mui))
        if mui <= params.epsilon:
            converged = True
            break

    try:
        f = zf_precode(h_e)
    except SingularMatrixError as exc:
        raise SingularIterateError(
            "final equivalent channel is singular"
        ) from exc
    beta = power_scale(f, params.power, params.symbol_energy)
    return CoordinationResult(
        equivalent_channel=h_e,
        receive_filter=_receive_filter_matrix(shape, selection, filters),
        precoder=Precoder(matrix=f, beta=beta),
        selection=selection,
        iterations=iterations,
        residual_mui_trace=tuple(trace),
        converged=converged,
    )


def lr_flexcobf(per_user, selection, params=None, rng=None):
    """Coordination followed by lattice reduction of the equivalent channel.

    Runs iterate_flexcobf, reduces the final equivalent channel, and replaces
    the precoder by F_tilde = F T^{-1} with beta recomputed for F_tilde.  The
    exact transform pair rides on the returned precoder for lattice-domain
    detection; equivalent_channel @ F_tilde equals T^{-1} up to zero-forcing
    accuracy.
    """
    if params is None:
        params = CoordinationParams()
    base = iterate_flexcobf(per_user, selection, params, rng)
    reduction = clll_reduce(base.equivalent_channel, params.reduction)
    f_tilde = base.precoder.matrix @ reduction.transform_inv.to_complex()
    beta = power_scale(f_tilde, params.power, params.symbol_energy)
    precoder = Precoder(
        matrix=f_tilde,
        beta=beta,
        lattice_transform=reduction.transform,
        lattice_transform_inv=reduction.transform_inv,
    )
    return CoordinationResult(
        equivalent_channel=base.equivalent_channel,
        receive_filter=base.receive_filter,
        precoder=precoder,
        selection=selection,
        iterations=base.iterations,
        residual_mui_trace=base.residual_mui_trace,
        converged=base.converged,
    )
