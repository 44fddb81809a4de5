"""Monte-Carlo sweep harness: per-point trial loops, aggregation, and output.

Determinism contract: every trial draws its randomness from substreams keyed
by (seed, point index, trial index, purpose), trials are aggregated with
exact integer counters and order-insensitive exact float summation, and CSV
floats are printed with 12 significant digits.  Reruns with any worker count
therefore produce byte-identical output.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .coordination import (
    CoordinationParams,
    CoordinationResult,
    SystemShape,
    UserSelection,
    iterate_flexcobf,
    lr_flexcobf,
    select_users,
)
from .errors import ConfigurationError, InfeasibleError, MimoSimError
from .lattice import ReductionParams
from .phy import (
    QPSK_BITS_PER_SYMBOL,
    QPSK_SYMBOL_ENERGY,
    add_awgn,
    ebn0_to_sigma2,
    generate_channel,
    lattice_detect,
    linear_detect,
    qpsk_modulate,
)
from .precoding import Precoder, power_scale, zf_precode

ALGORITHMS = ("zf", "flexcobf", "lr-flexcobf")

CSV_COLUMNS = (
    "ebn0_db",
    "algorithm",
    "K",
    "M_k",
    "M_T",
    "loading_coefficient",
    "trials",
    "bit_errors",
    "ber",
    "sum_rate_bps_hz",
    "converged_fraction",
    "mean_iterations",
    "seed",
)

# Trials per aggregation chunk.  Fixed (never derived from the worker count)
# so that float aggregation groups identically for any parallelism.
CHUNK_TRIALS = 256

# Substream purposes, one independent generator per concern so that algorithm
# choice never shifts the bit or noise draws of a trial.
_PURPOSE_CHANNEL = 0
_PURPOSE_SELECTION = 1
_PURPOSE_FILTERS = 2
_PURPOSE_BITS = 3
_PURPOSE_NOISE = 4


class TrialFailureError(MimoSimError):
    """A single trial failed numerically; carries everything needed to replay it."""

    def __init__(self, point_index, trial_index, seed, reason):
        super().__init__(
            f"trial {trial_index} at grid point {point_index} failed "
            f"(replay: seed={seed}, spawn_key=({point_index}, {trial_index})): {reason}"
        )
        self.point_index = point_index
        self.trial_index = trial_index
        self.seed = seed
        self.reason = reason

    def __reduce__(self):
        return (TrialFailureError, (self.point_index, self.trial_index, self.seed, self.reason))


@dataclass(frozen=True)
class SimConfig:
    """One sweep: system shape, algorithm, Eb/N0 grid, and trial accounting.

    Exactly one of tx_antennas and loading must be given; loading resolves to
    tx_antennas = round(M_R / loading).
    """

    users: int
    rx_per_user: int
    ebn0_grid_db: tuple
    tx_antennas: int | None = None
    loading: float | None = None
    algorithm: str = "flexcobf"
    trials: int = 1000
    seed: int = 0
    epsilon: float = 1e-5
    max_iterations: int = 20
    delta: float = 0.75
    workers: int = 1
    power: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "ebn0_grid_db", tuple(float(e) for e in self.ebn0_grid_db))
        if self.users < 1:
            raise ConfigurationError(f"users must be >= 1, got {self.users}")
        if self.rx_per_user < 1:
            raise ConfigurationError(f"rx antennas per user must be >= 1, got {self.rx_per_user}")
        if (self.tx_antennas is None) == (self.loading is None):
            raise ConfigurationError("give exactly one of tx_antennas and loading")
        if self.loading is not None and not self.loading > 0:
            raise ConfigurationError(f"loading must be positive, got {self.loading}")
        if self.algorithm not in ALGORITHMS:
            raise ConfigurationError(
                f"unknown algorithm {self.algorithm!r}, expected one of {ALGORITHMS}"
            )
        if not self.ebn0_grid_db:
            raise ConfigurationError("Eb/N0 grid must be non-empty")
        if any(b <= a for a, b in zip(self.ebn0_grid_db, self.ebn0_grid_db[1:])):
            raise ConfigurationError("Eb/N0 grid must be strictly increasing")
        if any(math.isnan(e) for e in self.ebn0_grid_db):
            raise ConfigurationError("Eb/N0 grid contains NaN")
        if self.trials < 1:
            raise ConfigurationError(f"trials must be >= 1, got {self.trials}")
        if self.seed < 0:
            raise ConfigurationError(f"seed must be >= 0, got {self.seed}")
        if self.epsilon <= 0:
            raise ConfigurationError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_iterations < 1:
            raise ConfigurationError(f"max iterations must be >= 1, got {self.max_iterations}")
        if not 0.5 < self.delta <= 1.0:
            raise ConfigurationError(f"delta must lie in (1/2, 1], got {self.delta}")
        if self.workers < 1:
            raise ConfigurationError(f"workers must be >= 1, got {self.workers}")
        if self.power <= 0:
            raise ConfigurationError(f"power must be positive, got {self.power}")
        resolved = self.resolved_tx_antennas
        if resolved < self.users:
            raise ConfigurationError(
                f"{resolved} transmit antennas cannot serve {self.users} users"
            )
        if self.algorithm == "zf" and self.total_rx_antennas > resolved:
            raise ConfigurationError(
                "zf needs at least as many transmit as receive antennas; "
                f"got M_T={resolved} < M_R={self.total_rx_antennas}"
            )

    @property
    def total_rx_antennas(self):
        return self.users * self.rx_per_user

    @property
    def resolved_tx_antennas(self):
        if self.tx_antennas is not None:
            return int(self.tx_antennas)
        return int(math.floor(self.total_rx_antennas / self.loading + 0.5))

    @property
    def loading_coefficient(self):
        return self.total_rx_antennas / self.resolved_tx_antennas

    @property
    def streams_per_trial(self):
        m_t = self.resolved_tx_antennas
        full = min(max(m_t - self.users, 0), self.users)
        if self.algorithm == "zf":
            return self.total_rx_antennas
        return full * self.rx_per_user + (self.users - full)

    def system_shape(self):
        try:
            return SystemShape.uniform(self.users, self.rx_per_user, self.resolved_tx_antennas)
        except InfeasibleError as exc:
            raise ConfigurationError(str(exc)) from exc

    def coordination_params(self):
        return CoordinationParams(
            epsilon=self.epsilon,
            max_iterations=self.max_iterations,
            reduction=ReductionParams(delta=self.delta),
            power=self.power,
            symbol_energy=QPSK_SYMBOL_ENERGY,
        )


@dataclass(frozen=True)
class PointResult:
    """Aggregates for one Eb/N0 grid point; mirrors one CSV row."""

    ebn0_db: float
    algorithm: str
    users: int
    rx_per_user: int
    tx_antennas: int
    loading_coefficient: float
    trials: int
    bit_errors: int
    ber: float
    sum_rate_bps_hz: float
    converged_fraction: float
    mean_iterations: float
    seed: int


@dataclass(frozen=True)
class SimResult:
    """A finished sweep: the configuration and one PointResult per grid point."""

    config: SimConfig
    points: tuple


def sum_rate(coordination, beta, sigma2):
    """Instantaneous per-realization sum rate in bits/s/Hz.

    Stream i sees signal power beta^2 |g_ii|^2 and interference
    beta^2 sum_{m != i} |g_im|^2 through the linear-domain gain matrix
    G = H_e F, plus noise sigma2 times the squared norm of its receive filter
    row.  The rate is sum_i log2(1 + SINR_i).
    """
    precoder = coordination.precoder
    if precoder.lattice_transform is None:
        f_linear = precoder.matrix
    else:
        f_linear = precoder.matrix @ precoder.lattice_transform.to_complex()
    g = coordination.equivalent_channel @ f_linear
    signal = (beta**2) * np.abs(np.diagonal(g)) ** 2
    interference = np.maximum((beta**2) * np.sum(np.abs(g) ** 2, axis=1) - signal, 0.0)
    noise = sigma2 * np.sum(np.abs(coordination.receive_filter) ** 2, axis=1)
    denom = interference + noise
    sinr = np.where(denom > 0, signal / np.where(denom > 0, denom, 1.0), np.where(signal > 0, np.inf, 0.0))
    return float(np.sum(np.log2(1.0 + sinr)))


def _purpose_rng(seed, point_index, trial_index, purpose):
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(point_index, trial_index, purpose))
    )


def _zf_coordination(channels, config):
    h = channels.stacked
    f = zf_precode(h)
    beta = power_scale(f, config.power, QPSK_SYMBOL_ENERGY)
    streams = h.shape[0]
    return CoordinationResult(
        equivalent_channel=h,
        receive_filter=np.eye(streams, dtype=np.complex128),
        precoder=Precoder(matrix=f, beta=beta),
        selection=UserSelection(tuple(range(config.users)), (), streams),
        iterations=0,
        residual_mui_trace=(),
        converged=True,
    )


def _simulate_trial(config, shape, params, sigma2, point_index, trial_index):
    """One channel realization end to end; returns (errors, rate, converged, iters)."""
    channels = generate_channel(shape, _purpose_rng(config.seed, point_index, trial_index, _PURPOSE_CHANNEL))
    if config.algorithm == "zf":
        coord = _zf_coordination(channels, config)
    else:
        selection = select_users(
            shape, _purpose_rng(config.seed, point_index, trial_index, _PURPOSE_SELECTION)
        )
        solver = iterate_flexcobf if config.algorithm == "flexcobf" else lr_flexcobf
        coord = solver(
            channels.per_user,
            selection,
            params,
            _purpose_rng(config.seed, point_index, trial_index, _PURPOSE_FILTERS),
        )
    beta = coord.precoder.beta
    streams = coord.equivalent_channel.shape[0]
    bits = _purpose_rng(config.seed, point_index, trial_index, _PURPOSE_BITS).integers(
        0, 2, size=QPSK_BITS_PER_SYMBOL * streams
    )
    symbols = qpsk_modulate(bits)
    transmitted = channels.stacked @ (beta * (coord.precoder.matrix @ symbols))
    received = add_awgn(
        transmitted, sigma2, _purpose_rng(config.seed, point_index, trial_index, _PURPOSE_NOISE)
    )
    filtered = coord.receive_filter @ received
    if config.algorithm == "lr-flexcobf":
        detected = lattice_detect(
            filtered,
            beta,
            coord.precoder.lattice_transform,
            coord.precoder.lattice_transform_inv,
        )
    else:
        detected = linear_detect(filtered, beta)
    errors = int(np.count_nonzero(detected != bits))
    rate = sum_rate(coord, beta, sigma2)
    return errors, rate, coord.converged, coord.iterations


def _run_chunk(args):
    """Run trials [start, stop) of one grid point; returns partial aggregates."""
    config, sigma2, point_index, start, stop = args
    shape = config.system_shape()
    params = config.coordination_params()
    errors = 0
    converged = 0
    iteration_sum = 0
    rates = []
    for trial in range(start, stop):
        try:
            e, rate, conv, iters = _simulate_trial(config, shape, params, sigma2, point_index, trial)
        except MimoSimError as exc:
            raise TrialFailureError(point_index, trial, config.seed, str(exc)) from exc
        errors += e
        rates.append(rate)
        converged += bool(conv)
        iteration_sum += iters
    return errors, converged, iteration_sum, rates


def run_point(config, ebn0_db, point_index=None, executor=None):
    """Simulate one grid point.

    point_index defaults to the position of ebn0_db in the config grid; it
    keys the rng substreams, so passing an explicit index allows off-grid
    probes without colliding with grid points.
    """
    if point_index is None:
        grid = config.ebn0_grid_db
        point_index = grid.index(float(ebn0_db)) if float(ebn0_db) in grid else 0
    sigma2 = ebn0_to_sigma2(
        ebn0_db,
        config.total_rx_antennas,
        config.resolved_tx_antennas,
        QPSK_BITS_PER_SYMBOL,
        config.power,
    )
    spans = [
        (start, min(start + CHUNK_TRIALS, config.trials))
        for start in range(0, config.trials, CHUNK_TRIALS)
    ]
    tasks = [(config, sigma2, point_index, start, stop) for start, stop in spans]
    if executor is None and config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            partials = list(pool.map(_run_chunk, tasks))
    elif executor is not None:
        partials = list(executor.map(_run_chunk, tasks))
    else:
        partials = [_run_chunk(task) for task in tasks]

    bit_errors = sum(p[0] for p in partials)
    converged = sum(p[1] for p in partials)
    iteration_sum = sum(p[2] for p in partials)
    rates = [r for p in partials for r in p[3]]
    bits_total = config.trials * config.streams_per_trial * QPSK_BITS_PER_SYMBOL
    return PointResult(
        ebn0_db=float(ebn0_db),
        algorithm=config.algorithm,
        users=config.users,
        rx_per_user=config.rx_per_user,
        tx_antennas=config.resolved_tx_antennas,
        loading_coefficient=config.loading_coefficient,
        trials=config.trials,
        bit_errors=int(bit_errors),
        ber=bit_errors / bits_total,
        sum_rate_bps_hz=math.fsum(rates) / config.trials,
        converged_fraction=converged / config.trials,
        mean_iterations=iteration_sum / config.trials,
        seed=config.seed,
    )


def run_sweep(config):
    """Simulate every grid point of the configuration."""
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            points = tuple(
                run_point(config, ebn0, index, executor=pool)
                for index, ebn0 in enumerate(config.ebn0_grid_db)
            )
    else:
        points = tuple(
            run_point(config, ebn0, index) for index, ebn0 in enumerate(config.ebn0_grid_db)
        )
    return SimResult(config=config, points=points)


def _format_value(value):
    if isinstance(value, float):
        return "%.12g" % value
    return str(value)


def _point_row(point):
    return (
        point.ebn0_db,
        point.algorithm,
        point.users,
        point.rx_per_user,
        point.tx_antennas,
        point.loading_coefficient,
        point.trials,
        point.bit_errors,
        point.ber,
        point.sum_rate_bps_hz,
        point.converged_fraction,
        point.mean_iterations,
        point.seed,
    )


def render_csv(result):
    """Render a sweep as CSV text with 12-significant-digit floats."""
    lines = [",".join(CSV_COLUMNS)]
    for point in result.points:
        lines.append(",".join(_format_value(v) for v in _point_row(point)))
    return "\n".join(lines) + "\n"


def write_csv(result, path):
    text = render_csv(result)
    if hasattr(path, "write"):
        path.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _config_dict(config):
    return {
        "users": config.users,
        "rx_per_user": config.rx_per_user,
        "tx_antennas": config.resolved_tx_antennas,
        "loading_coefficient": config.loading_coefficient,
        "algorithm": config.algorithm,
        "ebn0_grid_db": list(config.ebn0_grid_db),
        "trials": config.trials,
        "seed": config.seed,
        "epsilon": config.epsilon,
        "max_iterations": config.max_iterations,
        "delta": config.delta,
        "workers": config.workers,
        "power": config.power,
    }


def render_json(result):
    """Render a sweep as JSON: a config header plus one object per grid point."""
    payload = {
        "config": _config_dict(result.config),
        "points": [dict(zip(CSV_COLUMNS, _point_row(p))) for p in result.points],
    }
    return json.dumps(payload, indent=2) + "\n"


def write_json(result, path):
    text = render_json(result)
    if hasattr(path, "write"):
        path.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)
