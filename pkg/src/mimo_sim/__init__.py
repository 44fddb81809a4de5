"""Lattice-reduction-aided coordinated beamforming simulator for MU-MIMO downlinks."""

from .coordination import (
    CoordinationParams,
    CoordinationResult,
    SystemShape,
    UserSelection,
    assemble_equivalent_channel,
    iterate_flexcobf,
    lr_flexcobf,
    residual_mui,
    select_users,
)
from .errors import (
    ConfigurationError,
    DegenerateInputError,
    DimensionMismatchError,
    DimensionalityViolationError,
    InfeasibleError,
    MimoSimError,
    NonTerminatingError,
    NotUnimodularError,
    RankDeficientError,
    SingularIterateError,
    SingularMatrixError,
)
from .lattice import (
    LatticeReductionResult,
    ReductionParams,
    clll_reduce,
    is_clll_reduced,
    is_unimodular,
    orthogonality_defect,
)
from .linalg import (
    GaussianIntegerMatrix,
    invert_unimodular,
    offdiag_frobenius_sq,
    qr_decompose,
    right_pseudo_inverse,
    round_to_gaussian_integer,
)
from .phy import (
    QPSK_BITS_PER_SYMBOL,
    QPSK_SYMBOL_ENERGY,
    ChannelSet,
    add_awgn,
    ebn0_to_sigma2,
    generate_channel,
    lattice_detect,
    linear_detect,
    qpsk_demodulate,
    qpsk_modulate,
)
from .precoding import Precoder, lr_zf_precode, power_scale, zf_precode
from .simulate import (
    ALGORITHMS,
    CSV_COLUMNS,
    PointResult,
    SimConfig,
    SimResult,
    TrialFailureError,
    render_csv,
    render_json,
    run_point,
    run_sweep,
    sum_rate,
    write_csv,
    write_json,
)

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "CSV_COLUMNS",
    "ChannelSet",
    "ConfigurationError",
    "CoordinationParams",
    "CoordinationResult",
    "DegenerateInputError",
    "DimensionMismatchError",
    "DimensionalityViolationError",
    "GaussianIntegerMatrix",
    "InfeasibleError",
    "LatticeReductionResult",
    "MimoSimError",
    "NonTerminatingError",
    "NotUnimodularError",
    "PointResult",
    "Precoder",
    "QPSK_BITS_PER_SYMBOL",
    "QPSK_SYMBOL_ENERGY",
    "RankDeficientError",
    "ReductionParams",
    "SimConfig",
    "SimResult",
    "SingularIterateError",
    "SingularMatrixError",
    "SystemShape",
    "TrialFailureError",
    "UserSelection",
    "add_awgn",
    "assemble_equivalent_channel",
    "clll_reduce",
    "ebn0_to_sigma2",
    "generate_channel",
    "invert_unimodular",
    "is_clll_reduced",
    "is_unimodular",
    "iterate_flexcobf",
    "lattice_detect",
    "linear_detect",
    "lr_flexcobf",
    "lr_zf_precode",
    "offdiag_frobenius_sq",
    "orthogonality_defect",
    "power_scale",
    "qpsk_demodulate",
    "qpsk_modulate",
    "qr_decompose",
    "render_csv",
    "render_json",
    "residual_mui",
    "right_pseudo_inverse",
    "round_to_gaussian_integer",
    "run_point",
    "run_sweep",
    "select_users",
    "sum_rate",
    "write_csv",
    "write_json",
    "zf_precode",
]
