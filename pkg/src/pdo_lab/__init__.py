"""Pseudo-density operators for two-time qubit correlations, formal teleportation
in time, and chained CHSH inequalities in space, time and hybrid arrangements."""

from .chsh import (
    ChainConfig,
    ChainMode,
    CurvePoint,
    MeasurementSetting,
    chain_value,
    classical_bound,
    classical_max_bruteforce,
    default_settings,
    observable,
    optimize_settings,
    spatial_corr,
    temporal_corr,
    theory_curve,
)
from .experiment import CorrelationEstimate, RngSpec, ShotBatch, estimate_chain, sample_spatial, sample_temporal
from .operators import (
    DEFAULT_TOL,
    BlochVector,
    PauliLabel,
    Tolerances,
    bloch_to_density,
    density_to_bloch,
    eig_hermitian,
    partial_trace,
    pauli_string_matrix,
)
from .pdo import (
    ChannelParams,
    PseudoDensityOperator,
    QubitChannel,
    channel_pdo,
    hs_inner,
    negativity,
    pdo_from_coefficients,
    temporal_bell,
    two_time_pdo,
)
from .teleport import (
    TeleportOutcome,
    choi_psd,
    correction_unitary,
    cp_constraint,
    teleport,
    teleport_chain,
    teleport_channel,
)

__version__ = "0.1.0"
