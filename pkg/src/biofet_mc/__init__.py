"""Analytical link model of a microfluidic molecular communication channel
with a silicon-nanowire bioFET receiver, plus numerical oracles and a CLI."""

from .binding import (
    BindingStats,
    ReceiverGeometry,
    binding_noise_psd,
    check_equilibrium,
    correlation_time,
    equilibrium_stats,
    transport_rate,
)
from .config import SystemConfig, load_config, parse_config
from .detection import (
    Constellation,
    DecisionModel,
    build_constellation,
    decision_thresholds,
    end_to_end_sep,
    log10_symbol_error_probability,
    symbol_error_probability,
)
from .errors import (
    BiasRegionError,
    ConfigError,
    EquilibriumError,
    InsufficientTrialsError,
    InvalidParameterError,
    ModelError,
    OracleFailure,
    ThresholdOrderingError,
)
from .fet_output import FetBias, LinkModel, SymbolLink, output_variance, snr_db, transconductance
from .sweep import SweepSpec, Table, emit, read_table, run_sweep
from .transducer import MediumSpec, TransducerSpec, capacitances, debye_length, effective_charge
from .transport import (
    ChannelSpec,
    LigandSpec,
    concentration,
    effective_diffusion,
    passage_duration,
    propagation_delay,
    received_concentration,
)

__version__ = "0.1.0"

__all__ = [
    "BindingStats",
    "ReceiverGeometry",
    "binding_noise_psd",
    "check_equilibrium",
    "correlation_time",
    "equilibrium_stats",
    "transport_rate",
    "Constellation",
    "DecisionModel",
    "build_constellation",
    "decision_thresholds",
    "end_to_end_sep",
    "log10_symbol_error_probability",
    "symbol_error_probability",
    "BiasRegionError",
    "ConfigError",
    "EquilibriumError",
    "InsufficientTrialsError",
    "InvalidParameterError",
    "ModelError",
    "OracleFailure",
    "ThresholdOrderingError",
    "ChannelSpec",
    "LigandSpec",
    "concentration",
    "effective_diffusion",
    "passage_duration",
    "propagation_delay",
    "received_concentration",
    "SystemConfig",
    "load_config",
    "parse_config",
    "FetBias",
    "LinkModel",
    "SymbolLink",
    "output_variance",
    "snr_db",
    "transconductance",
    "SweepSpec",
    "Table",
    "emit",
    "read_table",
    "run_sweep",
    "MediumSpec",
    "TransducerSpec",
    "capacitances",
    "debye_length",
    "effective_charge",
]
