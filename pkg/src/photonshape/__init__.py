"""Simulation and pulse design for single photon emission from a driven
three-level emitter coupled to a lossy cavity mode."""

from .dynamics import (
    SimulationResult,
    SpectrumResult,
    WignerSlice,
    efficiency_curve,
    emission_envelope,
    phase_space_grid,
    solve_local,
    solve_volterra,
    spectrum,
    wigner_mixture,
)
from .errors import ConfigError, InversionError, NumericsError, StageError
from .inverse import (
    PulsePlan,
    RoundtripReport,
    TargetShape,
    c2_from_target,
    make_target,
    pulse_plan,
    pump_from_dynamics,
    roundtrip,
    validate_target,
)
from .model import (
    ComplexSignal,
    CouplingProfile,
    GeometryParams,
    ModelParams,
    TimeGrid,
    kernel_eval,
    vacuum_rabi,
    validate_params,
)

__version__ = "1.0.0"

__all__ = [
    "ModelParams",
    "GeometryParams",
    "TimeGrid",
    "ComplexSignal",
    "CouplingProfile",
    "kernel_eval",
    "vacuum_rabi",
    "validate_params",
    "SimulationResult",
    "SpectrumResult",
    "WignerSlice",
    "solve_local",
    "solve_volterra",
    "emission_envelope",
    "efficiency_curve",
    "spectrum",
    "wigner_mixture",
    "phase_space_grid",
    "TargetShape",
    "PulsePlan",
    "RoundtripReport",
    "make_target",
    "validate_target",
    "c2_from_target",
    "pump_from_dynamics",
    "pulse_plan",
    "roundtrip",
    "ConfigError",
    "NumericsError",
    "InversionError",
    "StageError",
    "__version__",
]
