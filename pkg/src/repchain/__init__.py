"""Analytic and simulated performance of teleportation over a metro/backbone repeater chain."""

from .errors import (
    ConfigError,
    DegenerateLog,
    DivergentSeries,
    EmptyCutoffDomain,
    Infeasible,
    NonIntegerSlot,
    OutOfRange,
    RepchainError,
    UnknownPreset,
)
from .intercity import IntercityPoint, IntercityScenario, evaluate
from .metro import MetroScenario, metro_fidelity, metro_rate
from .params import (
    BASELINE_HW,
    DEFAULT_GEOMETRY,
    OPTIMISTIC_HW,
    Geometry,
    HardwareParams,
    ParamKind,
    derive_timing,
    load_preset,
)

__all__ = [
    "BASELINE_HW",
    "DEFAULT_GEOMETRY",
    "OPTIMISTIC_HW",
    "ConfigError",
    "DegenerateLog",
    "DivergentSeries",
    "EmptyCutoffDomain",
    "Geometry",
    "HardwareParams",
    "Infeasible",
    "IntercityPoint",
    "IntercityScenario",
    "MetroScenario",
    "NonIntegerSlot",
    "OutOfRange",
    "ParamKind",
    "RepchainError",
    "UnknownPreset",
    "derive_timing",
    "evaluate",
    "load_preset",
    "metro_fidelity",
    "metro_rate",
]
