"""Asynchronous multi-task learning: solver core and experiment engines."""

from amtl._core import (
    ArgumentError,
    ConfigError,
    DimensionError,
    Error,
    IoError,
    NumericalError,
    Problem,
    RunResult,
    StalenessError,
    UpdateEvent,
    dynamic_multiplier,
    gen_synthetic,
    km_step_size,
    lipschitz_bound,
    load_problem,
    nuclear_norm,
    prox_l21,
    prox_nuclear,
    run,
    thin_svd,
)

__all__ = [
    "ArgumentError",
    "ConfigError",
    "DimensionError",
    "Error",
    "IoError",
    "NumericalError",
    "Problem",
    "RunResult",
    "StalenessError",
    "UpdateEvent",
    "dynamic_multiplier",
    "gen_synthetic",
    "km_step_size",
    "lipschitz_bound",
    "load_problem",
    "nuclear_norm",
    "prox_l21",
    "prox_nuclear",
    "run",
    "thin_svd",
]

__version__ = "0.1.0"
