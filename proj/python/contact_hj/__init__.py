"""Solvers for the generalized ergodic problem of contact Hamilton-Jacobi
equations on flat tori: solution semigroups, implicit action functions,
membership classification, endpoint estimates and contact characteristics."""

from ._core import (
    CharacteristicState,
    ChjError,
    GridFunction,
    HamiltonianModel,
    SemigroupConfig,
    TorusGrid,
    build_model,
    classify,
    estimate_interval,
    evolve,
    flow,
    forward_action,
    h_decay_check,
    legendre,
    maxmin_cr,
    minmax_cl,
    step_backward,
    step_forward,
)

__all__ = [
    "CharacteristicState",
    "ChjError",
    "GridFunction",
    "HamiltonianModel",
    "SemigroupConfig",
    "TorusGrid",
    "build_model",
    "classify",
    "estimate_interval",
    "evolve",
    "flow",
    "forward_action",
    "h_decay_check",
    "legendre",
    "maxmin_cr",
    "minmax_cl",
    "step_backward",
    "step_forward",
]

__version__ = "0.1.0"
