"""Symbolic and numerical quantization of group actions."""

from ._core import (
    BasisSpanError,
    ConfigError,
    Expr,
    NotMaurerCartan,
    NumericError,
    ParseError,
    builtin_actions,
    check_action,
    cohomology_dims,
    exp_system_is_mc,
    gaussian,
    kn_apply,
    parse,
    phase_is_cocycle,
    run_config,
    task_names,
)

__all__ = [
    "BasisSpanError",
    "ConfigError",
    "Expr",
    "NotMaurerCartan",
    "NumericError",
    "ParseError",
    "builtin_actions",
    "check_action",
    "cohomology_dims",
    "exp_system_is_mc",
    "gaussian",
    "kn_apply",
    "parse",
    "phase_is_cocycle",
    "run_config",
    "task_names",
]
