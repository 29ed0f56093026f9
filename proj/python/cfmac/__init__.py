"""Cooperation-facilitator MAC toolkit."""

from ._cfmac import (
    ConfigError,
    DiscreteMac,
    PreconditionError,
    binary_erasure_mac,
    channel_from_json,
    codec_error,
    covering_experiment,
    cstar_margin,
    gain_curve,
    gaussian_gains,
    ldp_exponent,
    run_cli,
    sum_capacity_no_cooperation,
)

__all__ = [
    "ConfigError",
    "DiscreteMac",
    "PreconditionError",
    "binary_erasure_mac",
    "channel_from_json",
    "codec_error",
    "covering_experiment",
    "cstar_margin",
    "gain_curve",
    "gaussian_gains",
    "ldp_exponent",
    "run_cli",
    "sum_capacity_no_cooperation",
]
