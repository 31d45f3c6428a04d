"""Empirical best linear prediction for low-rank signals observed through linear transforms."""

from ._core import (
    DegenerateCoordinateError,
    DomainError,
    Error,
    Model,
    NumericError,
    ParseError,
    RankError,
    ShapeError,
    SpikeEstimate,
    StateError,
    empirical_stieltjes,
    estimate_spikes,
    fit,
    mp_upper_edge,
    mp_white_stieltjes,
    nnrls,
    nnrls_weight_white,
    predict,
    rmse,
    run_benchmark,
    shrink,
    simulate,
    white_spike_forward,
    white_spike_inverse,
)

__all__ = [
    "DegenerateCoordinateError",
    "DomainError",
    "Error",
    "Model",
    "NumericError",
    "ParseError",
    "RankError",
    "ShapeError",
    "SpikeEstimate",
    "StateError",
    "empirical_stieltjes",
    "estimate_spikes",
    "fit",
    "mp_upper_edge",
    "mp_white_stieltjes",
    "nnrls",
    "nnrls_weight_white",
    "predict",
    "rmse",
    "run_benchmark",
    "shrink",
    "simulate",
    "white_spike_forward",
    "white_spike_inverse",
]
