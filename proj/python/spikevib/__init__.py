"""Spike-based vibration anomaly detection.

Gammatone filterbank, adaptive delta modulator and a balanced network of
leaky integrate-and-fire neurons, bound from the C++ library.
"""

from ._spikevib import (
    Error,
    PipelineConfig,
    center_frequencies,
    channel_magnitude,
    detection_datapoint,
    encode,
    filterbank,
    gammatone,
    regenerate_poisson,
    simulate,
    synth,
    tune,
)

__all__ = [
    "Error",
    "PipelineConfig",
    "center_frequencies",
    "channel_magnitude",
    "detection_datapoint",
    "encode",
    "filterbank",
    "gammatone",
    "regenerate_poisson",
    "simulate",
    "synth",
    "tune",
]

__version__ = "0.1.0"
