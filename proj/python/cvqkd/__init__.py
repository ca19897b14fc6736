"""Four-state CV-QKD key-rate toolkit (C++ core)."""

from ._core import (
    __version__,
    backout_detector_noise,
    correlation_z,
    empirical_mutual_information,
    entropy_g,
    estimate_channel,
    key_rate,
    optimal_modulation,
    sinc_coefficients,
    symbol_level_run,
    waveform_level_run,
    xi_closed_form,
    xi_series_oracle,
    z_epr,
)

__all__ = [
    "__version__",
    "backout_detector_noise",
    "correlation_z",
    "empirical_mutual_information",
    "entropy_g",
    "estimate_channel",
    "key_rate",
    "optimal_modulation",
    "sinc_coefficients",
    "symbol_level_run",
    "waveform_level_run",
    "xi_closed_form",
    "xi_series_oracle",
    "z_epr",
]
