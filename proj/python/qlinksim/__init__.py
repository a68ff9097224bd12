"""Simulator and design library for a frequency-converted spin-memory telecom link."""

from ._core import (  # noqa: F401
    SPEED_OF_LIGHT_NM_THZ,
    ConversionScheme,
    ConverterModel,
    DetectorModel,
    GainBand,
    PhaseMatchCurve,
    Regime,
    SourceModel,
    SpinCavityModel,
    default_gain_bands,
    downconverter_defaults,
    external_efficiency,
    feasible_pumps,
    frequency_thz,
    hbt_g2_run,
    noise_rate_hz,
    noise_spectral_density,
    optimal_pump_power_mw,
    phase_match_transfer,
    plan_single_pump,
    plan_two_pump,
    readout_error_analytic,
    sequence_fidelity,
    transfer_fidelity,
    transfer_fidelity_analytic,
    upconverter_defaults,
    wavelength_nm,
)

__all__ = [name for name in dir() if not name.startswith("_")]
