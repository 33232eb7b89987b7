"""Interpretability tooling: gate sweeps and filter spectra."""

from additive_unet.analysis.spectra import (
    FilterSpectrum,
    SpectrumProfile,
    dft2,
    filter_spectra,
    kernel_profile,
    layer_centroids,
    layer_conv,
    layer_names,
    magnitude_spectrum,
    radial_average,
    radial_bins,
    spectral_centroid,
    write_centroids_csv,
    write_exemplars,
    write_profiles_csv,
)
from additive_unet.analysis.sweep import (
    SweepResult,
    sweep_all_gates,
    sweep_gate,
    sweep_values,
    write_sweep_csv,
)

__all__ = [
    # Gate sweeps
    "SweepResult",
    "sweep_gate",
    "sweep_all_gates",
    "sweep_values",
    "write_sweep_csv",
    # Spectra
    "SpectrumProfile",
    "FilterSpectrum",
    "dft2",
    "magnitude_spectrum",
    "radial_bins",
    "radial_average",
    "kernel_profile",
    "filter_spectra",
    "layer_conv",
    "layer_names",
    "spectral_centroid",
    "layer_centroids",
    "write_profiles_csv",
    "write_centroids_csv",
    "write_exemplars",
]
