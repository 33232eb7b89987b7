"""Frequency analysis of convolution filters."""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from additive_unet.data import GrayImage, save_image
from additive_unet.model import AdditiveUNetParams, BlockWeights, ConvWeights, ModelParams

DEFAULT_PAD = 64
DEFAULT_TOP_K = 6


@dataclass
class FilterSpectrum:
    filter_id: str
    magnitude: np.ndarray
    energy: float


@dataclass
class SpectrumProfile:
    """
    Radial frequency profile of one layer's filters.

    `frequencies[r]` is r / pad_to cycles per pixel for integer radius r;
    corner entries beyond radius pad_to / 2 fall into the last bin, so the bins
    span [0, 0.5] and `counts` sums to pad_to**2.
    """

    layer: str
    pad_to: int
    frequencies: list[float]
    magnitudes: list[float]
    counts: list[int]
    topk: list[FilterSpectrum] = field(default_factory=list)
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def radial_bins(self) -> list[tuple[float, float]]:
        return list(zip(self.frequencies, self.magnitudes))


def dft2(array: np.ndarray) -> np.ndarray:
    """2-D discrete Fourier transform, X[u,v] = sum x[m,n] e^{-2 pi i (um/M + vn/N)}."""
    return np.fft.fft2(array)


def magnitude_spectrum(kernel: np.ndarray, pad_to: int) -> np.ndarray:
    """|DFT| of `kernel` zero-padded to pad_to x pad_to, DC moved to the center."""
    kernel = np.asarray(kernel, dtype=np.float64)
    if kernel.ndim != 2 or max(kernel.shape) > pad_to:
        raise ValueError(f"cannot pad kernel of shape {kernel.shape} to {pad_to}")
    padded = np.zeros((pad_to, pad_to))
    padded[: kernel.shape[0], : kernel.shape[1]] = kernel
    return np.abs(np.fft.fftshift(dft2(padded)))


def radial_bins(pad_to: int) -> np.ndarray:
    """Integer radius of every entry of a centered pad_to x pad_to spectrum."""
    center = pad_to // 2
    rows, cols = np.mgrid[0:pad_to, 0:pad_to]
    radius = np.rint(np.hypot(rows - center, cols - center)).astype(int)
    return np.minimum(radius, pad_to // 2)


def radial_average(spectrum: np.ndarray) -> tuple[list[float], list[float], list[int]]:
    pad_to = spectrum.shape[0]
    bins = radial_bins(pad_to)
    counts = np.bincount(bins.ravel(), minlength=pad_to // 2 + 1)
    sums = np.bincount(bins.ravel(), weights=spectrum.ravel(), minlength=pad_to // 2 + 1)
    means = sums / np.maximum(counts, 1)
    frequencies = [r / pad_to for r in range(len(counts))]
    return frequencies, [float(m) for m in means], [int(c) for c in counts]


def kernel_profile(kernel: np.ndarray, pad_to: int = DEFAULT_PAD, layer: str = "kernel") -> SpectrumProfile:
    """Radial profile of a single 2-D kernel."""
    spectrum = magnitude_spectrum(kernel, pad_to)
    frequencies, magnitudes, counts = radial_average(spectrum)
    return SpectrumProfile(
        layer=layer,
        pad_to=pad_to,
        frequencies=frequencies,
        magnitudes=magnitudes,
        counts=counts,
        topk=[FilterSpectrum("0", spectrum, float(np.sum(spectrum**2)))],
    )


def layer_names(params: ModelParams) -> list[str]:
    if isinstance(params, AdditiveUNetParams):
        return (
            ["stem"]
            + [f"enc.{i}" for i in range(len(params.enc_blocks))]
            + [f"dec.{j}" for j in range(len(params.dec_blocks))]
            + ["head"]
        )
    return [f"layer.{i}" for i in range(len(params.layers))]


def layer_conv(params: ModelParams, layer: int | str, conv: str = "first") -> tuple[str, ConvWeights]:
    """
    Resolve a layer reference to its convolution.

    Integers select encoder blocks (DnCNN layers for DnCNN); strings are
    ``stem``, ``enc.<i>``, ``dec.<j>``, ``head`` or ``layer.<i>``. For blocks
    `conv` picks the ``first`` or ``second`` convolution.

    Raises:
        ValueError: If the reference names nothing with convolution weights.
    """
    if isinstance(layer, int) or (isinstance(layer, str) and layer.isdigit()):
        index = int(layer)
        layer = f"enc.{index}" if isinstance(params, AdditiveUNetParams) else f"layer.{index}"
    if layer not in layer_names(params):
        raise ValueError(
            f"layer {layer!r} has no convolution weights (choose from {', '.join(layer_names(params))})"
        )

    if isinstance(params, AdditiveUNetParams):
        if layer == "stem":
            return layer, params.stem
        if layer == "head":
            return layer, params.head
        group, index = layer.split(".")
        block: BlockWeights = (params.enc_blocks if group == "enc" else params.dec_blocks)[int(index)]
        if conv not in ("first", "second"):
            raise ValueError(f"conv must be 'first' or 'second', got {conv!r}")
        return f"{layer}.{conv}", getattr(block, conv)
    return layer, params.layers[int(layer.split(".")[1])]


def filter_spectra(
    params: ModelParams,
    layer: int | str,
    pad_to: int = DEFAULT_PAD,
    top_k: int = DEFAULT_TOP_K,
    per_channel: bool = False,
    conv: str = "first",
) -> SpectrumProfile:
    """
    Magnitude spectra of a layer's filters and their radial profile.

    Each output-channel filter is summed over input channels (or, with
    `per_channel`, every (output, input) slice is kept), zero-padded to
    pad_to x pad_to and transformed. The radial profile averages all filters;
    the `top_k` filters with the largest spectral energy keep their full
    spectra.

    Raises:
        ValueError: If the layer has no convolution or pad_to is smaller than
            four times the kernel size.
    """
    name, weights = layer_conv(params, layer, conv)
    w = weights.weight.data
    k = w.shape[2]
    if pad_to < 4 * k:
        raise ValueError(f"pad_to must be >= {4 * k} for {k}x{k} kernels, got {pad_to}")

    if per_channel:
        filters = w.reshape(-1, k, k)
        ids = [f"{o}.{c}" for o in range(w.shape[0]) for c in range(w.shape[1])]
    else:
        filters = w.sum(axis=1)
        ids = [str(o) for o in range(w.shape[0])]

    spectra = [magnitude_spectrum(f, pad_to) for f in filters]
    mean_spectrum = np.mean(spectra, axis=0)
    frequencies, magnitudes, counts = radial_average(mean_spectrum)

    exemplars = [
        FilterSpectrum(filter_id=fid, magnitude=s, energy=float(np.sum(s**2)))
        for fid, s in zip(ids, spectra)
    ]
    # stable sort keeps channel order among equal energies
    exemplars.sort(key=lambda e: -e.energy)

    return SpectrumProfile(
        layer=name,
        pad_to=pad_to,
        frequencies=frequencies,
        magnitudes=magnitudes,
        counts=counts,
        topk=exemplars[:top_k],
        metadata={
            "layer": name,
            "kernel_size": k,
            "pad_to": pad_to,
            "channel_reduction": "per_channel" if per_channel else "sum_over_inputs",
            "padding": "zero, kernel at top-left",
            "radial_binning": "rounded radius, corners folded into radius pad_to/2",
            "topk_criterion": "total spectral energy",
            "exemplar_normalization": "log1p magnitude scaled to [0, 255]",
        },
    )


def spectral_centroid(profile: SpectrumProfile) -> float:
    """
    Magnitude-weighted mean radial frequency, weighting each annulus by its
    total magnitude (mean magnitude times population).

    Raises:
        ValueError: If the profile carries no magnitude at all.
    """
    weights = np.asarray(profile.magnitudes) * np.asarray(profile.counts)
    total = float(weights.sum())
    if total <= 0.0:
        raise ValueError(f"profile of {profile.layer} is all zero")
    return float(np.dot(profile.frequencies, weights) / total)


def layer_centroids(
    params: AdditiveUNetParams, pad_to: int = DEFAULT_PAD, conv: str = "first"
) -> list[tuple[str, float]]:
    """Spectral centroid of every encoder block, shallow to deep."""
    out = []
    for i in range(len(params.enc_blocks)):
        profile = filter_spectra(params, i, pad_to=pad_to, top_k=0, conv=conv)
        out.append((profile.layer, spectral_centroid(profile)))
    return out


def write_profiles_csv(profiles: list[SpectrumProfile], path: str) -> str:
    """Columns: layer, frequency, magnitude, count."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["layer", "frequency", "magnitude", "count"])
        for profile in profiles:
            for freq, mag, count in zip(profile.frequencies, profile.magnitudes, profile.counts):
                writer.writerow([profile.layer, f"{freq:.6f}", repr(mag), count])
    return path


def write_centroids_csv(centroids: list[tuple[str, float]], path: str) -> str:
    """Columns: layer, centroid; shallow to deep."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["layer", "centroid"])
        for layer, centroid in centroids:
            writer.writerow([layer, f"{centroid:.6f}"])
    return path


def exemplar_image(spectrum: np.ndarray) -> GrayImage:
    logged = np.log1p(spectrum)
    peak = logged.max()
    return GrayImage(logged / peak if peak > 0 else logged)


def write_exemplars(profile: SpectrumProfile, directory: str) -> list[str]:
    """One PGM per top-K filter plus a JSON file with the preprocessing choices."""
    os.makedirs(directory, exist_ok=True)
    stem = profile.layer.replace(".", "_")
    paths = []
    for rank, exemplar in enumerate(profile.topk):
        path = os.path.join(directory, f"{stem}_top{rank}_f{exemplar.filter_id.replace('.', '-')}.pgm")
        paths.append(save_image(exemplar_image(exemplar.magnitude), path))
    meta = dict(profile.metadata)
    meta["exemplars"] = [
        {"filter_id": e.filter_id, "energy": e.energy, "file": os.path.basename(p)}
        for e, p in zip(profile.topk, paths)
    ]
    with open(os.path.join(directory, f"{stem}_meta.json"), "w", encoding="utf-8") as f:
        json.dump(meta, f, indent=2, sort_keys=True)
    return paths
