"""Gate sweep and filter spectrum commands."""

from __future__ import annotations

import math
import os

from additive_unet.analysis import (
    SpectrumProfile,
    SweepResult,
    filter_spectra,
    layer_names,
    spectral_centroid,
    sweep_gate,
    sweep_values,
    write_centroids_csv,
    write_exemplars,
    write_profiles_csv,
    write_sweep_csv,
)
from additive_unet.config import get_messages
from additive_unet.errors import ConfigError, DataError, NumericError
from additive_unet.harness.config import EvalConfig
from additive_unet.harness.train import load_images
from additive_unet.metrics import make_eval_set
from additive_unet.model import AdditiveUNetParams, gate_values, load_checkpoint
from additive_unet.run_logger import RunLogger

PROFILES_FILE = "spectra_profiles.csv"
CENTROIDS_FILE = "spectral_centroids.csv"


def sweep_csv_name(gate_index: int) -> str:
    return f"sweep_alpha_gate{gate_index}.csv"


def cmd_sweep_alpha(
    checkpoint: str,
    eval_config: EvalConfig,
    output_dir: str,
    gate_index: int = 0,
    low: float | None = None,
    high: float | None = None,
    steps: int = 21,
    sigma: float | None = None,
    verbose: bool = True,
    lang: str = "en",
) -> SweepResult:
    """
    Sweep one skip gate of a gated additive U-Net and write the PSNR/SSIM curve.

    Gate 0 scales the deepest skip. The noise level defaults to the one the
    checkpoint was trained at, then to the first configured eval sigma.
    """
    msgs = get_messages(lang)
    loaded = load_checkpoint(checkpoint)
    if not (isinstance(loaded.params, AdditiveUNetParams) and loaded.config.is_gated):
        raise ConfigError(f"{loaded.config.label} has no learnable skip gates to sweep")
    if not eval_config.has_images:
        raise DataError("sweep needs dataset_dir or synth images")
    if sigma is None:
        sigma = float(loaded.extra.get("sigma", eval_config.sigma_list[0]))

    learned = gate_values(loaded.params)
    if not 0 <= gate_index < len(learned):
        raise ConfigError(f"gate index {gate_index} out of range 0..{len(learned) - 1}")
    values = sweep_values(learned[gate_index], low, high, steps)

    images = load_images(eval_config.dataset_dir, eval_config.synth)
    eval_set = make_eval_set(images, sigma, eval_config.seed)
    try:
        result = sweep_gate(loaded.params, gate_index, values, eval_set, sigma)
    except ValueError as e:
        raise ConfigError(str(e))
    if any(math.isnan(p) or math.isnan(s) for p, s in zip(result.psnr_curve, result.ssim_curve)):
        raise NumericError(f"sweep of gate {gate_index} produced NaN scores")

    path = write_sweep_csv(result, os.path.join(output_dir, sweep_csv_name(gate_index)))
    logger = RunLogger(output_dir)
    logger.start_session("sweep-alpha", {"checkpoint": checkpoint, "gate_index": gate_index, "values": values})
    best_alpha, best_psnr = result.best()
    logger.end_session("done", learned_alpha=result.learned_alpha, best_alpha=best_alpha, best_psnr=best_psnr)

    if verbose:
        print("=" * 50)
        print(f"{msgs['sweep']}: {loaded.config.label}, gate {gate_index}, {msgs['sigma']} {sigma:g}")
        print("=" * 50)
        for alpha, p, s in zip(result.sweep_values, result.psnr_curve, result.ssim_curve):
            marker = "  <- learned" if math.isclose(alpha, result.learned_alpha) else ""
            print(f"  alpha {alpha:8.4f}  PSNR {p:7.3f}  SSIM {s:.4f}{marker}")
        print(f"learned alpha {result.learned_alpha:.4f}; peak at {best_alpha:.4f} ({best_psnr:.3f} dB)")
        print(f"{msgs['output_dir']}: {path}")
    return result


def cmd_spectra(
    checkpoint: str,
    output_dir: str,
    layers: list[str] | None = None,
    pad_to: int = 64,
    top_k: int = 6,
    per_channel: bool = False,
    conv: str = "first",
    verbose: bool = True,
    lang: str = "en",
) -> list[SpectrumProfile]:
    """
    Spectral profiles for the requested layers (all encoder blocks by default).

    Writes the radial profiles, a centroid report ordered as requested, and
    top-K exemplar spectra with their preprocessing metadata.
    """
    msgs = get_messages(lang)
    loaded = load_checkpoint(checkpoint)
    params = loaded.params
    if not layers:
        names = layer_names(params)
        layers = [n for n in names if n.startswith("enc.")] or names

    try:
        profiles = [
            filter_spectra(params, layer, pad_to=pad_to, top_k=top_k, per_channel=per_channel, conv=conv)
            for layer in layers
        ]
        centroids = [(p.layer, spectral_centroid(p)) for p in profiles]
    except ValueError as e:
        raise ConfigError(str(e))

    write_profiles_csv(profiles, os.path.join(output_dir, PROFILES_FILE))
    write_centroids_csv(centroids, os.path.join(output_dir, CENTROIDS_FILE))
    exemplar_dir = os.path.join(output_dir, "exemplars")
    for profile in profiles:
        write_exemplars(profile, exemplar_dir)

    if verbose:
        print("=" * 50)
        print(f"{msgs['spectra']}: {loaded.config.label}")
        print("=" * 50)
        for layer, centroid in centroids:
            print(f"  {layer:<16} {msgs['centroid']} {centroid:.4f} cycles/px")
        if len(centroids) > 1:
            rising = all(a[1] <= b[1] for a, b in zip(centroids, centroids[1:]))
            print(f"  centroids rise in the listed order: {rising}")
        print(f"{msgs['output_dir']}: {output_dir}")
    return profiles
