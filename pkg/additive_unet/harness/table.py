"""Results table across run manifests."""

from __future__ import annotations

import os

from additive_unet.config import get_messages
from additive_unet.errors import DataError
from additive_unet.harness.manifest import RunManifest
from additive_unet.metrics import Aggregate, format_psnr, format_sigma, format_ssim, write_table_csv


def _source_name(path: str, manifest: RunManifest) -> str:
    name = manifest.config.get("name")
    return name or os.path.basename(os.path.dirname(os.path.abspath(path))) or path


def collect_aggregates(manifest_paths: list[str]) -> list[Aggregate]:
    """
    Gather final metrics from train and eval manifests.

    Runs of one model at different sigmas merge into a single row. When two
    manifests report the same model at the same sigma, every entry of that
    model is tagged with its run name so the rows stay distinct.
    """
    if not manifest_paths:
        raise DataError("table needs at least one manifest")
    sourced: list[tuple[str, Aggregate]] = []
    for path in manifest_paths:
        manifest = RunManifest.read(path)
        aggregates = manifest.aggregates()
        if not aggregates:
            raise DataError(f"{path}: manifest holds no metrics (run had no eval images)")
        source = _source_name(path, manifest)
        sourced += [(source, agg) for agg in aggregates]

    seen: dict[tuple[str, float], str] = {}
    clashing: set[str] = set()
    for source, agg in sourced:
        key = (agg.model_id, agg.sigma)
        if key in seen and seen[key] != source:
            clashing.add(agg.model_id)
        seen.setdefault(key, source)

    out = []
    for source, agg in sourced:
        if agg.model_id in clashing:
            agg = Aggregate(
                model_id=f"{agg.model_id} [{source}]",
                sigma=agg.sigma,
                psnr_db=agg.psnr_db,
                ssim=agg.ssim,
                count=agg.count,
            )
        out.append(agg)
    return out


def cmd_table(manifest_paths: list[str], out: str, verbose: bool = True, lang: str = "en") -> list[Aggregate]:
    """Write one row per model with a PSNR/SSIM column pair per sigma."""
    msgs = get_messages(lang)
    aggregates = collect_aggregates(manifest_paths)
    write_table_csv(aggregates, out)
    if verbose:
        sigmas = sorted({a.sigma for a in aggregates})
        cells = {(a.model_id, a.sigma): a for a in aggregates}
        models = list(dict.fromkeys(a.model_id for a in aggregates))
        width = max(len(m) for m in models) + 2
        print("=" * 50)
        print(f"{msgs['table']}: {len(models)} x {len(sigmas)}")
        print("=" * 50)
        print("".ljust(width) + "".join(f"sigma={format_sigma(s):<18}" for s in sigmas))
        for model in models:
            line = model.ljust(width)
            for sigma in sigmas:
                agg = cells[(model, sigma)]
                line += f"{format_psnr(agg.psnr_db)} / {format_ssim(agg.ssim)}".ljust(24)
            print(line)
        print(f"{msgs['output_dir']}: {out}")
    return aggregates
