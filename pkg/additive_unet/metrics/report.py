"""Per-image metric rows, their averages and the CSV layouts they are written in."""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field

from additive_unet.errors import DataError

ROW_FIELDS = ["model_id", "sigma", "image_id", "psnr_db", "ssim"]


def format_psnr(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:.4f}"


def format_ssim(value: float) -> str:
    return f"{value:.6f}"


def format_sigma(sigma: float) -> str:
    return f"{sigma:g}"


@dataclass
class MetricsRow:
    model_id: str
    sigma: float
    image_id: str
    psnr_db: float
    ssim: float


@dataclass
class Aggregate:
    model_id: str
    sigma: float
    psnr_db: float
    ssim: float
    count: int


@dataclass
class MetricsReport:
    """
    Per-image PSNR/SSIM rows.

    Aggregates are arithmetic means of the per-image values for each
    (model_id, sigma), i.e. the mean of PSNRs rather than the PSNR of a pooled
    MSE.
    """

    rows: list[MetricsRow] = field(default_factory=list)

    def add(self, row: MetricsRow) -> None:
        self.rows.append(row)

    def extend(self, rows: list[MetricsRow]) -> None:
        self.rows.extend(rows)

    def aggregates(self) -> list[Aggregate]:
        groups: dict[tuple[str, float], list[MetricsRow]] = {}
        for row in self.rows:
            groups.setdefault((row.model_id, row.sigma), []).append(row)
        out = []
        for (model_id, sigma), rows in groups.items():
            n = len(rows)
            out.append(
                Aggregate(
                    model_id=model_id,
                    sigma=sigma,
                    psnr_db=sum(r.psnr_db for r in rows) / n,
                    ssim=sum(r.ssim for r in rows) / n,
                    count=n,
                )
            )
        return out

    def sigmas(self) -> list[float]:
        return sorted({row.sigma for row in self.rows})


def write_rows_csv(report: MetricsReport, path: str) -> str:
    """Write `model_id,sigma,image_id,psnr_db,ssim`, one line per image."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(ROW_FIELDS)
        for row in report.rows:
            writer.writerow(
                [
                    row.model_id,
                    format_sigma(row.sigma),
                    row.image_id,
                    format_psnr(row.psnr_db),
                    format_ssim(row.ssim),
                ]
            )
    return path


def read_rows_csv(path: str) -> MetricsReport:
    if not os.path.isfile(path):
        raise DataError(f"metrics file not found: {path}")
    report = MetricsReport()
    with open(path, newline="", encoding="utf-8") as f:
        for record in csv.DictReader(f):
            report.add(
                MetricsRow(
                    model_id=record["model_id"],
                    sigma=float(record["sigma"]),
                    image_id=record["image_id"],
                    psnr_db=float(record["psnr_db"]),
                    ssim=float(record["ssim"]),
                )
            )
    return report


def table_header(sigmas: list[float]) -> list[str]:
    header = ["model"]
    for sigma in sigmas:
        tag = f"sigma{format_sigma(sigma)}"
        header += [f"{tag}_psnr", f"{tag}_ssim"]
    return header


def write_table_csv(aggregates: list[Aggregate], path: str) -> str:
    """
    Write the results-table layout: one row per model, a PSNR/SSIM column
    pair per sigma.

    Raises:
        DataError: If the models were not all measured at the same sigmas.
    """
    sigmas = sorted({a.sigma for a in aggregates})
    by_model: dict[str, dict[float, Aggregate]] = {}
    for agg in aggregates:
        by_model.setdefault(agg.model_id, {})[agg.sigma] = agg

    mismatched = {
        model: sorted(set(sigmas) - set(cells))
        for model, cells in by_model.items()
        if set(cells) != set(sigmas)
    }
    if mismatched:
        detail = "; ".join(
            f"{model} lacks sigma {', '.join(format_sigma(s) for s in missing)}"
            for model, missing in mismatched.items()
        )
        raise DataError(f"inconsistent sigma sets: {detail}")

    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(table_header(sigmas))
        for model, cells in by_model.items():
            line = [model]
            for sigma in sigmas:
                line += [format_psnr(cells[sigma].psnr_db), format_ssim(cells[sigma].ssim)]
            writer.writerow(line)
    return path
