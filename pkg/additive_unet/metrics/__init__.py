"""Image quality metrics, evaluation and reports."""

from additive_unet.metrics.evaluation import (
    EvalImage,
    denoise,
    evaluate_model,
    evaluate_noisy,
    make_eval_set,
    mean_scores,
)
from additive_unet.metrics.quality import gaussian_window, psnr, ssim, ssim_map
from additive_unet.metrics.report import (
    Aggregate,
    MetricsReport,
    MetricsRow,
    format_psnr,
    format_sigma,
    format_ssim,
    read_rows_csv,
    table_header,
    write_rows_csv,
    write_table_csv,
)

__all__ = [
    # Quality measures
    "psnr",
    "ssim",
    "ssim_map",
    "gaussian_window",
    # Reports
    "MetricsRow",
    "MetricsReport",
    "Aggregate",
    "write_rows_csv",
    "read_rows_csv",
    "write_table_csv",
    "table_header",
    "format_psnr",
    "format_ssim",
    "format_sigma",
    # Evaluation
    "EvalImage",
    "make_eval_set",
    "denoise",
    "evaluate_model",
    "evaluate_noisy",
    "mean_scores",
]
