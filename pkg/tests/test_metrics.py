"""PSNR/SSIM oracles, report aggregation and evaluation bookkeeping."""

import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from additive_unet.data import GrayImage
from additive_unet.errors import DataError, NumericError, ShapeError
from additive_unet.metrics import (
    Aggregate,
    MetricsReport,
    MetricsRow,
    evaluate_model,
    evaluate_noisy,
    gaussian_window,
    make_eval_set,
    psnr,
    read_rows_csv,
    ssim,
    ssim_map,
    table_header,
    write_rows_csv,
    write_table_csv,
)
from additive_unet.model import ModelConfig, Variant, build_params


def window_ssim(a, b, r, c):
    """SSIM of the single 11x11 window whose top-left corner is (r, c)."""
    w = gaussian_window()
    pa, pb = a[r : r + 11, c : c + 11], b[r : r + 11, c : c + 11]
    mu_a, mu_b = np.sum(w * pa), np.sum(w * pb)
    var_a = np.sum(w * (pa - mu_a) ** 2)
    var_b = np.sum(w * (pb - mu_b) ** 2)
    cov = np.sum(w * (pa - mu_a) * (pb - mu_b))
    c1, c2 = 0.01**2, 0.03**2
    return ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) / ((mu_a**2 + mu_b**2 + c1) * (var_a + var_b + c2))


def identity_dncnn():
    params = build_params(ModelConfig(Variant.DNCNN, depth=3, channels=2))
    for tensor in params.named_tensors().values():
        tensor.data[...] = 0.0
    return params


# =============================================================================
# PSNR / SSIM
# =============================================================================


def test_psnr_of_uniform_offset():
    a = np.full((32, 32), 0.3)
    assert psnr(a, a + 0.1) == pytest.approx(20.0, abs=0.01)


def test_psnr_identical_is_inf():
    a = np.random.default_rng(0).random((8, 8))
    assert psnr(a, a) == math.inf


def test_extra_noise_lowers_psnr_on_average():
    gen = np.random.default_rng(21)
    before, after = [], []
    for _ in range(100):
        clean = gen.random((32, 32))
        estimate = clean + gen.normal(0.0, 10 / 255, size=clean.shape)
        noisier = estimate + gen.normal(0.0, 5 / 255, size=clean.shape)
        before.append(psnr(clean, estimate))
        after.append(psnr(clean, noisier))
    assert np.mean(after) < np.mean(before)
    assert np.mean(np.less(after, before)) > 0.95


def test_psnr_shape_mismatch():
    with pytest.raises(ShapeError):
        psnr(np.zeros((4, 4)), np.zeros((4, 5)))


def test_ssim_of_image_with_itself(rng):
    a = rng.random((24, 20))
    assert ssim(a, a) == pytest.approx(1.0, abs=1e-12)


def test_ssim_is_symmetric(rng):
    a, b = rng.random((2, 30, 30))
    assert abs(ssim(a, b) - ssim(b, a)) < 1e-12


@pytest.mark.parametrize("seed", range(10))
def test_ssim_map_matches_per_window_oracle(seed):
    gen = np.random.default_rng(seed)
    a = gen.random((16, 18))
    b = np.clip(a + gen.normal(0, 0.1, a.shape), 0, 1)
    local = ssim_map(a, b)
    assert local.shape == (6, 8)
    for r, c in [(0, 0), (5, 7), (2, 3), (4, 0)]:
        assert abs(local[r, c] - window_ssim(a, b, r, c)) < 1e-9


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**20), noise=st.floats(0.0, 1.0))
def test_ssim_is_bounded(seed, noise):
    gen = np.random.default_rng(seed)
    a = gen.random((12, 12))
    b = np.clip((1 - noise) * a + noise * gen.random((12, 12)), 0, 1)
    assert -1.0 - 1e-12 <= ssim(a, b) <= 1.0 + 1e-12


def test_ssim_needs_a_full_window():
    with pytest.raises(ShapeError):
        ssim(np.zeros((10, 30)), np.zeros((10, 30)))


def test_gaussian_window_is_normalized():
    w = gaussian_window()
    assert w.shape == (11, 11)
    assert w.sum() == pytest.approx(1.0, abs=1e-15)
    assert w[5, 5] == w.max()


# =============================================================================
# Reports
# =============================================================================


def _rows():
    return [
        MetricsRow("R-AddU", 25.0, "a", 30.0, 0.8),
        MetricsRow("R-AddU", 25.0, "b", 28.0, 0.6),
        MetricsRow("R-AddU", 15.0, "a", 33.0, 0.9),
        MetricsRow("R-AddU", 15.0, "b", 31.0, 0.7),
    ]


def test_aggregates_are_means_of_per_image_values():
    aggregates = {(a.model_id, a.sigma): a for a in MetricsReport(_rows()).aggregates()}
    assert aggregates[("R-AddU", 25.0)].psnr_db == pytest.approx(29.0)
    assert aggregates[("R-AddU", 25.0)].ssim == pytest.approx(0.7)
    assert aggregates[("R-AddU", 15.0)].count == 2


def test_rows_csv_round_trip(tmp_path):
    report = MetricsReport(_rows() + [MetricsRow("noisy", 0.0, "c", math.inf, 1.0)])
    path = write_rows_csv(report, str(tmp_path / "rows.csv"))
    with open(path, newline="") as f:
        lines = list(csv.reader(f))
    assert lines[0] == ["model_id", "sigma", "image_id", "psnr_db", "ssim"]
    assert lines[1] == ["R-AddU", "25", "a", "30.0000", "0.800000"]
    assert lines[-1][3] == "inf"
    assert read_rows_csv(path).rows == report.rows


def test_table_header():
    assert table_header([15.0, 25.0, 50.0]) == [
        "model",
        "sigma15_psnr",
        "sigma15_ssim",
        "sigma25_psnr",
        "sigma25_ssim",
        "sigma50_psnr",
        "sigma50_ssim",
    ]


def test_table_one_row_per_model(tmp_path):
    aggregates = MetricsReport(_rows()).aggregates() + [Aggregate("DnCNN-17", s, 27.0, 0.5, 2) for s in (15.0, 25.0)]
    path = write_table_csv(aggregates, str(tmp_path / "table.csv"))
    with open(path, newline="") as f:
        lines = list(csv.reader(f))
    assert lines[0] == table_header([15.0, 25.0])
    assert lines[1] == ["R-AddU", "32.0000", "0.800000", "29.0000", "0.700000"]
    assert lines[2][0] == "DnCNN-17"


def test_table_rejects_inconsistent_sigmas(tmp_path):
    aggregates = MetricsReport(_rows()).aggregates() + [Aggregate("DnCNN-17", 25.0, 27.0, 0.5, 2)]
    with pytest.raises(DataError, match="DnCNN-17 lacks sigma 15"):
        write_table_csv(aggregates, str(tmp_path / "table.csv"))


# =============================================================================
# Evaluation
# =============================================================================


def test_identity_model_psnr_matches_noise_level(mid_gray_images):
    eval_set = make_eval_set(mid_gray_images, 25.0, seed=0)
    rows = evaluate_model(identity_dncnn(), eval_set, 25.0)
    mean_psnr = sum(r.psnr_db for r in rows) / len(rows)
    assert mean_psnr == pytest.approx(20 * math.log10(255 / 25), abs=0.3)


def test_identity_model_matches_noisy_baseline(mid_gray_images):
    eval_set = make_eval_set(mid_gray_images, 25.0, seed=0)
    model_rows = evaluate_model(identity_dncnn(), eval_set, 25.0)
    noisy_rows = evaluate_noisy(eval_set, 25.0)
    assert [r.model_id for r in noisy_rows] == ["noisy"] * 3
    for m, n in zip(model_rows, noisy_rows):
        assert m.psnr_db == pytest.approx(n.psnr_db, abs=1e-9)


def test_sigma_zero_bypasses_noise(mid_gray_images):
    eval_set = make_eval_set(mid_gray_images, 0.0, seed=0)
    rows = evaluate_model(identity_dncnn(), eval_set, 0.0)
    assert all(r.psnr_db == math.inf for r in rows)
    assert all(r.ssim == pytest.approx(1.0) for r in rows)


def test_eval_noise_is_shared_across_models(mid_gray_images):
    first = make_eval_set(mid_gray_images, 15.0, seed=3)
    second = make_eval_set(mid_gray_images, 15.0, seed=3)
    assert all(a.noisy.tobytes() == b.noisy.tobytes() for a, b in zip(first, second))


def test_non_finite_output_is_numeric_error():
    params = identity_dncnn()
    params.layers[-1].bias.data[...] = np.nan
    eval_set = make_eval_set([("x", GrayImage(np.full((16, 16), 0.5)))], 25.0, seed=0)
    with pytest.raises(NumericError):
        evaluate_model(params, eval_set, 25.0)
