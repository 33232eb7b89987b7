"""Shared fixtures for the test suite."""

import numpy as np
import pytest

from additive_unet.data import GrayImage
from additive_unet.model import ModelConfig, Variant, build_params


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "slow: end-to-end training runs (deselect with -m 'not slow')"
    )


@pytest.fixture(autouse=True)
def output_root(tmp_path, monkeypatch):
    """Keep every run directory inside the test's temporary directory."""
    root = tmp_path / "runs"
    monkeypatch.setenv("ADDUNET_OUTPUT_ROOT", str(root))
    return root


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_config():
    return ModelConfig(variant=Variant.REAL_ADDITIVE, depth=3, channels=4, kernel_schedule=[3, 5, 3], seed=3)


@pytest.fixture
def tiny_params(tiny_config):
    params = build_params(tiny_config)
    # move the gates away from ln 2 so they are distinguishable
    for j, beta in enumerate(params.beta):
        beta.data[...] = 0.3 * (j + 1) - 0.5
    return params


@pytest.fixture
def mid_gray_images():
    """Images well inside (0, 1) so clipping barely touches noisy versions."""
    rows, cols = np.mgrid[0:48, 0:48].astype(np.float64)
    ramp = (rows / 47.0 + cols / 47.0) / 2.0
    return [
        ("ramp", GrayImage(0.25 + 0.5 * ramp)),
        ("flat", GrayImage(np.full((48, 48), 0.5))),
        ("wave", GrayImage(0.5 + 0.2 * np.sin(cols / 3.0))),
    ]
