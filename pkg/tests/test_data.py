"""Image I/O, patch extraction, noise model and synthetic images."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from PIL import Image
from scipy import stats

from additive_unet.data import (
    GrayImage,
    SynthKind,
    corrupt,
    extract_patches,
    fetch_dataset,
    list_images,
    load_image,
    noise_seed,
    patch_corners,
    save_image,
    synth_dataset,
    synth_image,
)
from additive_unet.errors import DataError, ImageFormatError
from additive_unet.metrics import psnr

# =============================================================================
# Loading and saving
# =============================================================================


def test_load_binary_pgm(tmp_path):
    path = tmp_path / "tiny.pgm"
    path.write_bytes(b"P5\n2 2\n255\n" + bytes([0, 255, 128, 64]))
    image = load_image(str(path))
    np.testing.assert_allclose(image.pixels, [[0.0, 1.0], [128 / 255, 64 / 255]])


def test_load_white_png(tmp_path):
    path = tmp_path / "white.png"
    Image.new("L", (5, 4), 255).save(path)
    image = load_image(str(path))
    assert (image.height, image.width) == (4, 5)
    assert np.all(image.pixels == 1.0)


def test_load_sixteen_bit_png(tmp_path):
    path = tmp_path / "deep.png"
    Image.fromarray(np.array([[0, 65535], [32768, 1]], dtype=np.uint16)).save(path)
    image = load_image(str(path))
    np.testing.assert_allclose(image.pixels, [[0.0, 1.0], [32768 / 65535, 1 / 65535]])


def test_color_png_reduced_with_luma(tmp_path):
    path = tmp_path / "red.png"
    Image.new("RGB", (3, 3), (255, 0, 0)).save(path)
    assert load_image(str(path)).pixels == pytest.approx(np.full((3, 3), 0.299))


@pytest.mark.parametrize("suffix", [".png", ".pgm"])
def test_save_load_round_trip(tmp_path, rng, suffix):
    image = GrayImage(rng.random((13, 9)))
    path = save_image(image, str(tmp_path / f"img{suffix}"))
    restored = load_image(path)
    assert np.max(np.abs(restored.pixels - image.pixels)) <= 1 / 510 + 1e-12


def test_unsupported_format(tmp_path):
    path = tmp_path / "anim.png"
    path.write_bytes(b"GIF89a" + bytes(20))
    with pytest.raises(ImageFormatError):
        load_image(str(path))


def test_truncated_png(tmp_path):
    full = tmp_path / "full.png"
    Image.new("L", (32, 32), 10).save(full)
    cut = tmp_path / "cut.png"
    cut.write_bytes(full.read_bytes()[:20])
    with pytest.raises(ImageFormatError):
        load_image(str(cut))


def test_missing_image(tmp_path):
    with pytest.raises(DataError):
        load_image(str(tmp_path / "nope.png"))


def test_list_images_is_lexicographic(tmp_path):
    for name in ["b.png", "a.pgm", "c.txt", "A.png"]:
        (tmp_path / name).write_bytes(b"")
    assert [p.rsplit("/", 1)[-1] for p in list_images(str(tmp_path))] == ["A.png", "a.pgm", "b.png"]


def test_list_images_empty_dir(tmp_path):
    with pytest.raises(DataError):
        list_images(str(tmp_path))


def test_gray_image_range_checked():
    with pytest.raises(ValueError):
        GrayImage(np.array([[0.0, 1.5]]))
    assert GrayImage.clipped(np.array([[-0.2, 1.5]])).pixels.tolist() == [[0.0, 1.0]]


# =============================================================================
# Patches
# =============================================================================


def test_extract_patches_are_crops(rng):
    image = GrayImage(rng.random((20, 30)))
    corners = patch_corners(20, 30, 8, 5, seed=3)
    patches = extract_patches(image, 8, 5, seed=3)
    assert len(patches) == 5
    for (r, c), patch in zip(corners, patches):
        assert patch.pixels.shape == (8, 8)
        np.testing.assert_array_equal(patch.pixels, image.pixels[r : r + 8, c : c + 8])


def test_patch_larger_than_image():
    with pytest.raises(ValueError):
        extract_patches(GrayImage(np.zeros((10, 12))), 11, 1, seed=0)


@settings(max_examples=200, deadline=None)
@given(
    height=st.integers(1, 40),
    width=st.integers(1, 40),
    size=st.integers(-2, 45),
    count=st.integers(0, 6),
    seed=st.integers(0, 2**32 - 1),
)
def test_extract_patches_stays_inside_the_image(height, width, size, count, seed):
    pixels = np.arange(height * width, dtype=np.float64).reshape(height, width) / (height * width)
    image = GrayImage(pixels)
    if size < 1 or size > min(height, width):
        with pytest.raises(ValueError):
            extract_patches(image, size, count, seed)
        return
    corners = patch_corners(height, width, size, count, seed)
    patches = extract_patches(image, size, count, seed)
    assert len(patches) == count
    for (r, c), patch in zip(corners, patches):
        assert 0 <= r <= height - size and 0 <= c <= width - size
        assert patch.pixels.shape == (size, size)
        np.testing.assert_array_equal(patch.pixels, pixels[r : r + size, c : c + size])


@pytest.mark.parametrize("shape", [(1, 1), (7, 7), (5, 19)])
def test_patch_as_large_as_the_image(shape):
    image = GrayImage(np.random.default_rng(2).random(shape))
    size = min(shape)
    for patch in extract_patches(image, size, 4, seed=9):
        assert patch.pixels.shape == (size, size)
    if shape[0] == shape[1]:
        assert patch_corners(*shape, size, 4, seed=9) == [(0, 0)] * 4


def test_patch_corners_are_uniform():
    corners = patch_corners(512, 768, 128, 10_000, seed=11)
    for axis, positions in ((0, 512 - 128 + 1), (1, 768 - 128 + 1)):
        values = np.array([c[axis] for c in corners])
        assert values.min() >= 0 and values.max() < positions
        # one category per corner position; each expects more than 15 hits
        counts = np.bincount(values, minlength=positions)
        assert stats.chisquare(counts).pvalue > 0.01


# =============================================================================
# Noise
# =============================================================================


def test_noise_statistics():
    batch = corrupt(np.zeros((1000, 1000)), 25.0, seed=noise_seed(0, 1))
    noise = batch.noisy.data - batch.clean.data
    assert noise.size == 10**6
    assert abs(noise.std() / (25.0 / 255.0) - 1.0) < 0.005
    assert abs(noise.mean()) < 3 * (25.0 / 255.0) / math.sqrt(noise.size)


@pytest.mark.parametrize("sigma", [15.0, 25.0, 50.0])
def test_noisy_psnr_matches_sigma(sigma):
    clean = np.full((256, 256), 0.5)
    noisy = corrupt(clean, sigma, seed=noise_seed(7, int(sigma))).noisy.data[0, 0]
    assert psnr(clean, noisy) == pytest.approx(20 * math.log10(255 / sigma), abs=0.3)


def test_noise_is_unclipped():
    batch = corrupt(np.ones((1, 1, 16, 16)), 50.0, seed=1)
    assert batch.noisy.data.max() > 1.0


def test_realizations_are_patch_major(rng):
    clean = rng.random((2, 1, 4, 4))
    batch = corrupt(clean, 10.0, realizations=3, seed=5)
    assert len(batch) == 6
    np.testing.assert_array_equal(batch.clean.data[:3], np.repeat(clean[:1], 3, axis=0))
    np.testing.assert_array_equal(batch.clean.data[3:], np.repeat(clean[1:], 3, axis=0))
    assert not np.array_equal(batch.noisy.data[0], batch.noisy.data[1])


def test_noise_is_seeded():
    a = corrupt(np.zeros((8, 8)), 25.0, seed=noise_seed(1, 2, 3)).noisy.data
    b = corrupt(np.zeros((8, 8)), 25.0, seed=noise_seed(1, 2, 3)).noisy.data
    c = corrupt(np.zeros((8, 8)), 25.0, seed=noise_seed(1, 2, 4)).noisy.data
    assert a.tobytes() == b.tobytes()
    assert a.tobytes() != c.tobytes()


@pytest.mark.parametrize("sigma", [0.0, -5.0])
def test_sigma_must_be_positive(sigma):
    with pytest.raises(ValueError):
        corrupt(np.zeros((4, 4)), sigma)


# =============================================================================
# Synthetic images
# =============================================================================


@pytest.mark.parametrize("kind", list(SynthKind))
def test_synth_kinds_are_valid_images(kind):
    image = synth_image(kind, 32, 40, seed=2)
    assert image.pixels.shape == (32, 40)
    assert image.pixels.min() >= 0.0 and image.pixels.max() <= 1.0


def test_synth_gradient_and_checkers():
    gradient = synth_image(SynthKind.GRADIENT, 16, 16).pixels
    assert gradient[0, 0] == 0.0 and gradient[-1, -1] == 1.0
    checkers = synth_image(SynthKind.CHECKERS, 16, 16, period=4).pixels
    assert set(np.unique(checkers)) == {0.0, 1.0}
    assert checkers[0, 0] != checkers[0, 4]


def test_synth_blobs_are_seeded():
    a = synth_image(SynthKind.GAUSSIAN_BLOBS, 32, 32, seed=4).pixels
    b = synth_image(SynthKind.GAUSSIAN_BLOBS, 32, 32, seed=4).pixels
    c = synth_image(SynthKind.GAUSSIAN_BLOBS, 32, 32, seed=5).pixels
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


def test_synth_too_small():
    with pytest.raises(ValueError):
        synth_image(SynthKind.STRIPES, 8, 32)


def test_synth_dataset():
    images = synth_dataset(6, 24, 24, seed=0)
    assert [name for name, _ in images] == [f"synth_{i:03d}" for i in range(6)]
    again = synth_dataset(6, 24, 24, seed=0)
    assert all(np.array_equal(a.pixels, b.pixels) for (_, a), (_, b) in zip(images, again))


# =============================================================================
# Download
# =============================================================================


def test_fetch_from_file_mirror(tmp_path):
    mirror = tmp_path / "mirror"
    mirror.mkdir()
    Image.new("L", (16, 16), 40).save(mirror / "kodim01.png")
    paths = fetch_dataset(mirror.as_uri(), str(tmp_path / "kodak"), names=["kodim01.png"])
    assert load_image(paths[0]).pixels == pytest.approx(np.full((16, 16), 40 / 255))


def test_fetch_failure_is_data_error(tmp_path):
    with pytest.raises(DataError):
        fetch_dataset((tmp_path / "missing").as_uri(), str(tmp_path / "out"), names=["kodim01.png"])
