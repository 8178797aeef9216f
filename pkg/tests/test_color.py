import numpy as np

from biaslens.images import ImageBuffer
from biaslens.transforms import mean_rgb, to_grayscale


def test_white_maps_to_255():
    img = ImageBuffer(np.full((2, 2, 3), 255, dtype=np.uint8))
    assert (to_grayscale(img).pixels == 255).all()


def test_pure_red_maps_to_76():
    # 0.299 * 255 = 76.245 -> 76
    img = ImageBuffer(np.tile(np.array([255, 0, 0], dtype=np.uint8), (2, 2, 1)))
    assert (to_grayscale(img).pixels == 76).all()


def test_grayscale_input_unchanged():
    img = ImageBuffer(np.arange(16, dtype=np.uint8).reshape(4, 4, 1))
    assert to_grayscale(img) is img


def test_grayscale_matches_scalar_oracle():
    rng = np.random.default_rng(10)
    img = ImageBuffer(rng.integers(0, 256, (6, 5, 3)).astype(np.uint8))
    out = to_grayscale(img).pixels[:, :, 0]
    for y in range(6):
        for x in range(5):
            r, g, b = (float(v) for v in img.pixels[y, x])
            expected = int(np.floor(0.299 * r + 0.587 * g + 0.114 * b + 0.5))
            assert out[y, x] == expected


def test_mean_rgb_zero_image():
    img = ImageBuffer(np.zeros((3, 3, 3), dtype=np.uint8))
    out, means = mean_rgb(img)
    assert (out.pixels == 0).all()
    assert means == (0.0, 0.0, 0.0)


def test_mean_rgb_half_and_half():
    px = np.array([[[0, 0, 0], [255, 255, 255]]], dtype=np.uint8)
    out, means = mean_rgb(ImageBuffer(px))
    assert means == (127.5, 127.5, 127.5)
    assert (out.pixels == 128).all()  # round half up


def test_mean_rgb_matches_integer_summation_oracle():
    rng = np.random.default_rng(11)
    img = ImageBuffer(rng.integers(0, 256, (8, 8, 3)).astype(np.uint8))
    out, means = mean_rgb(img)
    for c in range(3):
        total = 0
        for y in range(8):
            for x in range(8):
                total += int(img.pixels[y, x, c])
        assert means[c] == total / 64
        assert abs(int(out.pixels[0, 0, c]) - means[c]) <= 0.5


def test_mean_rgb_idempotent_on_its_output():
    rng = np.random.default_rng(12)
    img = ImageBuffer(rng.integers(0, 256, (5, 9, 3)).astype(np.uint8))
    constant, _ = mean_rgb(img)
    again, means_again = mean_rgb(constant)
    assert np.array_equal(constant.pixels, again.pixels)
    assert all(
        float(constant.pixels[0, 0, c]) == means_again[c] for c in range(3)
    )
