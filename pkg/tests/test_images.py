import numpy as np
import pytest
from PIL import Image

from biaslens.errors import DecodeError, IoError
from biaslens.images import ImageBuffer, from_float, load_image, save_image


def test_buffer_properties():
    img = ImageBuffer(np.zeros((4, 5, 3), dtype=np.uint8))
    assert (img.height, img.width, img.channels) == (4, 5, 3)
    assert len(img.data) == 4 * 5 * 3


def test_buffer_rejects_bad_channel_count():
    with pytest.raises(ValueError):
        ImageBuffer(np.zeros((4, 4, 2), dtype=np.uint8))


def test_buffer_rejects_empty():
    with pytest.raises(ValueError):
        ImageBuffer(np.zeros((0, 4, 1), dtype=np.uint8))


def test_two_by_two_black_color(tmp_path):
    path = tmp_path / "black.png"
    Image.new("RGB", (2, 2)).save(path)
    img = load_image(path)
    assert img.data == bytes(12)


def test_one_red_pixel(tmp_path):
    path = tmp_path / "red.png"
    Image.new("RGB", (1, 1), (255, 0, 0)).save(path)
    assert load_image(path).data == bytes([255, 0, 0])


def test_png_round_trip_lossless(tmp_path):
    rng = np.random.default_rng(5)
    original = ImageBuffer(rng.integers(0, 256, (9, 7, 3)).astype(np.uint8))
    p1, p2 = tmp_path / "a.png", tmp_path / "b.png"
    save_image(original, p1)
    decoded = load_image(p1)
    save_image(decoded, p2)
    assert load_image(p2).data == original.data == decoded.data


def test_grayscale_source_decodes_single_channel(tmp_path):
    path = tmp_path / "gray.png"
    Image.new("L", (3, 3), 200).save(path)
    assert load_image(path).channels == 1


def test_alpha_dropped(tmp_path):
    path = tmp_path / "rgba.png"
    Image.new("RGBA", (2, 2), (10, 20, 30, 128)).save(path)
    img = load_image(path)
    assert img.channels == 3
    assert img.pixels[0, 0].tolist() == [10, 20, 30]


def test_missing_file():
    with pytest.raises(IoError):
        load_image("/nonexistent/nope.png")


def test_corrupt_file(tmp_path):
    path = tmp_path / "junk.png"
    path.write_bytes(b"this is not an image")
    with pytest.raises(DecodeError):
        load_image(path)


def test_from_float_rounds_half_up_and_clamps():
    arr = np.array([[[-3.0], [0.5], [254.5], [300.0]]])
    assert from_float(arr).pixels.ravel().tolist() == [0, 1, 255, 255]
