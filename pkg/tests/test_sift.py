import numpy as np
import pytest

from biaslens.errors import ImageTooSmall
from biaslens.images import ImageBuffer
from biaslens.transforms import sift_keypoints
from biaslens.transforms.sift import (
    DEFAULT_CONTRAST_THRESHOLD,
    DEFAULT_EDGE_RATIO,
    detect_keypoints,
    dog_pyramid,
)


def gray_image(arr):
    return ImageBuffer(arr.astype(np.uint8)[:, :, np.newaxis])


def gaussian_blob(size=64, cy=31.0, cx=33.0, sigma=4.0):
    yy, xx = np.mgrid[0:size, 0:size]
    blob = 255.0 * np.exp(-((yy - cy) ** 2 + (xx - cx) ** 2) / (2 * sigma**2))
    return np.floor(blob + 0.5)


def test_constant_image_no_keypoints():
    keypoints, _ = sift_keypoints(gray_image(np.full((32, 32), 100)))
    assert keypoints == []


def test_blob_center_localized_within_two_pixels():
    keypoints, _ = sift_keypoints(gray_image(gaussian_blob()))
    assert keypoints
    best = min(np.hypot(kp.x - 33.0, kp.y - 31.0) for kp in keypoints)
    assert best <= 2.0


def test_detections_satisfy_their_own_thresholds():
    gray01 = gaussian_blob() / 255.0
    detections, gauss = detect_keypoints(gray01)
    dogs = dog_pyramid(gauss)
    bound = (DEFAULT_EDGE_RATIO + 1) ** 2 / DEFAULT_EDGE_RATIO
    assert detections
    for det in detections:
        value = dogs[det.octave][det.level][det.iy, det.ix]
        assert abs(value) > DEFAULT_CONTRAST_THRESHOLD
        assert value == det.dog_value
        assert det.edge_score < bound


def test_orientation_range_and_scale_positive():
    keypoints, _ = sift_keypoints(gray_image(gaussian_blob()))
    for kp in keypoints:
        assert 0.0 <= kp.orientation < 2 * np.pi
        assert kp.scale > 0
        assert 0 <= kp.x < 64 and 0 <= kp.y < 64


def test_rendering_marks_keypoints():
    img = gray_image(gaussian_blob())
    keypoints, rendered = sift_keypoints(img)
    assert rendered.channels == 3
    assert (rendered.height, rendered.width) == (img.height, img.width)
    # circles introduce the overlay color somewhere
    assert (rendered.pixels[:, :, 0] != rendered.pixels[:, :, 1]).any()


def test_deterministic():
    img = gray_image(gaussian_blob())
    a, _ = sift_keypoints(img)
    b, _ = sift_keypoints(img)
    assert a == b


def test_too_small_image_rejected():
    with pytest.raises(ImageTooSmall):
        sift_keypoints(gray_image(np.zeros((15, 40))))
