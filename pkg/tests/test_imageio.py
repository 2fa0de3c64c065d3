import numpy as np
import pytest
from PIL import Image

from dirichlet_style import imageio


def _write(path, array):
    Image.fromarray(np.asarray(array, dtype=np.uint8)).save(path)
    return path


def test_one_pixel_white_and_black(tmp_path):
    white = _write(tmp_path / "w.png", np.full((1, 1, 3), 255))
    black = _write(tmp_path / "b.png", np.zeros((1, 1, 3)))
    np.testing.assert_array_equal(imageio.load_image(white), np.ones((1, 1, 3)))
    np.testing.assert_array_equal(imageio.load_image(black), np.zeros((1, 1, 3)))


def test_quantization_rule():
    img = np.array([[[0.5, 1.0, 0.0]]])
    np.testing.assert_array_equal(imageio.to_bytes(img), [[[128, 255, 0]]])
    # 1.5 / 255 rounds half to even -> 2, 2.5 / 255 -> 2
    np.testing.assert_array_equal(imageio.to_bytes(np.array([[[1.5, 2.5, 3.5]]]) / 255.0), [[[2, 2, 4]]])


def test_round_trip_within_one_level(tmp_path, rng):
    img = rng.uniform(0, 1, (17, 23, 3))
    path = tmp_path / "a.png"
    imageio.save_image(img, path)
    back = imageio.load_image(path)
    assert back.shape == img.shape
    assert np.max(np.abs(back - img)) <= 0.5 / 255 + 1e-12


def test_resave_is_byte_identical(tmp_path, rng):
    first, second = tmp_path / "1.png", tmp_path / "2.png"
    imageio.save_image(rng.uniform(0, 1, (9, 11, 3)), first)
    imageio.save_image(imageio.load_image(first), second)
    assert first.read_bytes() == second.read_bytes()


def test_grayscale_is_promoted_and_alpha_dropped(tmp_path):
    gray = _write(tmp_path / "g.png", np.array([[0, 51], [102, 255]]))
    img = imageio.load_image(gray)
    assert img.shape == (2, 2, 3)
    np.testing.assert_array_equal(img[..., 0], img[..., 2])
    assert img[0, 1, 0] == 0.2
    rgba = np.zeros((1, 2, 4), dtype=np.uint8)
    rgba[..., :3] = [[10, 20, 30], [40, 50, 60]]
    rgba[..., 3] = [0, 128]
    img = imageio.load_image(_write(tmp_path / "a.png", rgba))
    np.testing.assert_array_equal(img * 255, [[[10, 20, 30], [40, 50, 60]]])


def test_jpeg_is_readable(tmp_path):
    path = tmp_path / "x.jpg"
    Image.fromarray(np.full((8, 8, 3), 200, dtype=np.uint8)).save(path, quality=95)
    assert np.allclose(imageio.load_image(path), 200 / 255, atol=2 / 255)


def test_io_errors_name_the_path(tmp_path):
    missing = tmp_path / "nope.png"
    with pytest.raises(OSError, match="nope.png"):
        imageio.load_image(missing)
    junk = tmp_path / "junk.png"
    junk.write_bytes(b"not an image")
    with pytest.raises(OSError, match="junk.png"):
        imageio.load_image(junk)
    with pytest.raises(OSError, match="out.png"):
        imageio.save_image(np.zeros((2, 2, 3)), tmp_path / "no_dir" / "out.png")


def test_check_image_rejects_bad_input():
    with pytest.raises(imageio.ImageFormatError):
        imageio.check_image(np.zeros((4, 4)))
    with pytest.raises(imageio.ImageFormatError):
        imageio.check_image(np.full((2, 2, 3), 1.5))
    with pytest.raises(imageio.ImageFormatError):
        imageio.check_image(np.full((2, 2, 3), np.nan))


def test_resize_keeps_aspect_ratio(rng):
    assert imageio.resize_max_side(rng.uniform(0, 1, (100, 50, 3)), 50).shape == (50, 25, 3)
    assert imageio.resize_max_side(rng.uniform(0, 1, (50, 100, 3)), 50).shape == (25, 50, 3)


def test_resize_no_op_within_bound(rng):
    img = rng.uniform(0, 1, (30, 40, 3))
    assert imageio.resize_max_side(img, 40) is img


def test_resize_constant_and_range(rng):
    const = np.full((64, 48, 3), 0.37)
    np.testing.assert_array_equal(imageio.resize_max_side(const, 20), 0.37)
    img = rng.uniform(0.2, 0.7, (61, 37, 3))
    out = imageio.resize_max_side(img, 13)
    assert out.min() >= img.min() and out.max() <= img.max()


def test_resize_halving_averages_pairs():
    # with half-pixel centers, a 2x reduction samples midway between neighbours
    row = np.array([0.0, 1.0, 0.2, 0.6])
    img = np.repeat(np.repeat(row[None, :, None], 2, axis=0), 3, axis=2)
    out = imageio.resize(img, 1, 2)
    np.testing.assert_allclose(out[0, :, 0], [0.5, 0.4], atol=1e-15)


def test_resize_rejects_zero_side():
    with pytest.raises(ValueError):
        imageio.resize_max_side(np.zeros((2, 2, 3)), 0)


def test_save_gray(tmp_path):
    path = tmp_path / "g.png"
    imageio.save_gray(np.array([[0.0, 0.5], [1.0, 0.25]]), path)
    with Image.open(path) as im:
        assert im.mode == "L"
        np.testing.assert_array_equal(np.asarray(im), [[0, 128], [255, 64]])
