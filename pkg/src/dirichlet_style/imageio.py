"""Image loading, saving and resampling.

Images are ``float64`` arrays of shape (height, width, 3) with values in
[0, 1]. sRGB values are used as-is, without linearization.
"""

import numpy as np
from PIL import Image, UnidentifiedImageError


class ImageFormatError(ValueError):
    pass


def check_image(img):
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ImageFormatError(f"expected an H x W x 3 image, got shape {img.shape}")
    if img.shape[0] < 1 or img.shape[1] < 1:
        raise ImageFormatError(f"empty image of shape {img.shape}")
    if not np.all(np.isfinite(img)) or img.min() < 0.0 or img.max() > 1.0:
        raise ImageFormatError("image values must be finite and within [0, 1]")
    return img


def load_image(path):
    """Read a PNG or JPEG; grayscale is promoted to RGB and alpha is dropped."""
    try:
        with Image.open(path) as im:
            if im.mode in ("I;16", "I;16B", "I;16L", "I", "F"):
                raise OSError(f"unsupported image mode {im.mode}")
            rgb = im.convert("RGB")
            data = np.asarray(rgb, dtype=np.float64)
    except (OSError, UnidentifiedImageError) as exc:
        raise OSError(f"cannot read image {path}: {exc}") from exc
    return data / 255.0


def to_bytes(img):
    """Quantize to uint8 with round-half-to-even."""
    img = check_image(img)
    return np.rint(img * 255.0).astype(np.uint8)


def save_image(img, path):
    """Write an RGB image as 8-bit PNG."""
    data = to_bytes(img)
    try:
        Image.fromarray(data).save(path, format="PNG")
    except OSError as exc:
        raise OSError(f"cannot write image {path}: {exc}") from exc


def save_gray(values, path):
    """Write a 2-D array in [0, 1] as an 8-bit grayscale PNG."""
    values = np.asarray(values, dtype=np.float64)
    data = np.rint(np.clip(values, 0.0, 1.0) * 255.0).astype(np.uint8)
    try:
        Image.fromarray(data).save(path, format="PNG")
    except OSError as exc:
        raise OSError(f"cannot write image {path}: {exc}") from exc


def _bilinear_weights(n_in, n_out):
    # half-pixel-centered sampling positions, clamped to the valid range
    pos = (np.arange(n_out) + 0.5) * (n_in / n_out) - 0.5
    pos = np.clip(pos, 0.0, n_in - 1)
    lo = np.floor(pos).astype(int)
    hi = np.minimum(lo + 1, n_in - 1)
    frac = pos - lo
    return lo, hi, frac


def resize_max_side(img, max_side):
    """Bilinear downsampling so that max(height, width) <= ``max_side``.

    The aspect ratio is kept (sizes rounded to the nearest pixel). Images
    already within the bound are returned unchanged.
    """
    if max_side < 1:
        raise ValueError("max_side must be >= 1")
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape[:2]
    if max(h, w) <= max_side:
        return img
    scale = max_side / max(h, w)
    new_h = max(1, int(round(h * scale)))
    new_w = max(1, int(round(w * scale)))
    return resize(img, new_h, new_w)


def resize(img, new_h, new_w):
    """Separable bilinear resampling; output stays within the input range."""
    y0, y1, fy = _bilinear_weights(img.shape[0], new_h)
    x0, x1, fx = _bilinear_weights(img.shape[1], new_w)
    fy = fy[:, None, None]
    rows = img[y0] * (1.0 - fy) + img[y1] * fy
    fx = fx[None, :, None]
    out = rows[:, x0] * (1.0 - fx) + rows[:, x1] * fx
    return np.clip(out, img.min(), img.max())
