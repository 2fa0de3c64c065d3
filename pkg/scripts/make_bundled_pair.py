"""Regenerate the bundled 128 px content/style pair.

Two synthetic landscapes (sky, sun, hills, water, grass) share a layout
but differ in palette: a daylight content scene and a sunset style scene.

    python scripts/make_bundled_pair.py src/dirichlet_style/data
"""

import sys
from pathlib import Path

import numpy as np

from dirichlet_style.imageio import save_image


def _smooth_noise(rng, h, w, cells):
    coarse = rng.normal(size=(cells + 1, cells + 1))
    ys = np.linspace(0, cells, h)
    xs = np.linspace(0, cells, w)
    y0 = np.minimum(ys.astype(int), cells - 1)
    x0 = np.minimum(xs.astype(int), cells - 1)
    fy = (ys - y0)[:, None]
    fx = (xs - x0)[None, :]
    a = coarse[y0][:, x0]
    b = coarse[y0][:, x0 + 1]
    c = coarse[y0 + 1][:, x0]
    d = coarse[y0 + 1][:, x0 + 1]
    return (a * (1 - fx) + b * fx) * (1 - fy) + (c * (1 - fx) + d * fx) * fy


def landscape(h, w, palette, seed):
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:h, 0:w] / np.array([h, w])[:, None, None]
    img = np.zeros((h, w, 3))

    t = yy[..., None] / 0.6
    sky = palette["sky_top"] * (1 - t) + palette["sky_horizon"] * t
    img[:] = sky

    sun = np.exp(-(((xx - 0.72) ** 2 + (yy - 0.22) ** 2) / 0.004))[..., None]
    img = img * (1 - sun) + palette["sun"] * sun

    clouds = np.clip(_smooth_noise(rng, h, w, 6) - 0.6, 0, 1)[..., None] * (yy < 0.45)[..., None]
    img = img * (1 - 0.6 * clouds) + palette["cloud"] * 0.6 * clouds

    ridge = 0.45 + 0.08 * np.sin(6.0 * xx + 1.0) + 0.03 * _smooth_noise(rng, h, w, 8)
    hills = (yy > ridge)[..., None]
    shade = (0.85 + 0.15 * _smooth_noise(rng, h, w, 10))[..., None]
    img = np.where(hills, palette["hill"] * shade, img)

    water = ((yy > 0.62) & (yy < 0.78))[..., None]
    ripple = (0.9 + 0.1 * np.sin(60 * yy + 4 * _smooth_noise(rng, h, w, 5)))[..., None]
    img = np.where(water, palette["water"] * ripple, img)

    grass = (yy >= 0.78)[..., None]
    tex = (0.8 + 0.2 * _smooth_noise(rng, h, w, 16))[..., None]
    img = np.where(grass, palette["grass"] * tex, img)

    img += 0.01 * rng.normal(size=img.shape)
    return np.clip(img, 0.0, 1.0)


DAY = {
    "sky_top": np.array([0.20, 0.45, 0.85]),
    "sky_horizon": np.array([0.70, 0.85, 0.97]),
    "sun": np.array([1.00, 0.98, 0.85]),
    "cloud": np.array([0.95, 0.95, 0.97]),
    "hill": np.array([0.35, 0.42, 0.38]),
    "water": np.array([0.15, 0.40, 0.60]),
    "grass": np.array([0.30, 0.60, 0.20]),
}

SUNSET = {
    "sky_top": np.array([0.25, 0.12, 0.40]),
    "sky_horizon": np.array([0.98, 0.55, 0.25]),
    "sun": np.array([1.00, 0.85, 0.45]),
    "cloud": np.array([0.85, 0.40, 0.45]),
    "hill": np.array([0.22, 0.12, 0.20]),
    "water": np.array([0.55, 0.30, 0.35]),
    "grass": np.array([0.35, 0.25, 0.12]),
}


def main(out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_image(landscape(96, 128, DAY, seed=1), out / "content.png")
    save_image(landscape(128, 128, SUNSET, seed=2), out / "style.png")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "src/dirichlet_style/data")
