"""One-shot training and stylization.

Typical use::

    cfg = TrainConfig(seed=0)
    ckpt = train(content, style, cfg)
    out = stylize(ckpt, content, style)
"""

import json
import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import imageio, losses, model, wct
from .config import TrainConfig
from .losses import LossBreakdown

log = logging.getLogger(__name__)

CHECKPOINT_VERSION = 1
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


class CompatibilityError(ValueError):
    pass


@dataclass
class AdamState:
    m: dict
    v: dict
    t: int = 0

    @classmethod
    def zeros_like(cls, params):
        return cls(
            m={k: np.zeros_like(p) for k, p in params.items()},
            v={k: np.zeros_like(p) for k, p in params.items()},
        )


def adam_step(params, grads, state, lr):
    """One bias-corrected Adam update. Returns new ``(params, state)``."""
    t = state.t + 1
    bc1 = 1.0 - ADAM_BETA1**t
    bc2 = 1.0 - ADAM_BETA2**t
    new_params, new_m, new_v = {}, {}, {}
    for name, p in params.items():
        g = grads[name]
        if g.shape != p.shape:
            raise ValueError(f"gradient for {name!r} has shape {g.shape}, expected {p.shape}")
        m = ADAM_BETA1 * state.m[name] + (1.0 - ADAM_BETA1) * g
        v = ADAM_BETA2 * state.v[name] + (1.0 - ADAM_BETA2) * (g * g)
        new_params[name] = p - lr * (m / bc1) / (np.sqrt(v / bc2) + ADAM_EPS)
        new_m[name] = m
        new_v[name] = v
    return new_params, AdamState(m=new_m, v=new_v, t=t)


@dataclass
class Checkpoint:
    params: dict
    config: TrainConfig
    content_mean: np.ndarray
    style_mean: np.ndarray
    breakdown: LossBreakdown
    iterations: int
    history: list = field(default_factory=list, repr=False)


def preprocess(img):
    """Unfold H x W x 3 to (H*W) x 3 (row = y*W + x) and remove channel means."""
    img = imageio.check_image(img)
    pixels = img.reshape(-1, 3)
    mean = pixels.mean(axis=0)
    return pixels - mean, mean


def fold(pixels, height, width):
    return np.asarray(pixels).reshape(height, width, 3)


def psnr(a, b):
    mse = float(np.mean((np.asarray(a) - np.asarray(b)) ** 2))
    if mse == 0.0:
        return float("inf")
    return 10.0 * np.log10(1.0 / mse)


def _check_k(cfg):
    if cfg.k != model.K:
        raise CompatibilityError(f"model is built for k={model.K}, config has k={cfg.k}")


def train(content, style, cfg=None, on_step=None):
    """Fit the network to one content/style pair.

    Full-batch Adam over every pixel of both downsampled images. Training
    stops after ``cfg.max_iters`` steps, or once ``recon_l21`` has not
    improved by a relative ``cfg.min_rel_improvement`` for ``cfg.patience``
    consecutive steps. The parameters with the lowest ``recon_l21`` seen are
    returned. ``on_step(step, breakdown)`` is called once per evaluation.
    """
    cfg = cfg or TrainConfig()
    _check_k(cfg)
    small_c = imageio.resize_max_side(imageio.check_image(content), cfg.train_max_side)
    small_s = imageio.resize_max_side(imageio.check_image(style), cfg.train_max_side)
    for label, img in (("content", small_c), ("style", small_s)):
        pixels = img.reshape(-1, 3)
        if np.all(pixels == pixels[0]):
            warnings.warn(f"{label} image has a single color", RuntimeWarning)
    x_c, mean_c = preprocess(small_c)
    x_s, mean_s = preprocess(small_s)

    params = model.init_params(cfg.seed)
    state = AdamState.zeros_like(params)
    best_params, best_bd = params, None
    reference = np.inf
    stale = 0
    history = []
    step = 0
    for step in range(cfg.max_iters):
        bd, grads = losses.loss_and_grads(params, x_c, x_s, cfg, step=step)
        history.append(bd)
        if on_step is not None:
            on_step(step, bd)
        if best_bd is None or bd.recon_l21 < best_bd.recon_l21:
            best_params, best_bd = params, bd
        if bd.recon_l21 < reference * (1.0 - cfg.min_rel_improvement):
            reference = bd.recon_l21
            stale = 0
        else:
            stale += 1
            if stale >= cfg.patience:
                log.info("stopping at step %d: no relative improvement for %d steps", step, stale)
                break
        params, state = adam_step(params, grads, state, cfg.learning_rate)

    return Checkpoint(
        params={k: v.copy() for k, v in best_params.items()},
        config=cfg,
        content_mean=mean_c,
        style_mean=mean_s,
        breakdown=best_bd,
        iterations=step + 1,
        history=history,
    )


def _encode_image(ckpt, img):
    x, mean = preprocess(img)
    return model.encode(ckpt.params, x).s, mean


def reconstruct(ckpt, img, branch):
    """Encode ``img`` and decode it through ``branch`` using its own means."""
    img = imageio.check_image(img)
    s, mean = _encode_image(ckpt, img)
    out = model.decode(ckpt.params, branch, s) + mean
    return fold(np.clip(out, 0.0, 1.0), *img.shape[:2])


def stylize(ckpt, content, style, eps=None, renormalize=None):
    """Transfer the color style of ``style`` onto ``content`` at full resolution."""
    _check_k(ckpt.config)
    content = imageio.check_image(content)
    style = imageio.check_image(style)
    eps = ckpt.config.eps_wct if eps is None else eps
    renormalize = ckpt.config.renormalize_wct if renormalize is None else renormalize
    s_c, _ = _encode_image(ckpt, content)
    s_s, style_mean = _encode_image(ckpt, style)
    s_cs = wct.wct_transfer(s_c, s_s, eps, renormalize=renormalize)
    out = model.decode(ckpt.params, "style", s_cs) + style_mean
    return fold(np.clip(out, 0.0, 1.0), *content.shape[:2])


def abundance_maps(ckpt, img):
    """Unscaled H x W x k abundance cube of ``img``."""
    img = imageio.check_image(img)
    s, _ = _encode_image(ckpt, img)
    return s.reshape(img.shape[0], img.shape[1], -1)


def export_abundance(ckpt, img):
    """One H x W map per abundance column, scaled so [0, column max] -> [0, 1]."""
    cube = abundance_maps(ckpt, img)
    maps = []
    for j in range(cube.shape[2]):
        col = cube[:, :, j]
        peak = col.max()
        maps.append(col / peak if peak > 0.0 else np.zeros_like(col))
    return maps


def save_checkpoint(ckpt, path):
    meta = {
        "version": CHECKPOINT_VERSION,
        "config": ckpt.config.to_dict(),
        "breakdown": {
            "recon_l21": ckpt.breakdown.recon_l21,
            "sparse_h": ckpt.breakdown.sparse_h,
            "mi": ckpt.breakdown.mi,
            "weight_decay": ckpt.breakdown.weight_decay,
            "total": ckpt.breakdown.total,
        },
        "iterations": ckpt.iterations,
    }
    arrays = {f"param/{k}": v for k, v in ckpt.params.items()}
    arrays["content_mean"] = np.asarray(ckpt.content_mean, dtype=np.float64)
    arrays["style_mean"] = np.asarray(ckpt.style_mean, dtype=np.float64)
    arrays["meta"] = np.array(json.dumps(meta, sort_keys=True))
    with open(path, "wb") as fh:
        np.savez(fh, **arrays)


def load_checkpoint(path):
    with np.load(path, allow_pickle=False) as data:
        meta = json.loads(str(data["meta"]))
        if meta.get("version") != CHECKPOINT_VERSION:
            raise CompatibilityError(f"unsupported checkpoint version {meta.get('version')!r}")
        params = {k[len("param/"):]: data[k].copy() for k in data.files if k.startswith("param/")}
        content_mean = data["content_mean"].copy()
        style_mean = data["style_mean"].copy()
    cfg = TrainConfig.from_dict(meta["config"])
    _check_k(cfg)
    model.check_params(params)
    return Checkpoint(
        params=params,
        config=cfg,
        content_mean=content_mean,
        style_mean=style_mean,
        breakdown=LossBreakdown(**meta["breakdown"]),
        iterations=int(meta["iterations"]),
    )
