"""Training objective: L2,1 reconstruction, entropy sparsity, mutual term, decay.

    total = recon_l21 + alpha * sparse_h - lam * mi + mu * weight_decay

``mi`` is the negative-sample-free Jensen-Shannon term: for each image the
per-pixel mean of ``-softplus(-T(pixel, abundance))``. It is always <= 0.
"""

import math
import warnings
from dataclasses import astuple, dataclass

import numpy as np

from . import diffgraph as dg
from . import kernels
from . import model

CSV_HEADER = "iter,recon_l21,sparse_h,mi,weight_decay,total"


class TrainingError(RuntimeError):
    """Raised when the objective becomes non-finite."""

    def __init__(self, message, step=None, breakdown=None):
        super().__init__(message)
        self.step = step
        self.breakdown = breakdown


@dataclass(frozen=True)
class LossBreakdown:
    recon_l21: float
    sparse_h: float
    mi: float
    weight_decay: float
    total: float

    def csv_row(self, step):
        return f"{step}," + ",".join(repr(float(v)) for v in astuple(self))


def l21(residual):
    residual = np.ascontiguousarray(residual, dtype=np.float64)
    return float(kernels.row_norms(residual).sum())


def entropy_h1(s):
    s = np.ascontiguousarray(s, dtype=np.float64)
    empty = int(np.count_nonzero(s.sum(axis=1) <= 0.0))
    if empty:
        warnings.warn(f"{empty} all-zero abundance rows counted as entropy 0", RuntimeWarning)
    return float(kernels.row_entropies(s).sum())


def sparse_loss(s_c, s_s):
    return entropy_h1(s_c) + entropy_h1(s_s)


def mi_objective(params, i_c, s_c, i_s, s_s):
    t_c = model.critic_score(params, i_c, s_c)
    t_s = model.critic_score(params, i_s, s_s)
    return float(-dg.softplus_value(-t_c).mean() - dg.softplus_value(-t_s).mean())


def objective_graph(nodes, i_c, i_s, alpha, lam, mu):
    """Build the full objective over parameter ``nodes``.

    Returns ``(total, terms)`` where ``terms`` holds the 1x1 nodes of the
    four components in breakdown order.
    """
    x_c = dg.constant(i_c)
    x_s = dg.constant(i_s)
    s_c = model.encoder_graph(nodes, x_c)[3]
    s_s = model.encoder_graph(nodes, x_s)[3]

    recon = dg.scalar_combine(
        [
            dg.row_l21(dg.subtract(model.decoder_graph(nodes, "content", s_c), x_c)),
            dg.row_l21(dg.subtract(model.decoder_graph(nodes, "style", s_s), x_s)),
        ],
        [1.0, 1.0],
    )
    sparse = dg.scalar_combine([dg.entropy_h1(s_c), dg.entropy_h1(s_s)], [1.0, 1.0])
    mi = dg.scalar_combine(
        [
            dg.softplus_mean(model.critic_graph(nodes, x_c, s_c), sign=-1.0),
            dg.softplus_mean(model.critic_graph(nodes, x_s, s_s), sign=-1.0),
        ],
        [-1.0, -1.0],
    )
    decay = dg.frob_sq(*(nodes[name] for name in model.DECODER_PARAMS))
    terms = (recon, sparse, mi, decay)
    total = dg.scalar_combine(list(terms), [1.0, alpha, -lam, mu])
    return total, terms


def _breakdown(total, terms, step):
    values = [float(t.value[0, 0]) for t in terms]
    bd = LossBreakdown(*values, total=float(total.value[0, 0]))
    names = ("recon_l21", "sparse_h", "mi", "weight_decay", "total")
    for name, value in zip(names, astuple(bd)):
        if not math.isfinite(value):
            where = f" at step {step}" if step is not None else ""
            raise TrainingError(f"non-finite {name}{where}: {bd}", step=step, breakdown=bd)
    return bd


def total_loss(params, i_c, i_s, cfg, step=None):
    """Evaluate the objective; ``cfg`` needs ``alpha``, ``lam`` and ``mu``."""
    nodes = model.as_nodes(params, trainable=False)
    total, terms = objective_graph(nodes, i_c, i_s, cfg.alpha, cfg.lam, cfg.mu)
    return _breakdown(total, terms, step)


def loss_and_grads(params, i_c, i_s, cfg, step=None):
    """Objective breakdown plus the gradient of ``total`` for every parameter."""
    nodes = model.as_nodes(params, trainable=True)
    total, terms = objective_graph(nodes, i_c, i_s, cfg.alpha, cfg.lam, cfg.mu)
    bd = _breakdown(total, terms, step)
    grads = dg.backward(total)
    return bd, grads
