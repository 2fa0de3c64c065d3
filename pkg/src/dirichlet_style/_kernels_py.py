"""Pure numpy implementations of the per-pixel row kernels.

These are the reference versions; ``_ckernels`` provides compiled
equivalents with the same signatures. All inputs are 2-D float64 arrays.
"""

import numpy as np


def stick_break_forward(v):
    p, k = v.shape
    s = np.empty_like(v)
    rest = np.ones(p)
    for j in range(k - 1):
        s[:, j] = v[:, j] * rest
        rest = rest * (1.0 - v[:, j])
    s[:, k - 1] = rest
    return s


def stick_break_backward(v, grad_s):
    p, k = v.shape
    # recompute the remaining-stick lengths before each break
    rest = np.empty((p, k))
    rest[:, 0] = 1.0
    for j in range(1, k):
        rest[:, j] = rest[:, j - 1] * (1.0 - v[:, j - 1])
    grad_v = np.zeros_like(v)
    g_rest = grad_s[:, k - 1].copy()
    for j in range(k - 2, -1, -1):
        grad_v[:, j] = (grad_s[:, j] - g_rest) * rest[:, j]
        g_rest = grad_s[:, j] * v[:, j] + g_rest * (1.0 - v[:, j])
    return grad_v


def row_entropies(s):
    """Shannon entropy (natural log) of each L1-normalized row.

    Rows summing to zero get entropy 0.
    """
    total = s.sum(axis=1)
    safe = np.where(total > 0.0, total, 1.0)
    q = s / safe[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(q > 0.0, q * np.log(q), 0.0)
    return np.where(total > 0.0, -terms.sum(axis=1), 0.0)


def row_entropies_backward(s, grad_rows):
    total = s.sum(axis=1)
    safe = np.where(total > 0.0, total, 1.0)
    q = s / safe[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        logq = np.where(q > 0.0, np.log(q), 0.0)
    h = -(q * logq).sum(axis=1)
    g = (-logq - h[:, None]) / safe[:, None]
    # zero coordinates sit on the boundary where the derivative diverges
    g = np.where((q > 0.0) & (total[:, None] > 0.0), g, 0.0)
    return g * grad_rows[:, None]


def row_norms(x):
    return np.sqrt(np.einsum("ij,ij->i", x, x))


def row_norms_backward(x, grad_rows):
    n = row_norms(x)
    safe = np.where(n > 0.0, n, 1.0)
    return np.where(n[:, None] > 0.0, x / safe[:, None], 0.0) * grad_rows[:, None]


def sigmoid(x):
    # tanh form never overflows
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def softplus(x):
    return np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))
