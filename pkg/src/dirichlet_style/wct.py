"""Whitening-coloring transform on abundance matrices.

The content abundances are centered, whitened with their own covariance
and re-colored with the style covariance and mean. Eigendecompositions use
a cyclic Jacobi solver; with k = 10 columns that is a few hundred rotations.
"""

from dataclasses import dataclass

import numpy as np


class DegenerateInputError(ValueError):
    pass


class ConvergenceError(ArithmeticError):
    pass


@dataclass(frozen=True)
class WctStats:
    mean: np.ndarray  # 1 x k
    covariance: np.ndarray  # k x k
    eigenvalues: np.ndarray  # k, descending, clamped at 0
    eigenvectors: np.ndarray  # k x k, columns are eigenvectors


def sym_eig(c, tol=1e-15, max_sweeps=100):
    """Eigenvalues (descending) and eigenvectors (as columns) of symmetric ``c``.

    Cyclic Jacobi with the usual threshold-free rotation order. Input must
    be symmetric within 1e-9 (relative); it is symmetrized before use.
    """
    a = np.array(c, dtype=np.float64)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise ValueError(f"sym_eig: expected a square matrix, got {a.shape}")
    scale = max(np.abs(a).max(), 1.0)
    if np.abs(a - a.T).max() > 1e-9 * scale:
        raise ValueError("sym_eig: matrix is not symmetric")
    a = 0.5 * (a + a.T)
    v = np.eye(n)

    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off <= tol * max(np.sqrt(np.sum(a * a)), np.finfo(float).tiny):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                cs = 1.0 / np.sqrt(t * t + 1.0)
                sn = t * cs
                # a <- J^T a J with J the (p, q) rotation
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = cs * ap - sn * aq
                a[:, q] = sn * ap + cs * aq
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = cs * ap - sn * aq
                a[q, :] = sn * ap + cs * aq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = cs * vp - sn * vq
                v[:, q] = sn * vp + cs * vq
    else:
        raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")

    d = np.diag(a).copy()
    order = np.argsort(-d, kind="stable")
    return d[order], v[:, order]


def compute_stats(s):
    s = np.asarray(s, dtype=np.float64)
    if s.ndim != 2 or s.shape[0] < 2:
        raise DegenerateInputError(f"need at least 2 rows to estimate a covariance, got {s.shape}")
    mean = s.mean(axis=0, keepdims=True)
    centered = s - mean
    cov = centered.T @ centered / (s.shape[0] - 1)
    cov = 0.5 * (cov + cov.T)
    d, e = sym_eig(cov)
    return WctStats(mean=mean, covariance=cov, eigenvalues=np.maximum(d, 0.0), eigenvectors=e)


def whiten(s, stats, eps):
    """Centered ``s`` mapped through E·diag(d + eps)^(-1/2)·E^T."""
    e = stats.eigenvectors
    return (s - stats.mean) @ (e * (stats.eigenvalues + eps) ** -0.5) @ e.T


def color(white, stats):
    """Impose the covariance and mean of ``stats`` on whitened rows."""
    e = stats.eigenvectors
    return white @ (e * np.sqrt(stats.eigenvalues)) @ e.T + stats.mean


def project_to_simplex_rows(s):
    """Clamp negatives to zero and renormalize each row to sum to one."""
    out = np.maximum(s, 0.0)
    total = out.sum(axis=1, keepdims=True)
    k = s.shape[1]
    return np.where(total > 0.0, out / np.where(total > 0.0, total, 1.0), 1.0 / k)


def wct_transfer(s_c, s_s, eps=1e-5, renormalize=False, style_stats=None):
    """Match the column mean and covariance of ``s_c`` to those of ``s_s``.

    The result is not projected back onto the simplex unless ``renormalize``
    is set. ``style_stats`` may be passed to reuse precomputed statistics.
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    s_c = np.asarray(s_c, dtype=np.float64)
    s_s = np.asarray(s_s, dtype=np.float64)
    if s_c.ndim != 2 or s_s.ndim != 2 or s_c.shape[1] != s_s.shape[1]:
        raise ValueError(f"column counts differ: {s_c.shape} vs {s_s.shape}")
    content_stats = compute_stats(s_c)
    if style_stats is None:
        style_stats = compute_stats(s_s)
    out = color(whiten(s_c, content_stats, eps), style_stats)
    if renormalize:
        out = project_to_simplex_rows(out)
    return out
