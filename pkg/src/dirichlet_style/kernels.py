"""Backend selection for the per-pixel row kernels.

The compiled extension is used when it imports; otherwise the numpy
fallback is used. Kernels the extension does not define (the elementwise
transcendentals, where numpy's vectorized loops are already faster) always
come from the fallback. Set ``DIRICHLET_STYLE_KERNELS=python`` to force the
fallback (useful for benchmarking and for checking the two agree).
"""

import os

from . import _kernels_py

_FUNCS = (
    "stick_break_forward",
    "stick_break_backward",
    "row_entropies",
    "row_entropies_backward",
    "row_norms",
    "row_norms_backward",
    "sigmoid",
    "softplus",
)


def _load(name):
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown kernel backend {name!r}")


def _default_backend():
    requested = os.environ.get("DIRICHLET_STYLE_KERNELS", "").strip().lower()
    if requested:
        return requested
    try:
        _load("cython")
    except ImportError:
        return "python"
    return "cython"


BACKEND = None


def use_backend(name):
    """Switch the active backend ("cython" or "python") process-wide."""
    global BACKEND
    mod = _load(name)
    for fn in _FUNCS:
        globals()[fn] = getattr(mod, fn, getattr(_kernels_py, fn))
    BACKEND = name


def available_backends():
    names = ["python"]
    try:
        _load("cython")
    except ImportError:
        pass
    else:
        names.insert(0, "cython")
    return names


use_backend(_default_backend())
