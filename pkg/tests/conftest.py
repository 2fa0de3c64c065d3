import numpy as np
import pytest

from dirichlet_style import kernels


def central_difference(f, x, h=1e-5):
    """Numerical gradient of scalar ``f`` at array ``x`` (modified in place, restored)."""
    grad = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        orig = x[idx]
        x[idx] = orig + h
        fp = f()
        x[idx] = orig - h
        fm = f()
        x[idx] = orig
        grad[idx] = (fp - fm) / (2.0 * h)
    return grad


def max_rel_error(analytic, numeric, floor=1e-6):
    """Entrywise |a - n| / max(|a|, |n|, floor), maximized."""
    analytic = np.asarray(analytic)
    numeric = np.asarray(numeric)
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return float(np.max(np.abs(analytic - numeric) / denom))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    previous = kernels.BACKEND
    kernels.use_backend(request.param)
    yield request.param
    kernels.use_backend(previous)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
