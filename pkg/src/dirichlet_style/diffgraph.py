"""A small reverse-mode differentiation engine over dense float64 matrices.

Only the operations the model needs are provided. Every value is a 2-D
``numpy.ndarray``; scalars are 1x1 matrices. Build a graph with the
functions below, then call :func:`backward` on a scalar node to get the
gradient of every parameter node.

Example::

    x = parameter(np.zeros((2, 3)), "x")
    loss = softplus_mean(x)
    grads = backward(loss)      # {"x": array of 1/6 * sigmoid(0)}
"""

import numpy as np

from . import kernels


class ShapeError(ValueError):
    pass


class DomainError(ValueError):
    pass


class Node:
    """One vertex of the computation graph."""

    __slots__ = ("op", "parents", "value", "adjoint", "name", "_backward")

    def __init__(self, op, value, parents=(), backward_fn=None, name=None):
        self.op = op
        self.value = value
        self.parents = tuple(parents)
        self.adjoint = None
        self.name = name
        self._backward = backward_fn

    @property
    def shape(self):
        return self.value.shape

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"<Node {self.op}{label} {self.value.shape[0]}x{self.value.shape[1]}>"

    def _accumulate(self, grad, fresh=True):
        # fresh=False when grad aliases another node's adjoint
        if self.adjoint is None:
            self.adjoint = grad if fresh else np.array(grad, dtype=np.float64, copy=True)
        else:
            self.adjoint += grad


def _as_matrix(value):
    arr = np.asarray(value, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError(f"expected a non-empty 2-D matrix, got shape {arr.shape}")
    return arr


def constant(value, name=None):
    """A leaf that receives no gradient (data or a constant)."""
    return Node("input", _as_matrix(value), name=name)


def parameter(value, name):
    return Node("parameter", _as_matrix(value), name=name)


def matmul(a, b):
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul: inner dimensions differ, {a.shape} x {b.shape}")
    out = Node("matmul", a.value @ b.value, (a, b))

    def bw():
        g = out.adjoint
        a._accumulate(g @ b.value.T)
        b._accumulate(a.value.T @ g)

    out._backward = bw
    return out


def add_rowbias(x, bias):
    """x + 1·bias with bias a 1 x cols row broadcast over every row."""
    if bias.shape != (1, x.shape[1]):
        raise ShapeError(f"add_rowbias: bias {bias.shape} does not fit {x.shape}")
    out = Node("add-rowbias", x.value + bias.value, (x, bias))

    def bw():
        g = out.adjoint
        x._accumulate(g, fresh=False)
        bias._accumulate(g.sum(axis=0, keepdims=True))

    out._backward = bw
    return out


def concat_cols(*nodes):
    rows = {n.shape[0] for n in nodes}
    if len(rows) != 1:
        raise ShapeError(f"concat_cols: row counts differ, {[n.shape for n in nodes]}")
    out = Node("concat-cols", np.concatenate([n.value for n in nodes], axis=1), nodes)

    def bw():
        g = out.adjoint
        start = 0
        for n in nodes:
            stop = start + n.shape[1]
            n._accumulate(g[:, start:stop], fresh=False)
            start = stop

    out._backward = bw
    return out


def sigmoid_value(x):
    """1 / (1 + exp(-x)), overflow-safe."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 2:
        return kernels.sigmoid(x.reshape(1, -1)).reshape(x.shape)
    return kernels.sigmoid(x)


def softplus_value(x):
    """log(1 + exp(x)) as max(x, 0) + log(1 + exp(-|x|))."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 2:
        return kernels.softplus(x.reshape(1, -1)).reshape(x.shape)
    return kernels.softplus(x)


def sigmoid(x):
    y = sigmoid_value(x.value)
    out = Node("sigmoid", y, (x,))

    def bw():
        x._accumulate(out.adjoint * y * (1.0 - y))

    out._backward = bw
    return out


def softplus(x):
    out = Node("softplus", softplus_value(x.value), (x,))

    def bw():
        x._accumulate(out.adjoint * sigmoid_value(x.value))

    out._backward = bw
    return out


def tanh(x):
    y = np.tanh(x.value)
    out = Node("tanh", y, (x,))

    def bw():
        x._accumulate(out.adjoint * (1.0 - y * y))

    out._backward = bw
    return out


def power(base, exponent):
    """base ** exponent entrywise; exponent is a column broadcast across columns.

    ``exponent`` may also have the same shape as ``base``.
    """
    b = base.value
    e = exponent.value
    if e.shape != b.shape and e.shape != (b.shape[0], 1):
        raise ShapeError(f"power: exponent {e.shape} does not fit base {b.shape}")
    if np.any(b <= 0.0):
        raise DomainError("power: base entries must be strictly positive")
    y = np.exp(e * np.log(b))
    out = Node("elementwise-pow", y, (base, exponent))

    def bw():
        g = out.adjoint
        base._accumulate(g * e * y / b)
        ge = g * y * np.log(b)
        if e.shape != b.shape:
            ge = ge.sum(axis=1, keepdims=True)
        exponent._accumulate(ge)

    out._backward = bw
    return out


def _check_same(opname, a, b):
    if a.shape != b.shape:
        raise ShapeError(f"{opname}: shapes differ, {a.shape} vs {b.shape}")


def mul(a, b):
    _check_same("mul", a, b)
    out = Node("elementwise-mul", a.value * b.value, (a, b))

    def bw():
        g = out.adjoint
        a._accumulate(g * b.value)
        b._accumulate(g * a.value)

    out._backward = bw
    return out


def subtract(a, b):
    _check_same("subtract", a, b)
    out = Node("subtract", a.value - b.value, (a, b))

    def bw():
        g = out.adjoint
        a._accumulate(g, fresh=False)
        b._accumulate(-g)

    out._backward = bw
    return out


def clip(x, lo, hi):
    """Clamp into [lo, hi]; gradient passes only where x was inside."""
    inside = (x.value >= lo) & (x.value <= hi)
    out = Node("clip", np.clip(x.value, lo, hi), (x,))

    def bw():
        x._accumulate(np.where(inside, out.adjoint, 0.0))

    out._backward = bw
    return out


def stick_break(v):
    """Stick-breaking map from fractions v (p x k) to simplex rows (p x k).

    The last column is the remaining stick, so column k of ``v`` is unused.
    """
    vv = np.ascontiguousarray(v.value)
    out = Node("stick-break", kernels.stick_break_forward(vv), (v,))

    def bw():
        g = np.ascontiguousarray(out.adjoint)
        v._accumulate(kernels.stick_break_backward(vv, g))

    out._backward = bw
    return out


def row_l21(x):
    """Sum over rows of the Euclidean row norm, as a 1x1 node."""
    xx = np.ascontiguousarray(x.value)
    out = Node("row-l21", np.array([[kernels.row_norms(xx).sum()]]), (x,))

    def bw():
        g = np.full(xx.shape[0], out.adjoint[0, 0])
        x._accumulate(kernels.row_norms_backward(xx, g))

    out._backward = bw
    return out


def entropy_h1(s):
    """Sum over rows of the entropy of each L1-normalized row, as 1x1."""
    ss = np.ascontiguousarray(s.value)
    out = Node("entropy-h1", np.array([[kernels.row_entropies(ss).sum()]]), (s,))

    def bw():
        g = np.full(ss.shape[0], out.adjoint[0, 0])
        s._accumulate(kernels.row_entropies_backward(ss, g))

    out._backward = bw
    return out


def softplus_mean(x, sign=1.0):
    """mean(softplus(sign * x)) over all entries, as 1x1."""
    z = sign * x.value
    out = Node("softplus-mean", np.array([[softplus_value(z).mean()]]), (x,))

    def bw():
        g = out.adjoint[0, 0] / z.size
        x._accumulate(g * sign * sigmoid_value(z))

    out._backward = bw
    return out


def frob_sq(*nodes):
    """Sum of squared entries over all given nodes, as 1x1."""
    total = sum(float(np.sum(n.value * n.value)) for n in nodes)
    out = Node("frob-sq", np.array([[total]]), nodes)

    def bw():
        g = out.adjoint[0, 0]
        for n in nodes:
            n._accumulate(2.0 * g * n.value)

    out._backward = bw
    return out


def scalar_combine(nodes, coeffs):
    """sum_i coeffs[i] * nodes[i] over 1x1 nodes."""
    if len(nodes) != len(coeffs):
        raise ValueError("scalar_combine: one coefficient per node")
    for n in nodes:
        if n.shape != (1, 1):
            raise ShapeError(f"scalar_combine: expected 1x1 operands, got {n.shape}")
    total = sum(c * n.value[0, 0] for n, c in zip(nodes, coeffs))
    out = Node("scalar-combine", np.array([[total]]), nodes)

    def bw():
        g = out.adjoint[0, 0]
        for n, c in zip(nodes, coeffs):
            n._accumulate(np.array([[c * g]]))

    out._backward = bw
    return out


def _topological_order(root):
    order = []
    visited = set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in reversed(node.parents):
            if id(parent) not in visited:
                stack.append((parent, False))
    return order


def backward(loss):
    """Back-propagate from a 1x1 ``loss`` node.

    Returns a dict mapping the name of every parameter node reachable from
    ``loss`` to its gradient (zeros when no path carries an adjoint).
    """
    if loss.shape != (1, 1):
        raise ShapeError(f"backward: loss must be 1x1, got {loss.shape}")
    order = _topological_order(loss)
    for node in order:
        node.adjoint = None
    loss.adjoint = np.ones((1, 1))
    for node in reversed(order):
        if node._backward is not None and node.adjoint is not None:
            node._backward()
    grads = {}
    for node in order:
        if node.op == "parameter":
            grads[node.name] = (
                node.adjoint if node.adjoint is not None else np.zeros_like(node.value)
            )
    return grads
