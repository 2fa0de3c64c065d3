import math

import numpy as np
import pytest

from dirichlet_style import diffgraph as dg
from conftest import central_difference, max_rel_error


def test_matmul_identity_and_projector():
    b = dg.constant([[1.0, 2.0], [3.0, 4.0]])
    assert np.array_equal(dg.matmul(dg.constant(np.eye(2)), b).value, [[1, 2], [3, 4]])
    proj = dg.constant([[1.0, 0.0], [0.0, 0.0]])
    out = dg.matmul(proj, dg.constant([[5.0, 6.0], [7.0, 8.0]]))
    assert np.array_equal(out.value, [[5, 6], [0, 0]])


def test_matmul_shape_error_reports_both_shapes():
    with pytest.raises(dg.ShapeError, match=r"\(2, 3\).*\(2, 3\)"):
        dg.matmul(dg.constant(np.ones((2, 3))), dg.constant(np.ones((2, 3))))


def _seed_backward(node):
    """Run ``node``'s local backward with an all-ones adjoint, as for sum(node)."""
    node.adjoint = np.ones(node.shape)
    node._backward()


def test_sum_of_matmul_gradient_is_ones_times_bt(rng):
    a_val = rng.uniform(-2, 2, (3, 4))
    b_val = rng.uniform(-2, 2, (4, 2))
    a = dg.parameter(a_val, "a")
    _seed_backward(dg.matmul(a, dg.constant(b_val)))
    np.testing.assert_allclose(a.adjoint, np.ones((3, 2)) @ b_val.T, rtol=1e-12)
    numeric = central_difference(lambda: float(np.sum(a_val @ b_val)), a_val)
    assert max_rel_error(a.adjoint, numeric) < 1e-4


def test_elementwise_values():
    assert dg.softplus(dg.constant(0.0)).value[0, 0] == pytest.approx(math.log(2.0), abs=1e-15)
    assert dg.sigmoid(dg.constant(0.0)).value[0, 0] == 0.5
    half = dg.power(dg.constant(0.25), dg.constant(0.5)).value[0, 0]
    assert half == pytest.approx(0.5, abs=1e-15)


def test_power_rejects_nonpositive_base():
    with pytest.raises(dg.DomainError):
        dg.power(dg.constant([[0.5, 0.0]]), dg.constant([[2.0]]))


def test_softplus_does_not_overflow():
    x = np.linspace(-700, 700, 1001).reshape(7, -1)
    y = dg.softplus(dg.constant(x)).value
    assert np.all(np.isfinite(y))
    np.testing.assert_allclose(y[-1, -1], 700.0)
    assert y[0, 0] >= 0.0


def _sum(node):
    """sum of all entries: 1ᵀ·node·1 reduced with scalar-combine."""
    rows = dg.constant(np.ones((1, node.shape[0])))
    cols = dg.constant(np.ones((node.shape[1], 1)))
    return dg.scalar_combine([dg.matmul(dg.matmul(rows, node), cols)], [1.0])


def test_backward_sum_gives_ones():
    x = dg.parameter(np.full((3, 2), -0.7), "x")
    np.testing.assert_array_equal(dg.backward(_sum(x))["x"], np.ones((3, 2)))


def test_backward_sigmoid_at_zero():
    x = dg.parameter(np.zeros((2, 3)), "x")
    np.testing.assert_array_equal(dg.backward(_sum(dg.sigmoid(x)))["x"], np.full((2, 3), 0.25))


def test_backward_requires_scalar():
    with pytest.raises(dg.ShapeError):
        dg.backward(dg.parameter(np.ones((2, 2)), "x"))


def test_shared_node_accumulates():
    x = dg.parameter([[3.0]], "x")
    loss = dg.scalar_combine([x, x], [2.0, 5.0])
    assert dg.backward(loss)["x"][0, 0] == 7.0


PRIMITIVES = {
    "matmul": (lambda a, b: dg.matmul(a, b), [(4, 3), (3, 2)]),
    "add_rowbias": (lambda a, b: dg.add_rowbias(a, b), [(4, 3), (1, 3)]),
    "concat_cols": (lambda a, b: dg.concat_cols(a, b), [(4, 3), (4, 2)]),
    "sigmoid": (lambda a: dg.sigmoid(a), [(4, 3)]),
    "softplus": (lambda a: dg.softplus(a), [(4, 3)]),
    "tanh": (lambda a: dg.tanh(a), [(4, 3)]),
    "mul": (lambda a, b: dg.mul(a, b), [(4, 3), (4, 3)]),
    "subtract": (lambda a, b: dg.subtract(a, b), [(4, 3), (4, 3)]),
    "clip": (lambda a: dg.clip(a, -1.5, 1.5), [(4, 3)]),
}


@pytest.mark.parametrize("name", sorted(PRIMITIVES))
def test_primitive_gradients_match_finite_differences(name, rng):
    build, shapes = PRIMITIVES[name]
    values = [rng.uniform(-2, 2, s) for s in shapes]
    if name == "clip":
        # keep away from the kinks
        values[0] = np.where(np.abs(np.abs(values[0]) - 1.5) < 0.05, 0.3, values[0])
    out_shape = build(*[dg.constant(v) for v in values]).shape
    weights = rng.uniform(-1, 1, out_shape)

    def loss_of(vals, trainable):
        nodes = [dg.parameter(v, f"p{i}") if trainable else dg.constant(v) for i, v in enumerate(vals)]
        return dg.softplus_mean(dg.mul(build(*nodes), dg.constant(weights))), nodes

    loss, _ = loss_of(values, True)
    grads = dg.backward(loss)
    for i, v in enumerate(values):
        numeric = central_difference(lambda: loss_of(values, False)[0].value[0, 0], v)
        assert max_rel_error(grads[f"p{i}"], numeric) < 1e-4, name


def _check_reduction(build, value):
    node = dg.parameter(value, "x")
    grads = dg.backward(build(node))
    numeric = central_difference(lambda: build(dg.constant(value)).value[0, 0], value)
    assert max_rel_error(grads["x"], numeric) < 1e-4


def test_power_gradients(rng):
    base = rng.uniform(0.2, 2.0, (5, 4))
    expo = rng.uniform(-2, 2, (5, 1))
    weights = rng.uniform(-1, 1, (5, 4))

    def build(b, e):
        return dg.softplus_mean(dg.mul(dg.power(b, e), dg.constant(weights)))

    grads = dg.backward(build(dg.parameter(base, "b"), dg.parameter(expo, "e")))
    nb = central_difference(lambda: build(dg.constant(base), dg.constant(expo)).value[0, 0], base)
    ne = central_difference(lambda: build(dg.constant(base), dg.constant(expo)).value[0, 0], expo)
    assert max_rel_error(grads["b"], nb) < 1e-4
    assert max_rel_error(grads["e"], ne) < 1e-4


def test_reduction_gradients(rng, backend):
    w = rng.uniform(-1, 1, (6, 5))
    _check_reduction(lambda x: dg.row_l21(x), rng.uniform(-2, 2, (6, 3)))
    _check_reduction(lambda x: dg.entropy_h1(x), rng.uniform(0.05, 2, (6, 5)))
    _check_reduction(lambda x: dg.softplus_mean(x, sign=-1.0), rng.uniform(-2, 2, (6, 5)))
    _check_reduction(lambda x: dg.frob_sq(x), rng.uniform(-2, 2, (3, 3)))
    _check_reduction(lambda x: dg.entropy_h1(dg.stick_break(dg.sigmoid(dg.mul(x, dg.constant(w))))),
                     rng.uniform(-2, 2, (6, 5)))


def test_forward_is_deterministic(rng):
    x = rng.uniform(-2, 2, (50, 10))

    def run():
        node = dg.parameter(x, "x")
        loss = dg.entropy_h1(dg.stick_break(dg.sigmoid(node)))
        return loss.value.copy(), dg.backward(loss)["x"]

    (l1, g1), (l2, g2) = run(), run()
    assert np.array_equal(l1, l2)
    assert np.array_equal(g1, g2)
