"""Shared sparse Dirichlet encoder, per-image affine decoders and the critic network.

Parameters live in a plain ``dict`` mapping names to float64 matrices (see
:data:`PARAM_SHAPES`). The graph builders (``*_graph``) take a dict of
:class:`~dirichlet_style.diffgraph.Node` objects so that the same code
serves training (parameter nodes) and inference (constant nodes).
"""

from dataclasses import dataclass

import numpy as np

from . import diffgraph as dg

CHANNELS = 3
K = 10
HIDDEN = (3, 3, 3, 3)
DENSE_WIDTH = CHANNELS + sum(HIDDEN)  # 15
CRITIC_WIDTH = CHANNELS + K  # 13
U_CLAMP = 1e-7
ENCODE_CHUNK = 1 << 16


def _param_shapes():
    shapes = {}
    width = CHANNELS
    for i, h in enumerate(HIDDEN, start=1):
        shapes[f"enc_w{i}"] = (width, h)
        shapes[f"enc_b{i}"] = (1, h)
        width += h
    shapes["u_w"] = (DENSE_WIDTH, K)
    shapes["u_b"] = (1, K)
    shapes["beta_w"] = (DENSE_WIDTH, 1)
    shapes["beta_b"] = (1, 1)
    shapes["theta1"] = (K, K)
    shapes["theta2"] = (K, CHANNELS)
    shapes["a_tau"] = (K, K)
    shapes["b_tau"] = (1, CHANNELS)
    shapes["a_kappa"] = (K, K)
    shapes["b_kappa"] = (1, CHANNELS)
    shapes["critic_w1"] = (CRITIC_WIDTH, CRITIC_WIDTH)
    shapes["critic_b1"] = (1, CRITIC_WIDTH)
    shapes["critic_w2"] = (CRITIC_WIDTH, 1)
    shapes["critic_b2"] = (1, 1)
    return shapes


PARAM_SHAPES = _param_shapes()
ENCODER_PARAMS = tuple(n for n in PARAM_SHAPES if n.startswith(("enc_", "u_", "beta_")))
DECODER_PARAMS = ("theta1", "theta2", "a_tau", "b_tau", "a_kappa", "b_kappa")
CRITIC_PARAMS = tuple(n for n in PARAM_SHAPES if n.startswith("critic_"))
BRANCHES = {"content": ("a_tau", "b_tau"), "style": ("a_kappa", "b_kappa")}


@dataclass
class EncoderActivations:
    u: np.ndarray
    beta: np.ndarray
    v: np.ndarray
    s: np.ndarray


def init_params(seed):
    """Glorot-uniform weights and zero biases; the beta-head bias starts at 1."""
    rng = np.random.default_rng(seed)
    params = {}
    for name, (rows, cols) in PARAM_SHAPES.items():
        if rows == 1:
            params[name] = np.zeros((rows, cols))
        else:
            bound = np.sqrt(6.0 / (rows + cols))
            params[name] = rng.uniform(-bound, bound, size=(rows, cols))
    params["beta_b"][...] = 1.0
    return params


def check_params(params):
    for name, shape in PARAM_SHAPES.items():
        if name not in params:
            raise KeyError(f"missing parameter {name!r}")
        if params[name].shape != shape:
            raise dg.ShapeError(f"parameter {name!r} has shape {params[name].shape}, expected {shape}")


def as_nodes(params, trainable=True):
    make = dg.parameter if trainable else dg.constant
    return {name: make(value, name) for name, value in params.items()}


def _check_pixels(x):
    if x.ndim != 2 or x.shape[1] != CHANNELS:
        raise dg.ShapeError(f"expected a pixels x {CHANNELS} matrix, got shape {x.shape}")


# graph builders

def kumaraswamy_graph(u, beta):
    p = u.shape[0]
    ones = dg.constant(np.ones(u.shape))
    clamped = dg.clip(u, U_CLAMP, 1.0 - U_CLAMP)
    inv_beta = dg.power(beta, dg.constant(-np.ones((p, 1))))
    return dg.subtract(ones, dg.power(dg.subtract(ones, clamped), inv_beta))


def encoder_graph(nodes, x):
    """Dense tanh stack -> (u, beta) heads -> Kumaraswamy -> stick-breaking."""
    features = [x]
    for i in range(1, len(HIDDEN) + 1):
        inp = features[0] if len(features) == 1 else dg.concat_cols(*features)
        h = dg.tanh(dg.add_rowbias(dg.matmul(inp, nodes[f"enc_w{i}"]), nodes[f"enc_b{i}"]))
        features.append(h)
    dense = dg.concat_cols(*features)
    u = dg.sigmoid(dg.add_rowbias(dg.matmul(dense, nodes["u_w"]), nodes["u_b"]))
    beta = dg.softplus(dg.add_rowbias(dg.matmul(dense, nodes["beta_w"]), nodes["beta_b"]))
    v = kumaraswamy_graph(u, beta)
    s = dg.stick_break(v)
    return u, beta, v, s


def basis_graph(nodes, branch):
    a_name, b_name = BRANCHES[branch]
    b_theta = dg.matmul(nodes["theta1"], nodes["theta2"])
    return dg.add_rowbias(dg.matmul(nodes[a_name], b_theta), nodes[b_name])


def decoder_graph(nodes, branch, s):
    """s·(a·B_theta) + 1·b: affine in s, equal to s·basis on simplex rows."""
    a_name, b_name = BRANCHES[branch]
    b_theta = dg.matmul(nodes["theta1"], nodes["theta2"])
    return dg.add_rowbias(dg.matmul(s, dg.matmul(nodes[a_name], b_theta)), nodes[b_name])


def critic_graph(nodes, x, s):
    joint = dg.concat_cols(x, s)
    hidden = dg.softplus(dg.add_rowbias(dg.matmul(joint, nodes["critic_w1"]), nodes["critic_b1"]))
    return dg.add_rowbias(dg.matmul(hidden, nodes["critic_w2"]), nodes["critic_b2"])


# numpy-level operations

def kumaraswamy_v(u, beta):
    """v = 1 - (1 - u)^(1/beta), u clamped to [1e-7, 1 - 1e-7]."""
    node = kumaraswamy_graph(dg.constant(u), dg.constant(beta))
    return node.value


def stick_break(v):
    return dg.stick_break(dg.constant(v)).value


def encode(params, x):
    """Encode a pixels x 3 matrix (already zero-meaned) in row chunks."""
    x = np.asarray(x, dtype=np.float64)
    _check_pixels(x)
    nodes = as_nodes(params, trainable=False)
    parts = []
    for start in range(0, x.shape[0], ENCODE_CHUNK):
        chunk = dg.constant(x[start:start + ENCODE_CHUNK])
        parts.append([n.value for n in encoder_graph(nodes, chunk)])
    u, beta, v, s = (np.concatenate(cols, axis=0) for cols in zip(*parts))
    return EncoderActivations(u=u, beta=beta, v=v, s=s)


def effective_basis(params, branch):
    """k x 3 color basis a·B_theta + 1·b for ``branch`` ("content" or "style")."""
    if branch not in BRANCHES:
        raise ValueError(f"unknown branch {branch!r}")
    return basis_graph(as_nodes(params, trainable=False), branch).value


def decode(params, branch, s):
    s = np.asarray(s, dtype=np.float64)
    if s.ndim != 2 or s.shape[1] != K:
        raise dg.ShapeError(f"expected an abundance matrix with {K} columns, got {s.shape}")
    if branch not in BRANCHES:
        raise ValueError(f"unknown branch {branch!r}")
    a_name, b_name = BRANCHES[branch]
    return s @ (params[a_name] @ (params["theta1"] @ params["theta2"])) + params[b_name]


def critic_score(params, x, s):
    x = np.asarray(x, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    if x.shape[0] != s.shape[0]:
        raise dg.ShapeError(f"critic_score: row counts differ, {x.shape} vs {s.shape}")
    nodes = as_nodes(params, trainable=False)
    return critic_graph(nodes, dg.constant(x), dg.constant(s)).value
