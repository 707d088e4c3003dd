"""Adaptive basis function network.

Every non-input node ``j`` computes ``O_j = (a_j + tanh(I_j)) / (1 + a_j)``
with its own shape parameter ``a_j`` that is trained by gradient descent
together with the weights. ``a = 1`` gives the logistic curve
``1 / (1 + exp(-2 I))``; ``a = 0`` gives ``tanh``.

Two derivatives drive training, both written in terms of the node output::

    dO/dI = ((1 - a) + (1 + a) O) (1 - O)
    dO/da = (1 - O) / (1 + a)

The second is what the shape update uses on every layer; for the output
node it reproduces the familiar ``-beta (O - O*) (1 - O) / (1 + a)`` step.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

__all__ = [
    "EPSILON_A",
    "CHECKPOINT_MAGIC",
    "Layer",
    "Network",
    "ForwardTrace",
    "Gradients",
    "activate",
    "activate_deriv",
    "param_deriv",
    "clamp_params",
    "forward",
    "predict",
    "loss",
    "backward",
    "apply_updates",
    "init_network",
    "save_checkpoint",
    "load_checkpoint",
    "format_checkpoint",
    "parse_checkpoint",
]

EPSILON_A = 1e-3
CHECKPOINT_MAGIC = "abfnet-v1"


def activate(x, a):
    """Variable sigmoid ``(a + tanh x) / (1 + a)``."""
    return (a + np.tanh(x)) / (1.0 + a)


def activate_deriv(o, a):
    """``dO/dI`` expressed through the node output ``o``."""
    return ((1.0 - a) + (1.0 + a) * o) * (1.0 - o)


def param_deriv(o, a):
    """``dO/da`` expressed through the node output ``o``."""
    return (1.0 - o) / (1.0 + a)


def clamp_params(a, eps=EPSILON_A, side=None):
    """Keep ``|1 + a| >= eps``.

    Values inside the forbidden band are pushed to its edge on the side given
    by the sign of ``side`` (an array of reference ``1 + a`` values, usually
    the pre-update ones), or by their own sign when ``side`` is None. Zero
    counts as positive.
    """
    a = np.array(a, dtype=float)
    shifted = 1.0 + a
    ref = shifted if side is None else np.broadcast_to(np.asarray(side, dtype=float), a.shape)
    bad = np.abs(shifted) < eps
    if np.any(bad):
        edge = np.where(ref < 0, -eps, eps)
        a = np.where(bad, edge - 1.0, a)
    return a


@dataclass(frozen=True, eq=False)
class Layer:
    """Weights ``(n_out, n_in)``, biases ``(n_out,)`` and shape parameters ``(n_out,)``."""

    weights: np.ndarray
    biases: np.ndarray
    params: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float, ndmin=2)
        b = np.array(self.biases, dtype=float).reshape(-1)
        a = np.array(self.params, dtype=float).reshape(-1)
        if w.ndim != 2 or b.shape != (w.shape[0],) or a.shape != (w.shape[0],):
            raise ValueError(f"inconsistent layer shapes: weights {w.shape}, "
                             f"biases {b.shape}, params {a.shape}")
        for arr in (w, b, a):
            if not np.all(np.isfinite(arr)):
                raise ValueError("layer entries must be finite")
            arr.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "biases", b)
        object.__setattr__(self, "params", a)

    @property
    def n_in(self):
        return self.weights.shape[1]

    @property
    def n_out(self):
        return self.weights.shape[0]


@dataclass(frozen=True, eq=False)
class Network:
    layers: tuple

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise ValueError("a network needs at least one layer")
        for prev, nxt in zip(layers, layers[1:]):
            if nxt.n_in != prev.n_out:
                raise ValueError(f"layer expecting {nxt.n_in} inputs follows a layer "
                                 f"with {prev.n_out} outputs")
        object.__setattr__(self, "layers", layers)

    @property
    def topology(self):
        return [self.layers[0].n_in] + [layer.n_out for layer in self.layers]

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        return len(self.layers) == len(other.layers) and all(
            np.array_equal(p.weights, q.weights)
            and np.array_equal(p.biases, q.biases)
            and np.array_equal(p.params, q.params)
            for p, q in zip(self.layers, other.layers))


@dataclass(frozen=True, eq=False)
class ForwardTrace:
    """Intermediates of one forward pass.

    ``pre_activations[l]`` and ``activations[l]`` belong to ``net.layers[l]``.
    Arrays are 1-d for a single pattern or ``(N, n)`` for a batch.
    """

    input: np.ndarray
    pre_activations: tuple
    activations: tuple

    @property
    def output(self):
        return self.activations[-1]


@dataclass(frozen=True, eq=False)
class Gradients:
    """Loss gradients laid out like the network's layers."""

    d_weights: tuple
    d_biases: tuple
    d_params: tuple

    def __add__(self, other):
        return Gradients(
            tuple(p + q for p, q in zip(self.d_weights, other.d_weights)),
            tuple(p + q for p, q in zip(self.d_biases, other.d_biases)),
            tuple(p + q for p, q in zip(self.d_params, other.d_params)),
        )


def forward(net, x):
    """Propagate one pattern (1-d) or a batch (rows) through ``net``."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (net.layers[0].n_in,) or x.ndim > 2:
        raise ValueError(f"input of shape {x.shape} does not fit a network "
                         f"with {net.layers[0].n_in} inputs")
    pre, act = [], []
    o = x
    for layer in net.layers:
        i = o @ layer.weights.T + layer.biases
        o = activate(i, layer.params)
        pre.append(i)
        act.append(o)
    return ForwardTrace(x, tuple(pre), tuple(act))


def predict(net, x):
    """Network output for ``x`` (pattern or batch)."""
    return forward(net, x).output


def loss(output, target):
    """Half the summed squared error."""
    output = np.asarray(output, dtype=float)
    target = np.asarray(target, dtype=float)
    if output.shape != target.shape:
        raise ValueError(f"output shape {output.shape} != target shape {target.shape}")
    return 0.5 * float(np.sum((output - target) ** 2))


def backward(net, trace, target):
    """Gradients of :func:`loss` w.r.t. every weight, bias and shape parameter.

    For a batched trace the per-pattern gradients are summed in pattern order.
    The output-layer shape gradient is evaluated as ``((O - O*) (1 - O)) / (1 + a)``,
    so ``-beta * d_params[-1]`` is bit-identical to the closed-form output
    update written with ``-beta`` applied last (and, for power-of-two ``beta``,
    in any grouping).
    """
    target = np.asarray(target, dtype=float)
    out = trace.output
    if target.shape != out.shape:
        raise ValueError(f"target shape {target.shape} != output shape {out.shape}")
    batched = out.ndim == 2
    d_w, d_b, d_a = [], [], []
    d_out = out - target  # dE/dO for the current layer
    for l in range(len(net.layers) - 1, -1, -1):
        layer = net.layers[l]
        o = trace.activations[l]
        a = layer.params
        prev = trace.activations[l - 1] if l > 0 else trace.input
        delta = d_out * activate_deriv(o, a)  # dE/dI
        g_a = d_out * (1.0 - o) / (1.0 + a)
        if batched:
            g_w = (delta[:, :, None] * prev[:, None, :]).sum(axis=0)
            g_b = delta.sum(axis=0)
            g_a = g_a.sum(axis=0)
        else:
            g_w = np.outer(delta, prev)
            g_b = delta
        d_w.append(g_w)
        d_b.append(g_b)
        d_a.append(g_a)
        if l > 0:
            d_out = delta @ layer.weights
    grads = Gradients(tuple(reversed(d_w)), tuple(reversed(d_b)), tuple(reversed(d_a)))
    for group in (grads.d_weights, grads.d_biases, grads.d_params):
        for g in group:
            if not np.all(np.isfinite(g)):
                raise FloatingPointError("non-finite gradient; weights are probably diverging")
    return grads


def apply_updates(net, grads, beta, eps=EPSILON_A, freeze_biases=False, freeze_params=False):
    """One steepest-descent step of size ``beta``; returns a new network.

    Shape parameters are clamped afterwards so ``|1 + a| >= eps``, keeping
    each node on the side of the pole it started from.
    """
    if not beta > 0:
        raise ValueError("beta must be positive")
    layers = []
    for layer, g_w, g_b, g_a in zip(net.layers, grads.d_weights, grads.d_biases, grads.d_params):
        w = layer.weights - beta * g_w
        b = layer.biases if freeze_biases else layer.biases - beta * g_b
        if freeze_params:
            a = layer.params
        else:
            a = clamp_params(layer.params - beta * g_a, eps, side=1.0 + layer.params)
        layers.append(Layer(w, b, a))
    return Network(tuple(layers))


def init_network(topology, seed=0, scale=0.5, zero_biases=False):
    """Random network: weights and biases ~ U(-scale, scale), all ``a = 1``."""
    topology = [int(n) for n in topology]
    if len(topology) < 2 or any(n <= 0 for n in topology):
        raise ValueError(f"invalid topology {topology}")
    rng = np.random.default_rng(seed)
    layers = []
    for n_in, n_out in zip(topology, topology[1:]):
        w = rng.uniform(-scale, scale, size=(n_out, n_in))
        b = rng.uniform(-scale, scale, size=n_out)
        if zero_biases:
            b = np.zeros(n_out)
        layers.append(Layer(w, b, np.ones(n_out)))
    return Network(tuple(layers))


def _fmt(v):
    return f"{float(v):.17g}"


def format_checkpoint(net):
    """Checkpoint text: magic line, topology, then one line per node
    holding ``bias a w_1 ... w_n``."""
    lines = [CHECKPOINT_MAGIC, " ".join(str(n) for n in net.topology)]
    for layer in net.layers:
        for j in range(layer.n_out):
            fields = [layer.biases[j], layer.params[j], *layer.weights[j]]
            lines.append(" ".join(_fmt(v) for v in fields))
    return "\n".join(lines) + "\n"


def parse_checkpoint(text, source="<checkpoint>"):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != CHECKPOINT_MAGIC:
        raise ValueError(f"{source}: not an {CHECKPOINT_MAGIC} checkpoint")
    try:
        topology = [int(t) for t in lines[1].split()]
    except (IndexError, ValueError):
        raise ValueError(f"{source}:2: bad topology line") from None
    expected = 2 + sum(topology[1:])
    if len(topology) < 2 or len(lines) != expected:
        raise ValueError(f"{source}: topology {topology} needs {expected} lines, "
                         f"found {len(lines)}")
    layers = []
    row = 2
    for n_in, n_out in zip(topology, topology[1:]):
        w = np.empty((n_out, n_in))
        b = np.empty(n_out)
        a = np.empty(n_out)
        for j in range(n_out):
            fields = lines[row].split()
            if len(fields) != n_in + 2:
                raise ValueError(f"{source}:{row + 1}: expected {n_in + 2} numbers, "
                                 f"got {len(fields)}")
            nums = [float(f) for f in fields]
            b[j], a[j], w[j] = nums[0], nums[1], nums[2:]
            row += 1
        layers.append(Layer(w, b, a))
    return Network(tuple(layers))


def save_checkpoint(net, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_checkpoint(net))


def load_checkpoint(path):
    path = os.fspath(path)
    with open(path, encoding="utf-8") as fh:
        return parse_checkpoint(fh.read(), source=path)
