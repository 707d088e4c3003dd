"""Independent reference computations used by the test-suite.

Nothing here calls the code paths it is used to check.
"""

import cmath
import math

import numpy as np

from abfrain.abfnn import Layer, Network


def random_network(rng, topology, a_range=(-0.5, 3.0), w_scale=1.0):
    layers = []
    for n_in, n_out in zip(topology, topology[1:]):
        layers.append(Layer(rng.uniform(-w_scale, w_scale, (n_out, n_in)),
                            rng.uniform(-w_scale, w_scale, n_out),
                            rng.uniform(*a_range, n_out)))
    return Network(tuple(layers))


def scalar_loss(net, x, target):
    """Forward pass and half squared error written out with plain loops."""
    o = [float(v) for v in x]
    for layer in net.layers:
        nxt = []
        for j in range(layer.n_out):
            s = float(layer.biases[j]) + sum(float(layer.weights[j, i]) * o[i]
                                             for i in range(layer.n_in))
            a = float(layer.params[j])
            nxt.append((a + math.tanh(s)) / (1.0 + a))
        o = nxt
    return 0.5 * sum((ok - tk) ** 2 for ok, tk in zip(o, target))


def _with_entry(net, kind, l, idx, value):
    layers = list(net.layers)
    layer = layers[l]
    arrays = {"w": layer.weights.copy(), "b": layer.biases.copy(), "a": layer.params.copy()}
    arrays[kind][idx] = value
    layers[l] = Layer(arrays["w"], arrays["b"], arrays["a"])
    return Network(tuple(layers))


def fd_gradients(net, x, target, h=1e-6):
    """Central finite differences of the loss for every parameter.

    Returns a dict ``{(kind, layer, index): derivative}``.
    """
    out = {}
    for l, layer in enumerate(net.layers):
        for kind, arr in (("w", layer.weights), ("b", layer.biases), ("a", layer.params)):
            for idx in np.ndindex(arr.shape):
                v = float(arr[idx])
                fp = scalar_loss(_with_entry(net, kind, l, idx, v + h), x, target)
                fm = scalar_loss(_with_entry(net, kind, l, idx, v - h), x, target)
                out[(kind, l, idx)] = (fp - fm) / (2 * h)
    return out


def sigmoid2_net_output(net, x):
    """Classic logistic network with activation 1 / (1 + exp(-2 x))."""
    o = np.asarray(x, dtype=float)
    for layer in net.layers:
        o = 1.0 / (1.0 + np.exp(-2.0 * (layer.weights @ o + layer.biases)))
    return o


def brute_dft(x):
    """Two-sided DFT by the defining double sum, pure Python."""
    n = len(x)
    return [sum(x[t] * cmath.exp(-2j * math.pi * k * t / n) for t in range(n)) for k in range(n)]


def brute_one_sided_power(x):
    """One-sided average power per sample from the full two-sided DFT."""
    n = len(x)
    X = brute_dft(list(map(float, x)))
    two_sided = [abs(v) ** 2 / n**2 for v in X]
    power = [two_sided[0]]
    for k in range(1, n // 2 + 1):
        if 2 * k == n:
            power.append(two_sided[k])
        else:
            power.append(two_sided[k] + two_sided[n - k])
    return np.array(power)


def enumerate_windows(u):
    """Patterns by walking years and months explicitly.

    For target ``t``: for years back 4, 3, 2, 1 take months ``-1, 0, +1``
    around ``t - 12 * years_back``.
    """
    inputs, targets, index = [], [], []
    for t in range(len(u)):
        rows = []
        ok = True
        for back in (4, 3, 2, 1):
            for dm in (-1, 0, 1):
                i = t - 12 * back + dm
                if i < 0:
                    ok = False
                rows.append(i)
        if ok:
            inputs.append([u[i] for i in rows])
            targets.append(u[t])
            index.append(t)
    return np.array(inputs), np.array(targets), np.array(index)
