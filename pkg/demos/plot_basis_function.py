"""
The adaptive basis function
---------------------------

Each node squashes its net input with ``(a + tanh x) / (1 + a)``. The shape
parameter ``a`` moves the lower asymptote to ``(a - 1) / (a + 1)`` while the
upper one stays at 1; ``a = 1`` is the ordinary logistic curve.

This script draws the family, then checks the two analytic derivatives used
in training against central differences.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from abfrain.abfnn import activate, activate_deriv, param_deriv

out_dir = os.environ.get("ABFRAIN_FIGURES", "figures")
os.makedirs(out_dir, exist_ok=True)

x = np.linspace(-4, 4, 400)
fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
for a in (-0.5, 0.0, 0.5, 1.0, 3.0):
    o = activate(x, a)
    ax1.plot(x, o, label=f"a = {a:g}")
    ax2.plot(x, activate_deriv(o, a), label=f"a = {a:g}")
ax1.set_xlabel("net input")
ax1.set_ylabel("node output")
ax2.set_xlabel("net input")
ax2.set_ylabel("d output / d input")
ax1.legend()
fig.tight_layout()
fig.savefig(os.path.join(out_dir, "basis_function.png"), dpi=120)

###############################################################################
# Both derivatives are written in terms of the node output, so the backward
# pass never needs the net input again.

h = 1e-6
for a in (-0.5, 1.0, 3.0):
    for xi in (-1.0, 0.2, 1.5):
        o = activate(xi, a)
        dx = (activate(xi + h, a) - activate(xi - h, a)) / (2 * h)
        da = (activate(xi, a + h) - activate(xi, a - h)) / (2 * h)
        print(f"a={a:5.2f} x={xi:5.2f}  dO/dI {activate_deriv(o, a):.9f} (fd {dx:.9f})"
              f"  dO/da {param_deriv(o, a):.9f} (fd {da:.9f})")
