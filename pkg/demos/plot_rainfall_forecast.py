"""
Forecasting a synthetic monthly rainfall record
-----------------------------------------------

An 87-year synthetic record with two rainy seasons is split into 40 training
years and 47 test years. A 12-7-1 network sees, for each of the four previous
years, the month before, the month itself and the month after the one being
predicted.

The difference diagram (predicted minus actual) should look the same inside
and outside the training period, and the two power spectra should overlap.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from abfrain.pipeline import analyze, run_training
from abfrain.timeseries import synthesize_rainfall
from abfrain.trainer import TrainConfig

out_dir = os.environ.get("ABFRAIN_FIGURES", "figures")
os.makedirs(out_dir, exist_ok=True)

series = synthesize_rainfall(87, seed=1, noise_level=0.2, drift=0.3)
train_months = 40 * 12
run = run_training(series, train_months, cfg=TrainConfig())
print(run.report.summary())

result = analyze(run.net, series, run.params, train_months)
print(f"train RMSE {result.train_rmse:.4f}, test RMSE {result.test_rmse:.4f}")

###############################################################################
# Learning curve

fig, ax = plt.subplots(figsize=(6, 3.5))
ax.semilogy(np.arange(1, run.report.epochs_run + 1), run.report.rmse_per_epoch)
ax.axhline(0.085, color="k", lw=0.8, ls="--")
ax.set_xlabel("epoch")
ax.set_ylabel("training RMSE (normalized)")
fig.tight_layout()
fig.savefig(os.path.join(out_dir, "learning_curve.png"), dpi=120)

###############################################################################
# Difference diagram, with the training period shaded

years, months = result.difference.months()
t = years + (months - 0.5) / 12
fig, ax = plt.subplots(figsize=(10, 3.5))
ax.plot(t, result.difference.deltas, lw=0.7)
ax.axvspan(t[0], series.start_year + train_months / 12, color="0.9", label="training period")
ax.set_xlabel("year")
ax.set_ylabel("predicted - actual (mm)")
ax.legend(loc="upper right")
fig.tight_layout()
fig.savefig(os.path.join(out_dir, "difference_diagram.png"), dpi=120)

###############################################################################
# Average power per sample for the whole predicted span, 0 to 6 cycles/year

fig, ax = plt.subplots(figsize=(8, 3.5))
ax.semilogy(result.actual_spectrum.freqs, result.actual_spectrum.power, label="actual")
ax.semilogy(result.predicted_spectrum.freqs, result.predicted_spectrum.power, label="predicted",
            alpha=0.8)
ax.set_xlabel("frequency (cycles / year)")
ax.set_ylabel("power per sample (mm$^2$)")
ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(out_dir, "power_spectra.png"), dpi=120)
