"""Gradient-descent training, evaluation and one-step-ahead prediction."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import abfnn
from .timeseries import MonthlySeries, SeriesError, build_windows, format_value

__all__ = [
    "TrainConfig",
    "TrainReport",
    "TrainingDiverged",
    "rmse",
    "train",
    "evaluate",
    "predict_series",
    "write_rmse_csv",
    "read_rmse_csv",
]

logger = logging.getLogger(__name__)

IMPROVEMENT_TOL = 1e-6


class TrainingDiverged(FloatingPointError):
    def __init__(self, epoch, detail=""):
        self.epoch = epoch
        super().__init__(f"training diverged at epoch {epoch}" + (f": {detail}" if detail else ""))


@dataclass(frozen=True)
class TrainConfig:
    """Training hyperparameters.

    In ``batch`` mode each epoch makes one step of size ``beta`` along the
    mean per-pattern gradient. In ``online`` mode every pattern makes its own
    step, in dataset order.
    """

    beta: float = 0.25
    max_epochs: int = 5000
    target_rmse: float = 0.085
    patience: int = 200
    mode: str = "batch"
    seed: int = 0
    freeze_biases: bool = False
    checkpoint_every: int = 0

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be >= 1")
        if not self.target_rmse > 0:
            raise ValueError("target_rmse must be positive")
        if self.patience < 1:
            raise ValueError("patience must be >= 1")
        if self.mode not in ("batch", "online"):
            raise ValueError(f"mode must be 'batch' or 'online', got {self.mode!r}")
        if self.checkpoint_every < 0:
            raise ValueError("checkpoint_every must be >= 0")


@dataclass
class TrainReport:
    rmse_per_epoch: list
    epochs_run: int
    stop_reason: str  # "target-reached" | "patience" | "max-epochs"
    final_train_rmse: float
    final_test_rmse: Optional[float] = None

    def summary(self):
        lines = [f"epochs run:       {self.epochs_run}",
                 f"stop reason:      {self.stop_reason}",
                 f"final train RMSE: {self.final_train_rmse:.6f}"]
        if self.final_test_rmse is not None:
            lines.append(f"final test RMSE:  {self.final_test_rmse:.6f}")
        return "\n".join(lines)


def rmse(net, data):
    """Root-mean-square error, i.e. ``sqrt(2 E_total / N)`` for one output."""
    err = abfnn.predict(net, data.inputs).reshape(len(data), -1) - data.targets.reshape(len(data), -1)
    return float(np.sqrt(np.sum(err**2) / len(data)))


def evaluate(net, data):
    """RMSE of ``net`` over ``data`` in normalized units."""
    if len(data) == 0:
        raise ValueError("cannot evaluate on an empty dataset")
    return rmse(net, data)


def _scaled(grads, factor):
    return abfnn.Gradients(tuple(g * factor for g in grads.d_weights),
                           tuple(g * factor for g in grads.d_biases),
                           tuple(g * factor for g in grads.d_params))


def _epoch(net, data, cfg, targets):
    step = dict(freeze_biases=cfg.freeze_biases)
    if cfg.mode == "batch":
        trace = abfnn.forward(net, data.inputs)
        grads = abfnn.backward(net, trace, targets)
        return abfnn.apply_updates(net, _scaled(grads, 1.0 / len(data)), cfg.beta, **step)
    for x, t in zip(data.inputs, targets):
        trace = abfnn.forward(net, x)
        net = abfnn.apply_updates(net, abfnn.backward(net, trace, t), cfg.beta, **step)
    return net


def train(net, data, cfg=TrainConfig(), test_data=None, checkpoint_path=None):
    """Train ``net`` on ``data``; returns ``(trained_net, report)``.

    Stops at the first of: epoch RMSE <= ``target_rmse``; ``patience`` epochs
    without an improvement of at least 1e-6 over the best RMSE so far;
    ``max_epochs``. Epoch RMSE is measured after that epoch's update.
    ``checkpoint_path`` receives the network every ``checkpoint_every``
    epochs and once more at the end.
    """
    if len(data) == 0:
        raise ValueError("cannot train on an empty dataset")
    n_in = net.layers[0].n_in
    if data.inputs.shape[1] != n_in:
        raise ValueError(f"patterns have {data.inputs.shape[1]} components, "
                         f"network expects {n_in}")
    targets = data.targets.reshape(len(data), -1)
    if targets.shape[1] != net.layers[-1].n_out:
        raise ValueError("target width does not match the output layer")

    trace = []
    best = np.inf
    since_best = 0
    reason = "max-epochs"
    for epoch in range(1, cfg.max_epochs + 1):
        try:
            with np.errstate(over="raise", invalid="raise", divide="raise"):
                net = _epoch(net, data, cfg, targets)
        except (FloatingPointError, ValueError) as exc:
            raise TrainingDiverged(epoch, str(exc)) from None
        r = rmse(net, data)
        if not np.isfinite(r):
            raise TrainingDiverged(epoch, f"RMSE is {r}")
        trace.append(r)
        if cfg.checkpoint_every and checkpoint_path and epoch % cfg.checkpoint_every == 0:
            abfnn.save_checkpoint(net, checkpoint_path)
        if r <= cfg.target_rmse:
            reason = "target-reached"
            break
        if r < best - IMPROVEMENT_TOL:
            best, since_best = r, 0
        else:
            since_best += 1
            if since_best >= cfg.patience:
                reason = "patience"
                break
    logger.info("stopped after %d epochs (%s), RMSE %.6f", len(trace), reason, trace[-1])
    if checkpoint_path:
        abfnn.save_checkpoint(net, checkpoint_path)
    test_rmse = evaluate(net, test_data) if test_data is not None and len(test_data) else None
    return net, TrainReport(trace, len(trace), reason, trace[-1], test_rmse)


def predict_series(net, series, params):
    """One-step-ahead predictions for months 49 onwards, in millimetres.

    Each month is predicted from the actual values in its input window, never
    from earlier predictions. Results are clipped at zero.
    """
    data = build_windows(series, params)
    out = abfnn.predict(net, data.inputs).reshape(len(data), -1)[:, 0]
    mm = np.clip(params.denormalize(out), 0.0, None)
    y, m = series.month_at(data.target_index[0])
    return MonthlySeries(y, m, mm, (series.name + " predicted").strip())


def write_rmse_csv(report, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("epoch,rmse\n")
        for i, r in enumerate(report.rmse_per_epoch, 1):
            fh.write(f"{i},{format_value(r)}\n")


def read_rmse_csv(path):
    rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if rows.size and not np.array_equal(rows[:, 0], np.arange(1, len(rows) + 1)):
        raise SeriesError(f"{path}: epochs must run 1..N")
    return [float(r) for r in rows[:, 1]]
