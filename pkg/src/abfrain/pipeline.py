"""End-to-end experiment: split, scale, window, train, predict, analyse."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from . import abfnn, spectral
from .timeseries import (FIRST_TARGET, MIN_SERIES_LENGTH, WINDOW_LAGS, MonthlySeries,
                         NormalizationParams, SeriesError, build_windows, fit_normalization,
                         save_csv)
from .trainer import TrainConfig, evaluate, predict_series, train, write_rmse_csv

__all__ = [
    "SIDECAR_FORMAT",
    "DEFAULT_TOPOLOGY",
    "TrainingRun",
    "Analysis",
    "parse_train_years",
    "split_datasets",
    "run_training",
    "analyze",
    "sidecar_path",
    "write_sidecar",
    "read_sidecar",
    "write_training_outputs",
    "write_analysis_outputs",
]

SIDECAR_FORMAT = "abfnet-norm-v1"
DEFAULT_TOPOLOGY = (12, 7, 1)


def parse_train_years(text, series):
    """Number of training months for ``text``.

    ``text`` is either a count of leading years (``"40"``) or an inclusive
    calendar range starting at the series' first year (``"1893-1932"``).
    """
    text = str(text).strip()
    if "-" in text:
        first, last = (int(p) for p in text.split("-", 1))
        if first != series.start_year:
            raise SeriesError(f"training range must start at the first year of the data "
                              f"({series.start_year}), got {first}")
        if last < first:
            raise SeriesError(f"empty training range {text}")
        months = series.index_of(last, 12) + 1
    else:
        months = int(text) * 12
    if months < MIN_SERIES_LENGTH:
        raise SeriesError(f"training split of {months} months is shorter than "
                          f"{MIN_SERIES_LENGTH}")
    if months > len(series):
        raise SeriesError(f"training split of {months} months exceeds the "
                          f"{len(series)}-month series")
    return months


def split_datasets(series, train_months, params):
    """Training patterns (targets inside the split) and test patterns (after it).

    Test windows may reach back into the training period for their inputs.
    """
    train_data = build_windows(series.slice(0, train_months), params)
    if train_months < len(series):
        full = build_windows(series, params)
        test_data = full.select(full.target_index >= train_months)
    else:
        test_data = None
    return train_data, test_data


@dataclass
class TrainingRun:
    net: abfnn.Network
    params: NormalizationParams
    report: object
    train_months: int
    series: MonthlySeries


def run_training(series, train_months, topology=DEFAULT_TOPOLOGY, cfg=TrainConfig(),
                 checkpoint_path=None):
    """Fit scaling on the training split only, then train a fresh network."""
    topology = list(topology)
    if topology[0] != len(WINDOW_LAGS):
        raise ValueError(f"the input layer must have {len(WINDOW_LAGS)} nodes, got {topology[0]}")
    if topology[-1] != 1:
        raise ValueError("the output layer must have a single node")
    params = fit_normalization(series.slice(0, train_months))
    train_data, test_data = split_datasets(series, train_months, params)
    net = abfnn.init_network(topology, seed=cfg.seed, zero_biases=cfg.freeze_biases)
    net, report = train(net, train_data, cfg, test_data=test_data,
                        checkpoint_path=checkpoint_path)
    return TrainingRun(net, params, report, train_months, series)


@dataclass
class Analysis:
    """Everything the difference and spectrum plots need."""

    predicted: MonthlySeries
    difference: spectral.DifferenceSeries
    actual_spectrum: spectral.PowerSpectrum
    predicted_spectrum: spectral.PowerSpectrum
    full_residual: spectral.ResidualSpectrum
    comparison: spectral.SpectrumComparison
    train_rmse: float
    test_rmse: float

    def metrics(self):
        return {
            "train_rmse": self.train_rmse,
            "test_rmse": self.test_rmse,
            "full_period_enclosed_power_fraction": self.full_residual.enclosed_power_fraction,
            "test_model_enclosed_power_fraction": self.comparison.model_fraction,
            "test_vs_train_actual_enclosed_power_fraction": self.comparison.drift_fraction,
            "model_residual_peak_cycles_per_year": self.comparison.model.peak_freq,
            "drift_residual_peak_cycles_per_year": self.comparison.drift.peak_freq,
            "model_fraction_below_drift_fraction": self.comparison.model_beats_drift,
        }


def analyze(net, series, params, train_months, normalized_spectra=False):
    """Predict the whole record and build the difference and spectral diagnostics."""
    if train_months >= len(series):
        raise SeriesError("no months after the training split to analyse")
    if train_months < MIN_SERIES_LENGTH:
        raise SeriesError(f"training split of {train_months} months is too short")
    predicted = predict_series(net, series, params)
    diff = spectral.difference_series(predicted, series)
    actual_vals = series.values[FIRST_TARGET:]
    pred_vals = predicted.values
    if normalized_spectra:
        actual_vals, pred_vals = params.normalize(actual_vals), params.normalize(pred_vals)
        train_vals, test_vals = params.normalize(series.values[:train_months]), \
            params.normalize(series.values[train_months:])
    else:
        train_vals, test_vals = series.values[:train_months], series.values[train_months:]
    actual_ps = spectral.periodogram(actual_vals)
    predicted_ps = spectral.periodogram(pred_vals)
    split = train_months - FIRST_TARGET
    comparison = spectral.spectrum_compare_report(train_vals, test_vals, pred_vals[split:])
    train_data, test_data = split_datasets(series, train_months, params)
    return Analysis(
        predicted=predicted,
        difference=diff,
        actual_spectrum=actual_ps,
        predicted_spectrum=predicted_ps,
        full_residual=spectral.residual_fps(predicted_ps, actual_ps),
        comparison=comparison,
        train_rmse=evaluate(net, train_data),
        test_rmse=evaluate(net, test_data),
    )


def sidecar_path(checkpoint_path):
    return os.fspath(checkpoint_path) + ".norm.json"


def write_sidecar(path, params, train_months, series, topology):
    y, m = series.start_year, series.start_month
    doc = {
        "format": SIDECAR_FORMAT,
        "normalization": params.to_dict(),
        "train_start": [y, m],
        "train_months": int(train_months),
        "topology": [int(n) for n in topology],
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_sidecar(path):
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != SIDECAR_FORMAT:
        raise ValueError(f"{path}: not an {SIDECAR_FORMAT} sidecar")
    return doc


def write_training_outputs(run, out_dir):
    """Checkpoint, sidecar, ``rmse.csv`` and ``summary.txt`` under ``out_dir``."""
    os.makedirs(out_dir, exist_ok=True)
    ckpt = os.path.join(out_dir, "model.abf")
    abfnn.save_checkpoint(run.net, ckpt)
    write_sidecar(sidecar_path(ckpt), run.params, run.train_months, run.series, run.net.topology)
    write_rmse_csv(run.report, os.path.join(out_dir, "rmse.csv"))
    with open(os.path.join(out_dir, "summary.txt"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(run.report.summary() + "\n")
    return ckpt


def write_analysis_outputs(analysis, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    save_csv(analysis.predicted, os.path.join(out_dir, "predicted.csv"))
    spectral.write_difference_csv(analysis.difference, os.path.join(out_dir, "difference.csv"))
    spectral.write_spectrum_csv(analysis.actual_spectrum, os.path.join(out_dir, "spectrum_actual.csv"))
    spectral.write_spectrum_csv(analysis.predicted_spectrum,
                                os.path.join(out_dir, "spectrum_predicted.csv"))
    spectral.write_residual_csv(analysis.full_residual, os.path.join(out_dir, "residual_full.csv"))
    spectral.write_residual_csv(analysis.comparison.model, os.path.join(out_dir, "residual_test.csv"))
    spectral.write_residual_csv(analysis.comparison.drift, os.path.join(out_dir, "residual_drift.csv"))
    with open(os.path.join(out_dir, "metrics.json"), "w", encoding="utf-8", newline="\n") as fh:
        json.dump(analysis.metrics(), fh, indent=2, sort_keys=True)
        fh.write("\n")
