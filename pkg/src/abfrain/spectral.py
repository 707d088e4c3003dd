"""Fourier power spectra, residual spectra and difference series.

Power is one-sided average power per sample::

    power[k] = |X[k]|^2 / N^2          k = 0 and k = N/2 (N even)
    power[k] = 2 |X[k]|^2 / N^2        0 < k < N/2

so that ``power.sum()`` equals the mean square of the input. No taper is
applied. Frequencies are in cycles per year with ``fs = 12`` samples/year.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .timeseries import MonthlySeries, SeriesError, format_value

__all__ = [
    "MONTHLY_FS",
    "PowerSpectrum",
    "ResidualSpectrum",
    "DifferenceSeries",
    "SpectrumComparison",
    "dft",
    "periodogram",
    "residual_fps",
    "enclosed_power_fraction",
    "difference_series",
    "spectrum_compare_report",
    "write_spectrum_csv",
    "read_spectrum_csv",
    "write_residual_csv",
    "read_residual_csv",
    "write_difference_csv",
    "read_difference_csv",
]

MONTHLY_FS = 12.0


def dft(values):
    """Direct O(N^2) DFT, ``X[k] = sum_n x[n] exp(-2 pi i k n / N)``."""
    x = np.asarray(values, dtype=float)
    n = x.size
    kn = np.outer(np.arange(n), np.arange(n)) % n  # exact integer phase index
    twiddle = np.exp(-2j * np.pi * np.arange(n) / n)
    return twiddle[kn] @ x


@dataclass(frozen=True, eq=False)
class PowerSpectrum:
    freqs: np.ndarray
    power: np.ndarray
    n_samples: int
    fs: float = MONTHLY_FS

    def __len__(self):
        return self.power.size

    @property
    def total_power(self):
        return float(np.sum(self.power))

    def bin_of(self, freq):
        """Index of the bin nearest ``freq``."""
        return int(np.argmin(np.abs(self.freqs - freq)))


def periodogram(values, fs=MONTHLY_FS, method="fft"):
    """One-sided periodogram of ``values``.

    ``method`` is ``"fft"`` (numpy) or ``"direct"`` (the O(N^2) sum); both
    give the same spectrum to rounding.
    """
    x = np.asarray(values, dtype=float).reshape(-1)
    n = x.size
    if n < 2:
        raise ValueError("periodogram needs at least 2 samples")
    if not fs > 0:
        raise ValueError("fs must be positive")
    if method == "fft":
        spec = np.fft.rfft(x)
    elif method == "direct":
        spec = dft(x)[: n // 2 + 1]
    else:
        raise ValueError(f"unknown method {method!r}")
    power = np.abs(spec) ** 2 / n**2
    stop = n // 2 if n % 2 == 0 else n // 2 + 1
    power[1:stop] *= 2.0
    freqs = np.arange(n // 2 + 1) * (fs / n)
    return PowerSpectrum(freqs, power, n, float(fs))


def enclosed_power_fraction(delta_power, reference_power):
    """``sum |delta| / sum reference``."""
    total = float(np.sum(reference_power))
    if total <= 0:
        raise ValueError("reference spectrum has no power")
    return float(np.sum(np.abs(delta_power)) / total)


@dataclass(frozen=True, eq=False)
class ResidualSpectrum:
    """Per-bin ``predicted - actual`` power and its enclosed fraction."""

    freqs: np.ndarray
    delta_power: np.ndarray
    enclosed_power_fraction: float

    @property
    def peak_index(self):
        return int(np.argmax(np.abs(self.delta_power)))

    @property
    def peak_freq(self):
        return float(self.freqs[self.peak_index])


def residual_fps(predicted, actual):
    """Residual spectrum of ``predicted`` against ``actual``."""
    if (predicted.n_samples != actual.n_samples or predicted.fs != actual.fs):
        raise ValueError(f"spectra on different grids: N={predicted.n_samples}, "
                         f"fs={predicted.fs} vs N={actual.n_samples}, fs={actual.fs}")
    delta = predicted.power - actual.power
    return ResidualSpectrum(actual.freqs.copy(), delta,
                            enclosed_power_fraction(delta, actual.power))


@dataclass(frozen=True, eq=False)
class DifferenceSeries:
    start_year: int
    start_month: int
    deltas: np.ndarray

    def __len__(self):
        return self.deltas.size

    def months(self):
        k = self.start_year * 12 + (self.start_month - 1) + np.arange(len(self))
        return k // 12, k % 12 + 1


def difference_series(predicted, actual):
    """``predicted - actual`` in millimetres over the predicted months.

    ``actual`` may cover a longer span; it is cut to ``predicted``'s months.
    """
    offset = actual.index_of(predicted.start_year, predicted.start_month)
    if offset < 0 or offset + len(predicted) > len(actual):
        raise SeriesError(
            f"predicted {predicted.start_year}-{predicted.start_month:02d}..."
            f"{predicted.end[0]}-{predicted.end[1]:02d} not covered by actual "
            f"{actual.start_year}-{actual.start_month:02d}...{actual.end[0]}-{actual.end[1]:02d}")
    ref = actual.values[offset:offset + len(predicted)]
    return DifferenceSeries(predicted.start_year, predicted.start_month,
                            predicted.values - ref)


@dataclass(frozen=True, eq=False)
class SpectrumComparison:
    """Both panels of the model-vs-drift comparison.

    ``model`` is predicted vs actual over the test period; ``drift`` is the
    actual test period against the actual training period (equal-length
    segments, see :func:`spectrum_compare_report`).
    """

    model: ResidualSpectrum
    drift: ResidualSpectrum
    n_model: int
    n_drift: int

    @property
    def model_fraction(self):
        return self.model.enclosed_power_fraction

    @property
    def drift_fraction(self):
        return self.drift.enclosed_power_fraction

    @property
    def model_beats_drift(self):
        return self.model_fraction < self.drift_fraction


def spectrum_compare_report(train_actual, test_actual, test_predicted, fs=MONTHLY_FS):
    """Residual spectra for predicted-vs-actual and test-vs-training.

    Training and test periods usually differ in length; the drift panel
    compares the last ``m`` training months with the first ``m`` test months,
    ``m`` being the shorter length, so both spectra share one frequency grid.
    """
    train_actual = np.asarray(getattr(train_actual, "values", train_actual), float)
    test_actual = np.asarray(getattr(test_actual, "values", test_actual), float)
    test_predicted = np.asarray(getattr(test_predicted, "values", test_predicted), float)
    if min(train_actual.size, test_actual.size, test_predicted.size) < 2:
        raise ValueError("every sequence needs at least 2 samples")
    if test_actual.size != test_predicted.size:
        raise ValueError(f"test actual ({test_actual.size}) and predicted "
                         f"({test_predicted.size}) lengths differ")
    model = residual_fps(periodogram(test_predicted, fs), periodogram(test_actual, fs))
    m = min(train_actual.size, test_actual.size)
    drift = residual_fps(periodogram(test_actual[:m], fs), periodogram(train_actual[-m:], fs))
    return SpectrumComparison(model, drift, test_actual.size, m)


def _write_rows(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def _read_rows(path, header):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        got = next(reader, None)
        if got is None or tuple(got) != tuple(header):
            raise ValueError(f"{path}: expected header {','.join(header)!r}")
        return [row for row in reader if row]


def write_spectrum_csv(spectrum, path):
    _write_rows(path, ("freq_cycles_per_year", "power"),
                ((format_value(f), format_value(p)) for f, p in zip(spectrum.freqs, spectrum.power)))


def read_spectrum_csv(path, fs=MONTHLY_FS):
    """Read a spectrum CSV; ``n_samples`` is recovered from the bin spacing."""
    rows = _read_rows(path, ("freq_cycles_per_year", "power"))
    freqs = np.array([float(r[0]) for r in rows])
    power = np.array([float(r[1]) for r in rows])
    n = int(round(fs / freqs[1])) if freqs.size > 1 else 2
    return PowerSpectrum(freqs, power, n, float(fs))


def write_residual_csv(residual, path):
    _write_rows(path, ("freq_cycles_per_year", "delta_power"),
                ((format_value(f), format_value(d))
                 for f, d in zip(residual.freqs, residual.delta_power)))


def read_residual_csv(path):
    """Frequencies and signed power differences from a residual CSV."""
    rows = _read_rows(path, ("freq_cycles_per_year", "delta_power"))
    return (np.array([float(r[0]) for r in rows]), np.array([float(r[1]) for r in rows]))


def write_difference_csv(diff, path):
    years, months = diff.months()
    _write_rows(path, ("year", "month", "delta_mm"),
                ((str(y), str(m), format_value(d)) for y, m, d in zip(years, months, diff.deltas)))


def read_difference_csv(path):
    rows = _read_rows(path, ("year", "month", "delta_mm"))
    if not rows:
        raise ValueError(f"{path}: no rows")
    return DifferenceSeries(int(rows[0][0]), int(rows[0][1]),
                            np.array([float(r[2]) for r in rows]))
