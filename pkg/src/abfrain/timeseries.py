"""Monthly series: CSV ingestion, scaling, sliding windows and a synthetic generator.

The input window for a target month ``t`` holds, for each of the four
preceding years (oldest first), the month before, the same month and the
month after ``t`` in that year. With a continuous month index this is a fixed
set of lags, so the December/January wrap needs no special case.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CSV_HEADER",
    "WINDOW_LAGS",
    "MIN_SERIES_LENGTH",
    "SeriesError",
    "MonthlySeries",
    "NormalizationParams",
    "WindowedDataset",
    "load_csv",
    "save_csv",
    "format_value",
    "fit_normalization",
    "build_windows",
    "synthesize_rainfall",
]

CSV_HEADER = ("year", "month", "rainfall_mm")

# Lags (in months) back from the target, oldest year first.
WINDOW_LAGS = (49, 48, 47, 37, 36, 35, 25, 24, 23, 13, 12, 11)
FIRST_TARGET = max(WINDOW_LAGS)
MIN_SERIES_LENGTH = FIRST_TARGET + 1


class SeriesError(ValueError):
    """Raised for malformed, discontinuous or otherwise unusable series data."""


def _add_months(year, month, n):
    k = year * 12 + (month - 1) + n
    return k // 12, k % 12 + 1


@dataclass(frozen=True, eq=False)
class MonthlySeries:
    """Contiguous monthly values anchored at ``start_year``/``start_month``."""

    start_year: int
    start_month: int
    values: np.ndarray
    name: str = ""

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 1 or values.size == 0:
            raise SeriesError("series must be a non-empty 1-d sequence")
        if not 1 <= int(self.start_month) <= 12:
            raise SeriesError(f"start_month must be in 1..12, got {self.start_month}")
        if not np.all(np.isfinite(values)):
            raise SeriesError("series contains non-finite values")
        if np.any(values < 0):
            i = int(np.flatnonzero(values < 0)[0])
            y, m = _add_months(self.start_year, self.start_month, i)
            raise SeriesError(f"negative rainfall {values[i]!r} at {y}-{m:02d}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "start_year", int(self.start_year))
        object.__setattr__(self, "start_month", int(self.start_month))

    def __len__(self):
        return self.values.size

    def __eq__(self, other):
        if not isinstance(other, MonthlySeries):
            return NotImplemented
        return (
            self.start_year == other.start_year
            and self.start_month == other.start_month
            and np.array_equal(self.values, other.values)
        )

    @property
    def end(self):
        """(year, month) of the last value."""
        return self.month_at(len(self) - 1)

    def month_at(self, index):
        """Calendar (year, month) of position ``index``."""
        return _add_months(self.start_year, self.start_month, int(index))

    def months(self):
        """Arrays of calendar years and months for every value."""
        k = self.start_year * 12 + (self.start_month - 1) + np.arange(len(self))
        return k // 12, k % 12 + 1

    def index_of(self, year, month):
        return (year - self.start_year) * 12 + (month - self.start_month)

    def slice(self, start, stop=None):
        """Sub-series of positions ``start:stop``, re-anchored on the calendar."""
        n = len(self)
        start, stop, _ = slice(start, stop).indices(n)
        if stop <= start:
            raise SeriesError("empty slice")
        y, m = self.month_at(start)
        return MonthlySeries(y, m, self.values[start:stop], self.name)

    def with_values(self, values, name=None):
        return MonthlySeries(self.start_year, self.start_month, values,
                             self.name if name is None else name)


def format_value(v):
    """Canonical text for a rainfall value: shortest round-trip repr."""
    return repr(float(v))


def load_csv(path, name=None):
    """Read a ``year,month,rainfall_mm`` file into a :class:`MonthlySeries`.

    Errors name the offending line number or calendar month.
    """
    path = os.fspath(path)
    if not os.path.exists(path):
        raise FileNotFoundError(f"no such data file: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SeriesError(f"{path}: empty file") from None
        if tuple(h.strip() for h in header) != CSV_HEADER:
            raise SeriesError(f"{path}:1: expected header {','.join(CSV_HEADER)!r}, "
                              f"got {','.join(header)!r}")
        values = []
        start = prev = None
        for row in reader:
            lineno = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise SeriesError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
            try:
                year, month, value = int(row[0]), int(row[1]), float(row[2])
            except ValueError:
                raise SeriesError(f"{path}:{lineno}: malformed row {','.join(row)!r}") from None
            if not 1 <= month <= 12:
                raise SeriesError(f"{path}:{lineno}: month {month} out of range")
            if not np.isfinite(value):
                raise SeriesError(f"{path}:{lineno}: non-finite rainfall {row[2]!r}")
            if value < 0:
                raise SeriesError(f"{path}:{lineno}: negative rainfall {value!r} "
                                  f"at {year}-{month:02d}")
            if prev is None:
                start = (year, month)
            else:
                expected = _add_months(*prev, 1)
                if (year, month) != expected:
                    if (year, month) <= prev:
                        raise SeriesError(f"{path}:{lineno}: duplicate or out-of-order "
                                          f"month {year}-{month:02d}")
                    raise SeriesError(f"{path}:{lineno}: calendar gap, missing "
                                      f"{expected[0]}-{expected[1]:02d}")
            prev = (year, month)
            values.append(value)
    if not values:
        raise SeriesError(f"{path}: no data rows")
    if name is None:
        name = os.path.splitext(os.path.basename(path))[0]
    return MonthlySeries(start[0], start[1], values, name)


def save_csv(series, path):
    """Write ``series`` in the canonical CSV layout (LF line endings)."""
    years, months = series.months()
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(CSV_HEADER) + "\n")
        for y, m, v in zip(years, months, series.values):
            fh.write(f"{y},{m},{format_value(v)}\n")


@dataclass(frozen=True)
class NormalizationParams:
    """Affine map from ``[lo, hi]`` onto ``[out_lo, out_hi]``."""

    lo: float
    hi: float
    out_lo: float = 0.05
    out_hi: float = 0.95

    def __post_init__(self):
        if not self.hi > self.lo:
            raise SeriesError(f"normalization needs hi > lo (got lo={self.lo}, hi={self.hi})")
        if not 0.0 <= self.out_lo < self.out_hi <= 1.0:
            raise SeriesError(f"output range must satisfy 0 <= out_lo < out_hi <= 1, "
                              f"got [{self.out_lo}, {self.out_hi}]")

    @property
    def scale(self):
        return (self.out_hi - self.out_lo) / (self.hi - self.lo)

    def normalize(self, v):
        return self.out_lo + (np.asarray(v, dtype=float) - self.lo) * self.scale

    def denormalize(self, u):
        return self.lo + (np.asarray(u, dtype=float) - self.out_lo) / self.scale

    def to_dict(self):
        return {"lo": self.lo, "hi": self.hi, "out_lo": self.out_lo, "out_hi": self.out_hi}

    @classmethod
    def from_dict(cls, d):
        return cls(float(d["lo"]), float(d["hi"]), float(d["out_lo"]), float(d["out_hi"]))


def fit_normalization(series, out_lo=0.05, out_hi=0.95):
    """Fit min/max scaling on ``series`` (a MonthlySeries or plain array)."""
    values = series.values if isinstance(series, MonthlySeries) else np.asarray(series, float)
    lo, hi = float(np.min(values)), float(np.max(values))
    if hi == lo:
        raise SeriesError("constant series: normalization undefined")
    return NormalizationParams(lo, hi, float(out_lo), float(out_hi))


@dataclass(frozen=True, eq=False)
class WindowedDataset:
    """Supervised patterns: ``inputs`` (N, 12), ``targets`` (N,), ``target_index`` (N,)."""

    inputs: np.ndarray
    targets: np.ndarray
    target_index: np.ndarray = field(default=None)

    def __post_init__(self):
        inputs = np.asarray(self.inputs, dtype=float)
        if inputs.size == 0:
            inputs = inputs.reshape(0, len(WINDOW_LAGS))
        inputs = np.atleast_2d(inputs)
        targets = np.asarray(self.targets, dtype=float).reshape(-1)
        if inputs.shape[0] != targets.shape[0]:
            raise ValueError(f"{inputs.shape[0]} inputs but {targets.shape[0]} targets")
        index = self.target_index
        index = np.arange(targets.size) if index is None else np.asarray(index, dtype=int)
        if index.shape != targets.shape:
            raise ValueError("target_index must match targets")
        if index.size > 1 and np.any(np.diff(index) <= 0):
            raise ValueError("target_index must be strictly increasing")
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "target_index", index)

    def __len__(self):
        return self.targets.size

    def select(self, mask):
        """Patterns whose entries in boolean ``mask`` are true."""
        mask = np.asarray(mask, dtype=bool)
        return WindowedDataset(self.inputs[mask], self.targets[mask], self.target_index[mask])


def build_windows(series, params):
    """Sliding-window patterns over ``series`` using ``params`` for scaling.

    Pattern for target month ``t`` (0-based, ``t >= 49``) is
    ``u[t - WINDOW_LAGS]`` with target ``u[t]``, where ``u`` is the
    normalized series.
    """
    n = len(series)
    if n < MIN_SERIES_LENGTH:
        raise SeriesError(f"series has {n} months; at least {MIN_SERIES_LENGTH} are needed")
    u = params.normalize(series.values)
    t = np.arange(FIRST_TARGET, n)
    idx = t[:, None] - np.asarray(WINDOW_LAGS)[None, :]
    return WindowedDataset(u[idx], u[t], t)


def _annual_peak(month, centre, width):
    # circular distance in months so December and January are neighbours
    d = (month - centre + 6) % 12 - 6
    return np.exp(-0.5 * (d / width) ** 2)


def synthesize_rainfall(years, seed=0, noise_level=0.2, *, start_year=1893,
                        base=25.0, monsoon_amp=320.0, cyclone_amp=260.0,
                        peak_width=1.1, modulation_amp=0.15,
                        modulation_period=4.5, drift=0.0, name="synthetic"):
    """Deterministic stand-in for a monthly rainfall record.

    Two smooth annual peaks (June and October), a slow multiplicative
    modulation with period ``modulation_period`` years, an optional linear
    ``drift`` (fractional amplitude change per century) and Gaussian noise
    whose standard deviation is ``noise_level`` times the mean seasonal
    amplitude. Values are clipped at zero.
    """
    years = int(years)
    if years < 5:
        raise SeriesError(f"need at least 5 years, got {years}")
    if noise_level < 0:
        raise SeriesError("noise_level must be non-negative")
    rng = np.random.default_rng(seed)
    n = years * 12
    t = np.arange(n)
    month = t % 12 + 1
    yr = t / 12.0
    seasonal = (monsoon_amp * _annual_peak(month, 6, peak_width)
                + cyclone_amp * _annual_peak(month, 10, peak_width))
    phase = rng.uniform(0.0, 2.0 * np.pi)
    modulation = (1.0 + modulation_amp * np.sin(2.0 * np.pi * yr / modulation_period + phase)
                  + drift * yr / 100.0)
    values = base + seasonal * modulation
    noise_scale = noise_level * float(np.mean(seasonal))
    values = values + noise_scale * rng.standard_normal(n)
    return MonthlySeries(start_year, 1, np.clip(values, 0.0, None), name)
