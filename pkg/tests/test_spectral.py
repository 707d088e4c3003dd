import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from abfrain.spectral import (DifferenceSeries, dft, difference_series, periodogram,
                              read_difference_csv, read_residual_csv, read_spectrum_csv,
                              residual_fps, spectrum_compare_report, write_difference_csv,
                              write_residual_csv, write_spectrum_csv)
from abfrain.timeseries import MonthlySeries, SeriesError
from oracles import brute_dft, brute_one_sided_power


def test_grid():
    ps = periodogram(np.arange(24.0), 12.0)
    assert len(ps) == 13
    assert_allclose(ps.freqs, np.arange(13) * 0.5)
    assert len(periodogram(np.arange(25.0), 12.0)) == 13


def test_constant_is_dc_only():
    ps = periodogram(np.full(60, 3.0), 12.0)
    assert ps.power[0] == pytest.approx(9.0, rel=1e-12)
    assert np.all(np.abs(ps.power[1:]) < 1e-12)


@pytest.mark.parametrize("method", ["fft", "direct"])
def test_bin_aligned_cosine(method):
    n = 120
    ps = periodogram(np.cos(2 * np.pi * np.arange(n) / 12), 12.0, method=method)
    k = ps.bin_of(1.0)
    assert ps.freqs[k] == 1.0
    assert ps.power[k] == pytest.approx(0.5, abs=1e-9)
    assert np.all(np.delete(ps.power, k) < 1e-12)


def test_nyquist_not_doubled():
    x = np.cos(np.pi * np.arange(16))  # alternating +-1, all power at fs/2
    ps = periodogram(x, 12.0)
    assert ps.power[-1] == pytest.approx(1.0, abs=1e-12)
    assert ps.freqs[-1] == 6.0


@settings(max_examples=25, deadline=None)
@given(n=st.integers(2, 300), seed=st.integers(0, 2**32 - 1))
def test_parseval(n, seed):
    x = np.random.default_rng(seed).normal(size=n) * 50 + 100
    ps = periodogram(x)
    assert ps.total_power == pytest.approx(np.mean(x**2), rel=1e-9)


@settings(max_examples=10, deadline=None)
@given(n=st.integers(2, 64), seed=st.integers(0, 2**32 - 1))
def test_matches_brute_force(n, seed):
    x = np.random.default_rng(seed).uniform(0, 400, n)
    ref = brute_one_sided_power(x)
    assert_allclose(periodogram(x, method="direct").power, ref, rtol=1e-9, atol=1e-9 * ref.max())
    assert_allclose(periodogram(x, method="fft").power, ref, rtol=1e-9, atol=1e-9 * ref.max())


def test_dft_conjugate_symmetry():
    x = np.random.default_rng(1).normal(size=37)
    X = dft(x)
    assert_allclose(X, brute_dft(list(x)), atol=1e-9)
    assert_allclose(X[1:], np.conj(X[1:][::-1]), atol=1e-9)


def test_scaling():
    x = np.random.default_rng(2).normal(size=97)
    p1, p3 = periodogram(x), periodogram(3.0 * x)
    assert_allclose(p3.power, 9.0 * p1.power, rtol=1e-12, atol=1e-300)


def test_bad_input():
    with pytest.raises(ValueError):
        periodogram([1.0])
    with pytest.raises(ValueError):
        periodogram([1.0, 2.0], fs=0)


class TestResidual:
    def test_self_difference(self):
        ps = periodogram(np.random.default_rng(0).uniform(0, 1, 48))
        r = residual_fps(ps, ps)
        assert not np.any(r.delta_power)
        assert r.enclosed_power_fraction == 0

    def test_extra_component_at_three(self):
        t = np.arange(240)
        actual = np.cos(2 * np.pi * t / 12)
        predicted = actual + 0.1 * np.cos(2 * np.pi * 3 * t / 12)
        r = residual_fps(periodogram(predicted), periodogram(actual))
        assert r.peak_freq == 3.0
        assert r.delta_power[r.peak_index] == pytest.approx(0.005, abs=1e-12)
        assert r.enclosed_power_fraction == pytest.approx(0.005 / 0.5, rel=1e-9)

    def test_doubling(self):
        x = np.random.default_rng(3).uniform(0, 1, 60)
        a, p = periodogram(x), periodogram(2 * x)
        assert_allclose(p.power, 4 * a.power, rtol=1e-12)
        assert_allclose(residual_fps(p, a).delta_power, 3 * a.power, rtol=1e-12)

    def test_antisymmetry(self):
        rng = np.random.default_rng(4)
        a, p = periodogram(rng.uniform(size=50)), periodogram(rng.uniform(size=50))
        assert_array_equal(residual_fps(p, a).delta_power, -residual_fps(a, p).delta_power)

    def test_grid_mismatch(self):
        with pytest.raises(ValueError, match="grid"):
            residual_fps(periodogram(np.ones(10) + np.arange(10)), periodogram(np.arange(12.0)))


class TestDifference:
    def test_identical(self):
        s = MonthlySeries(1900, 1, np.arange(10.0))
        assert not np.any(difference_series(s, s).deltas)

    def test_delayed_peak(self):
        # prediction peaks in June, the actual record one month later
        pred = np.full(12, 10.0)
        actual = np.full(12, 10.0)
        pred[5], actual[6] = 300.0, 300.0
        d = difference_series(MonthlySeries(1950, 1, pred), MonthlySeries(1950, 1, actual)).deltas
        nz = np.flatnonzero(d)
        assert list(nz) == [5, 6]
        # predicted-minus-actual: over-prediction first, then the late rain
        assert d[5] > 0 and d[6] < 0

    def test_antisymmetry(self):
        rng = np.random.default_rng(5)
        a = MonthlySeries(1900, 3, rng.uniform(0, 9, 20))
        b = MonthlySeries(1900, 3, rng.uniform(0, 9, 20))
        assert_array_equal(difference_series(a, b).deltas, -difference_series(b, a).deltas)

    def test_cuts_actual_to_prediction(self):
        actual = MonthlySeries(1900, 1, np.arange(100.0))
        pred = actual.slice(49)
        d = difference_series(pred, actual)
        assert (d.start_year, d.start_month) == (1904, 2)
        assert not np.any(d.deltas)

    def test_misaligned(self):
        with pytest.raises(SeriesError):
            difference_series(MonthlySeries(1899, 1, np.ones(5)), MonthlySeries(1900, 1, np.ones(5)))


class TestCompare:
    def test_perfect_stationary(self):
        t = np.arange(480)
        x = 100 + 80 * np.cos(2 * np.pi * t / 12)
        c = spectrum_compare_report(x[:240], x[240:], x[240:])
        assert c.model_fraction == 0
        assert c.drift_fraction < 1e-12

    def test_perfect_predictions_with_drift(self):
        t = np.arange(480)
        x = 100 + (80 + 0.1 * t) * np.cos(2 * np.pi * t / 12)
        c = spectrum_compare_report(x[:240], x[240:], x[240:])
        assert c.model_fraction == 0 < c.drift_fraction
        assert c.model_beats_drift

    def test_unequal_lengths_use_common_grid(self):
        rng = np.random.default_rng(0)
        c = spectrum_compare_report(rng.uniform(size=480), rng.uniform(size=564),
                                    rng.uniform(size=564))
        assert c.n_drift == 480 and c.n_model == 564
        assert len(c.drift.freqs) == 241 and len(c.model.freqs) == 283

    def test_degenerate(self):
        with pytest.raises(ValueError):
            spectrum_compare_report([1.0], [1.0, 2.0], [1.0, 2.0])


class TestCsv:
    def test_spectrum(self, tmp_path):
        ps = periodogram(np.random.default_rng(1).uniform(0, 300, 120))
        write_spectrum_csv(ps, tmp_path / "s.csv")
        back = read_spectrum_csv(tmp_path / "s.csv")
        assert back.n_samples == 120
        assert_array_equal(back.power, ps.power)
        assert_array_equal(back.freqs, ps.freqs)
        assert (tmp_path / "s.csv").read_text().splitlines()[0] == "freq_cycles_per_year,power"

    def test_residual(self, tmp_path):
        rng = np.random.default_rng(2)
        r = residual_fps(periodogram(rng.uniform(size=30)), periodogram(rng.uniform(size=30)))
        write_residual_csv(r, tmp_path / "r.csv")
        f, d = read_residual_csv(tmp_path / "r.csv")
        assert_array_equal(d, r.delta_power)
        assert_array_equal(f, r.freqs)

    def test_difference(self, tmp_path):
        diff = DifferenceSeries(1897, 2, np.array([1.5, -2.25, 0.0]))
        write_difference_csv(diff, tmp_path / "d.csv")
        assert (tmp_path / "d.csv").read_text() == (
            "year,month,delta_mm\n1897,2,1.5\n1897,3,-2.25\n1897,4,0.0\n")
        back = read_difference_csv(tmp_path / "d.csv")
        assert (back.start_year, back.start_month) == (1897, 2)
        assert_array_equal(back.deltas, diff.deltas)
