"""Adaptive basis function networks for monthly rainfall forecasting."""

from .abfnn import (EPSILON_A, ForwardTrace, Gradients, Layer, Network, activate, activate_deriv,
                    apply_updates, backward, forward, init_network, load_checkpoint, loss,
                    param_deriv, predict, save_checkpoint)
from .spectral import (DifferenceSeries, PowerSpectrum, ResidualSpectrum, SpectrumComparison,
                       difference_series, periodogram, residual_fps, spectrum_compare_report)
from .timeseries import (MonthlySeries, NormalizationParams, SeriesError, WindowedDataset,
                         build_windows, fit_normalization, load_csv, save_csv,
                         synthesize_rainfall)
from .trainer import (TrainConfig, TrainReport, TrainingDiverged, evaluate, predict_series,
                      train)

__version__ = "0.1.0"
