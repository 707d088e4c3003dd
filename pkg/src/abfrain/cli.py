"""Command-line front end: ``abfrain {synth,train,predict,analyze}``."""

from __future__ import annotations

import argparse
import logging
import os
import sys

import numpy as np

from . import abfnn, pipeline
from .timeseries import NormalizationParams, SeriesError, load_csv, save_csv, synthesize_rainfall
from .trainer import TrainConfig, TrainingDiverged, predict_series

class CLIError(Exception):
    pass


def _topology(text):
    parts = text.replace("-", ",").split(",")
    try:
        sizes = [int(p) for p in parts if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad topology {text!r}") from None
    if len(sizes) < 2 or any(n <= 0 for n in sizes):
        raise argparse.ArgumentTypeError(f"bad topology {text!r}")
    return sizes


def _years(text):
    n = int(text)
    if n < 5:
        raise argparse.ArgumentTypeError(f"need at least 5 years, got {n}")
    return n


def _common(p, data=True):
    if data:
        p.add_argument("--data", required=True, help="monthly rainfall CSV (year,month,rainfall_mm)")
    p.add_argument("--out-dir", default="run", help="output directory (default: %(default)s)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="abfrain", description="Adaptive basis function network rainfall forecasting")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic monthly rainfall CSV")
    p.add_argument("--years", type=_years, default=87)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.2, help="noise level (default: %(default)s)")
    p.add_argument("--drift", type=float, default=0.0,
                   help="fractional amplitude change per century (default: %(default)s)")
    p.add_argument("--start-year", type=int, default=1893)
    p.add_argument("--out", required=True, help="CSV path to write")

    p = sub.add_parser("train", help="train on the leading years of a series")
    _common(p)
    p.add_argument("--train-years", default="40",
                   help="leading years (N) or inclusive range (FIRST-LAST) (default: %(default)s)")
    p.add_argument("--topology", type=_topology, default=list(pipeline.DEFAULT_TOPOLOGY),
                   help="layer sizes, e.g. 12,7,1")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--beta", type=float, default=TrainConfig.beta)
    p.add_argument("--max-epochs", type=int, default=TrainConfig.max_epochs)
    p.add_argument("--target-rmse", type=float, default=TrainConfig.target_rmse)
    p.add_argument("--patience", type=int, default=TrainConfig.patience)
    p.add_argument("--mode", choices=("batch", "online"), default=TrainConfig.mode)
    p.add_argument("--checkpoint-every", type=int, default=0,
                   help="also checkpoint every N epochs (default: end only)")
    p.add_argument("--freeze-biases", action="store_true", help="train without bias terms")

    for name, help_ in (("predict", "one-step-ahead predictions for the whole series"),
                        ("analyze", "difference series, spectra and residual spectra")):
        p = sub.add_parser(name, help=help_)
        _common(p)
        p.add_argument("--checkpoint", help="checkpoint file (default: OUT_DIR/model.abf)")
        if name == "analyze":
            p.add_argument("--normalized-spectra", action="store_true",
                           help="compute spectra on normalized values instead of millimetres")
    return parser


def _load_series(path):
    if not os.path.exists(path):
        raise CLIError(f"data file not found: {path}")
    try:
        return load_csv(path)
    except SeriesError as exc:
        raise CLIError(str(exc)) from None


def _load_model(args, series):
    ckpt = args.checkpoint or os.path.join(args.out_dir, "model.abf")
    side = pipeline.sidecar_path(ckpt)
    for path in (ckpt, side):
        if not os.path.exists(path):
            raise CLIError(f"missing {path} (run `abfrain train` first)")
    try:
        net = abfnn.load_checkpoint(ckpt)
        meta = pipeline.read_sidecar(side)
    except (ValueError, KeyError) as exc:
        raise CLIError(str(exc)) from None
    if list(meta["topology"]) != net.topology:
        raise CLIError(f"{side} records topology {meta['topology']} but {ckpt} "
                       f"holds {net.topology}")
    if tuple(meta["train_start"]) != (series.start_year, series.start_month):
        y, m = meta["train_start"]
        raise CLIError(f"model was trained on data starting {y}-{m:02d}, but {args.data} "
                       f"starts {series.start_year}-{series.start_month:02d}")
    return net, NormalizationParams.from_dict(meta["normalization"]), int(meta["train_months"])


def cmd_synth(args):
    try:
        series = synthesize_rainfall(args.years, seed=args.seed, noise_level=args.noise,
                                     drift=args.drift, start_year=args.start_year)
    except SeriesError as exc:
        raise CLIError(str(exc)) from None
    parent = os.path.dirname(os.path.abspath(args.out))
    if not os.path.isdir(parent):
        raise CLIError(f"cannot write {args.out}: directory {parent} does not exist")
    save_csv(series, args.out)
    v = series.values
    print(args.out)
    print(f"{len(series)} months {series.start_year}-{series.start_month:02d}.."
          f"{series.end[0]}-{series.end[1]:02d}; mean {np.mean(v):.2f} mm, "
          f"min {np.min(v):.2f}, max {np.max(v):.2f}")


def cmd_train(args):
    series = _load_series(args.data)
    try:
        cfg = TrainConfig(beta=args.beta, max_epochs=args.max_epochs, target_rmse=args.target_rmse,
                          patience=args.patience, mode=args.mode, seed=args.seed,
                          freeze_biases=args.freeze_biases,
                          checkpoint_every=args.checkpoint_every)
        months = pipeline.parse_train_years(args.train_years, series)
    except (ValueError, SeriesError) as exc:
        raise CLIError(str(exc)) from None
    os.makedirs(args.out_dir, exist_ok=True)
    ckpt = os.path.join(args.out_dir, "model.abf")
    try:
        run = pipeline.run_training(series, months, args.topology, cfg,
                                    checkpoint_path=ckpt if cfg.checkpoint_every else None)
    except (TrainingDiverged, ValueError, SeriesError) as exc:
        raise CLIError(str(exc)) from None
    pipeline.write_training_outputs(run, args.out_dir)
    print(run.report.summary())
    print(f"outputs in {args.out_dir}")


def cmd_predict(args):
    series = _load_series(args.data)
    net, params, _ = _load_model(args, series)
    try:
        predicted = predict_series(net, series, params)
    except SeriesError as exc:
        raise CLIError(str(exc)) from None
    os.makedirs(args.out_dir, exist_ok=True)
    out = os.path.join(args.out_dir, "predicted.csv")
    save_csv(predicted, out)
    print(out)


def cmd_analyze(args):
    series = _load_series(args.data)
    net, params, months = _load_model(args, series)
    try:
        result = pipeline.analyze(net, series, params, months,
                                  normalized_spectra=args.normalized_spectra)
    except SeriesError as exc:
        raise CLIError(str(exc)) from None
    pipeline.write_analysis_outputs(result, args.out_dir)
    for key, value in result.metrics().items():
        print(f"{key}: {value}")


COMMANDS = {"synth": cmd_synth, "train": cmd_train, "predict": cmd_predict,
            "analyze": cmd_analyze}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except CLIError as exc:
        print(f"abfrain {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"abfrain {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
