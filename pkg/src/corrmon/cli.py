"""Command-line entry points.

Batch subcommands (calibrate, simulate, preprocess, train, evaluate) run the
library in-process; serve starts the HTTP monitoring service.
"""

from __future__ import annotations

import dataclasses
import json
import os
import sys

import click
import pandas as pd

from .ingest import preprocess as run_preprocess
from .ml import (
    evaluate_models,
    load_feature_frame,
    load_models_dir,
    time_series_split,
    train_models,
)
from .physics import (
    CalibrationPoint,
    ModelParams,
    calibrate as fit_params,
)
from .simnet import NetworkConfig, SensorNetworkSim, default_config, write_corpus

# Nominal parameters used by serve when no calibration file is supplied:
# roughly 10 um/year at the long-run mean conditions (30.3 C, 66.5 %RH).
NOMINAL_C = 1.4e10
NOMINAL_N = 3.0

FAMILY_CHOICES = ("linear", "forest", "gbm", "gbm2", "all")


def _load_params(path: str) -> ModelParams:
    with open(path) as fh:
        doc = json.load(fh)
    return ModelParams(C=doc["C"], n=doc["n"])


@click.group()
def main():
    """Heritage corrosion monitoring toolkit."""


@main.command()
@click.option("--input", "input_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--c0", default=50.0, show_default=True, help="Initial C.")
@click.option("--n0", default=1.5, show_default=True, help="Initial n.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def calibrate(input_path, c0, n0, out_path):
    """Fit (C, n) to observed corrosion rates.

    Input CSV columns: rh_frac,temp_c,observed_cr_um_yr.
    """
    df = pd.read_csv(input_path)
    points = [CalibrationPoint(rh_frac=row.rh_frac, temp_c=row.temp_c,
                               observed_cr=row.observed_cr_um_yr)
              for row in df.itertuples()]
    result = fit_params(points, init=ModelParams(C=c0, n=n0))
    doc = {
        "C": result.params.C,
        "n": result.params.n,
        "Ea": result.params.Ea,
        "R_gas": result.params.R_gas,
        "residual_norm": result.residual_norm,
        "converged": result.converged,
    }
    with open(out_path, "w") as fh:
        json.dump(doc, fh, indent=2)
    click.echo(f"C={result.params.C:.6g} n={result.params.n:.6g} "
               f"residual_norm={result.residual_norm:.6g} "
               f"converged={result.converged}")
    if not result.converged:
        sys.exit(1)


@main.command()
@click.option("--days", type=float, default=None, help="Simulated days.")
@click.option("--minutes", type=int, default=None, help="Simulated minutes.")
@click.option("--seed", default=0, show_default=True)
@click.option("--loss-p", type=float, default=None,
              help="Uplink batch loss probability (overrides config).")
@click.option("--config", "config_path", default=None,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--retransmit", is_flag=True, help="Recover lost batches.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def simulate(days, minutes, seed, loss_p, config_path, retransmit, out_path):
    """Run the sensor-network simulation and write the gateway corpus."""
    if (days is None) == (minutes is None):
        raise click.UsageError("pass exactly one of --days / --minutes")
    cfg = (NetworkConfig.from_json(config_path) if config_path
           else default_config())
    if loss_p is not None:
        cfg = dataclasses.replace(cfg, loss_p=loss_p)
    if retransmit:
        cfg = dataclasses.replace(cfg, retransmit=True)
    result = SensorNetworkSim(cfg, seed=seed).run(days=days, minutes=minutes)
    write_corpus(result, out_path)
    click.echo(f"{result.gateway_record_count} gateway rows, "
               f"max clock offset {result.max_abs_offset_ms} ms -> {out_path}")


@main.command()
@click.option("--in", "in_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--params", "params_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--report", "report_path", default=None,
              type=click.Path(dir_okay=False))
@click.option("--monthly", "monthly_path", default=None,
              type=click.Path(dir_okay=False))
def preprocess(in_path, params_path, out_path, report_path, monthly_path):
    """Clean a gateway corpus and emit the model feature file."""
    params = _load_params(params_path)
    acc = run_preprocess(in_path, params, out_path,
                         report_path=report_path, monthly_path=monthly_path)
    click.echo(json.dumps(acc.to_dict()))


def _resolve_grids(grid_opt):
    if grid_opt == "default":
        return None
    with open(grid_opt) as fh:
        return json.load(fh)


@main.command()
@click.option("--features", "features_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--family", default="all", show_default=True,
              type=click.Choice(FAMILY_CHOICES))
@click.option("--split", default=0.75, show_default=True)
@click.option("--seed", default=42, show_default=True)
@click.option("--grid", default="default", show_default=True,
              help='"default" or a path to a grid JSON file.')
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def train(features_path, family, split, seed, grid, out_dir):
    """Grid-search and train model families; persist them to a directory."""
    df = load_feature_frame(features_path)
    families = (["linear", "forest", "gbm", "gbm2"] if family == "all"
                else [family])
    models, _, _ = train_models(df, families=families, split_fraction=split,
                                seed=seed, grids=_resolve_grids(grid),
                                out_dir=out_dir)
    for name, model in models.items():
        click.echo(f"{name}: hp={model.hyperparameters} "
                   f"train_seconds={model.train_seconds}")


@main.command()
@click.option("--models", "models_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--features", "features_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--split", default=0.75, show_default=True,
              help="Same split fraction used for training.")
@click.option("--alarm-threshold", default=50.0, show_default=True)
@click.option("--report", "report_path", required=True,
              type=click.Path(dir_okay=False))
def evaluate(models_dir, features_path, split, alarm_threshold, report_path):
    """Score persisted models on the held-out partition of a feature file."""
    df = load_feature_frame(features_path)
    _, test_df = time_series_split(df, split)
    models = load_models_dir(models_dir)
    if not models:
        raise click.ClickException(f"no model files in {models_dir}")
    report = evaluate_models(models, test_df, alarm_threshold=alarm_threshold)
    with open(report_path, "w") as fh:
        json.dump(report, fh, indent=2)
    for name, entry in report["models"].items():
        click.echo(f"{name}: rmse={entry['rmse']:.6g} r2={entry['r2']}")


@main.command()
@click.option("--models", "models_dir", default=None,
              type=click.Path(file_okay=False))
@click.option("--params", "params_path", default=None,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8080, show_default=True)
@click.option("--tick-ms", default=2000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--alarm-threshold", default=50.0, show_default=True)
@click.option("--static", "static_dir", default=None,
              type=click.Path(file_okay=False),
              help="Directory with the built dashboard bundle.")
def serve(models_dir, params_path, host, port, tick_ms, seed,
          alarm_threshold, static_dir):
    """Start the live monitoring HTTP service."""
    import uvicorn

    from .service import MonitorEngine, create_app

    params = (_load_params(params_path) if params_path
              else ModelParams(C=NOMINAL_C, n=NOMINAL_N))
    models = {}
    metrics = {}
    if models_dir is not None:
        try:
            models = load_models_dir(models_dir)
            eval_path = os.path.join(models_dir, "eval.json")
            if os.path.exists(eval_path):
                with open(eval_path) as fh:
                    metrics = json.load(fh).get("models", {})
        except Exception as exc:  # fall back to contingency mode
            click.echo(f"model loading failed ({exc}); running in "
                       "contingency mode", err=True)
            models = {}
    engine = MonitorEngine(params, models=models, seed=seed,
                           alarm_threshold=alarm_threshold)
    engine.model_metrics = metrics
    app = create_app(engine, tick_ms=tick_ms, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
