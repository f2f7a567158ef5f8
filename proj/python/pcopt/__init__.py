"""Probability-collectives optimization with Gaussian-mixture proposals."""

import csv
import io
import json

from ._core import (
    Error,
    Gaussian,
    MixtureModel,
    bias_variance_decompose,
    boltzmann_weights,
    cross_validate_beta,
    estimate_expected_G,
    evaluate,
    fit_gaussian,
    fit_geometric_schedule,
    fit_mixture,
    objective_names,
    softmin_weights,
    update_beta_geometric,
)
from . import _core


def _config_text(config):
    return config if isinstance(config, str) else json.dumps(config)


def run(config=None):
    """Run one optimization; `config` is a dict or JSON text. Returns the trace as a dict."""
    return json.loads(_core.run_json(_config_text(config or {})))


def run_ensemble(config, trials, threads=1):
    """Per-iteration aggregate rows (dicts of floats) over seeded trials."""
    text = _core.ensemble_csv(_config_text(config), trials, threads)
    return [{k: float(v) for k, v in row.items()} for row in csv.DictReader(io.StringIO(text))]


__all__ = [
    "Error",
    "Gaussian",
    "MixtureModel",
    "bias_variance_decompose",
    "boltzmann_weights",
    "cross_validate_beta",
    "estimate_expected_G",
    "evaluate",
    "fit_gaussian",
    "fit_geometric_schedule",
    "fit_mixture",
    "objective_names",
    "run",
    "run_ensemble",
    "softmin_weights",
    "update_beta_geometric",
]
