"""Class-pairwise parameterized NMF with GA-tuned per-pair weights."""

import json

from ._cnmf import (
    DataError,
    SingularError,
    enumerate_pairs,
    evaluate_chromosome,
    evaluate_unmf,
    frnmf,
    ga_optimize,
    gnmf,
    knn_graph,
    knn_label,
    load_csv,
    majority_vote,
    make_blobs,
    minmax_scale,
    nmf,
    project,
)
from ._cnmf import default_run_config_json as _default_config_json
from ._cnmf import run_experiment_json as _run_experiment_json

__all__ = [
    "DataError",
    "SingularError",
    "default_run_config",
    "enumerate_pairs",
    "evaluate_chromosome",
    "evaluate_unmf",
    "frnmf",
    "ga_optimize",
    "gnmf",
    "knn_graph",
    "knn_label",
    "load_csv",
    "majority_vote",
    "make_blobs",
    "minmax_scale",
    "nmf",
    "project",
    "run_experiment",
]


def default_run_config():
    """Every run setting with its default value, as a dict."""
    return json.loads(_default_config_json())


def run_experiment(dataset, **overrides):
    """Run the GA-tuned cNMF/uNMF grid and return the report as a dict.

    ``overrides`` may hold any key of :func:`default_run_config`; a ``ga`` dict is merged.
    """
    config = default_run_config()
    config["dataset"] = str(dataset)
    ga = overrides.pop("ga", None)
    unknown = set(overrides) - set(config)
    if unknown:
        raise KeyError(f"unknown run settings: {sorted(unknown)}")
    config.update(overrides)
    if ga:
        config["ga"].update(ga)
    return json.loads(_run_experiment_json(json.dumps(config)))
