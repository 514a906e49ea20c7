"""Monitoring system metrics, delay models and distortion simulation."""

from ._monlab import (
    FitError,
    RunAborted,
    __version__,
    bench,
    cdf,
    cli,
    efficiency,
    fit,
    management_impact,
    predict_timeliness,
    productivity,
    quantile,
    sample,
    scalability_degree,
    select_model,
    simulate,
)

__all__ = [
    "FitError",
    "RunAborted",
    "__version__",
    "bench",
    "cdf",
    "cli",
    "efficiency",
    "fit",
    "management_impact",
    "predict_timeliness",
    "productivity",
    "quantile",
    "sample",
    "scalability_degree",
    "select_model",
    "simulate",
]
