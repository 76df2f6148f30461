"""Low-rank expectile factor models for matrices with missing entries.

Arrays use NaN for missing cells.
"""

from ._core import (
    FactorModel,
    LrexpError,
    canonicalize,
    expectile_curves,
    fit,
    icc,
    ingest_heart_rate,
    loss_and_gradient,
    normalize,
    scalar_expectile,
    simulate,
)

__all__ = [
    "FactorModel",
    "LrexpError",
    "canonicalize",
    "expectile_curves",
    "fit",
    "icc",
    "ingest_heart_rate",
    "loss_and_gradient",
    "normalize",
    "scalar_expectile",
    "simulate",
]
__version__ = "0.1.0"
