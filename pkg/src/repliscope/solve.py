"""Steady-state solver dispatch.

The series solution is exact and fast wherever it applies (no targeted
replication); targeted configurations fall back to the fixed-point
iteration. Both return a normalized distribution on the parameter set's
tally support, with series tail mass beyond the bound folded onto the
endpoints so nothing is silently dropped.
"""

from __future__ import annotations

from .errors import InvalidParamsError
from .params import ModelParams, TallyDistribution, resize_to_bound
from .recursion import fixed_point
from .series import DEFAULT_CONTROL, SeriesControl, series_distribution

METHODS = ("auto", "series", "fixed-point")


def steady_state(
    params: ModelParams,
    method: str = "auto",
    tol: float = 1e-12,
    max_iter: int = 10**6,
    ctl: SeriesControl = DEFAULT_CONTROL,
) -> TallyDistribution:
    """Normalized steady-state distribution on the params' tally support."""
    if method not in METHODS:
        raise InvalidParamsError(f"method must be one of {METHODS}, got {method!r}")
    if method == "auto":
        method = "fixed-point" if params.targeting_active else "series"
    if method == "series":
        full = series_distribution(params, ctl)
        return resize_to_bound(full, params.tally_bound).normalized()
    return fixed_point(params, tol=tol, max_iter=max_iter).distribution
