"""Sensitivity of first-tally precision to the communication policy.

Whether suppressing a class of findings helps or hurts shows up in the
sign of the derivative of precision at tally +1 with respect to each
communication rate, evaluated where everything is communicated. This
module computes those derivatives numerically from the series masses and
evaluates the known leading-order approximations, valid for small base
rate and small replication rate:

* suppressing novel negatives helps when the false-positive rate is
  below the miss rate of initial studies,
* suppressing negative replications helps only when the false-positive
  rate exceeds one half,
* suppressing positive replications helps when the miss rate exceeds the
  false-positive rate by at most one quarter.

It also hosts the one-axis parameter sweep used for scenario curves.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

from .errors import InvalidParamsError, StepSizeError
from .metrics import MetricsTable, metrics_table, tail_aggregate
from .params import CommunicationPolicy, ModelParams, validate_params
from .series import DEFAULT_CONTROL, SeriesControl, mass_arbitrary
from .solve import steady_state

GRADIENT_KEYS = ("c_new_negative", "c_rep_negative", "c_rep_positive")

SWEEP_AXES = (
    "base_rate",
    "replication_rate",
    "power",
    "false_positive_rate",
    "c_new_negative",
    "c_rep_negative",
    "c_rep_positive",
)

#: Default validity box for the small-base-rate, small-replication
#: approximations (their error terms are second order in base rate and
#: third order in replication rate).
REGIME_MAX_BASE_RATE = 0.01
REGIME_MAX_REPLICATION = 0.2


@dataclass(frozen=True)
class SuppressionReport:
    """Numeric gradients, approximate forms, and their sign conditions.

    ``conditions`` holds the three closed-form inequalities; each tells
    whether suppressing that finding class should raise precision at
    tally +1. ``regime_valid`` says whether the parameters sit inside the
    box where the approximations were derived.
    """

    numeric_gradients: dict[str, float]
    approx_derivatives: dict[str, float]
    conditions: dict[str, bool]
    regime_valid: bool
    step: float


def _two_kind_rates(params: ModelParams) -> tuple[float, float, float]:
    """(base_rate, false_positive_rate, miss_rate) of a two-kind model."""
    if len(params.kinds) != 2:
        raise InvalidParamsError(
            "communication-sensitivity analysis needs the two-kind model, "
            f"got {len(params.kinds)} kinds"
        )
    true_kind, false_kind = params.kinds
    return (
        true_kind.base_rate_share,
        false_kind.initial_positive_rate,
        1.0 - true_kind.initial_positive_rate,
    )


def _ppv1(params: ModelParams, ctl: SeriesControl) -> float:
    masses = [mass_arbitrary(params, kind, 1, ctl) for kind in params.kinds]
    true_mass = masses[0]
    total = sum(masses)
    if total <= 0.0:
        raise InvalidParamsError("no mass at tally +1; precision undefined")
    return true_mass / total


def ppv1_gradient(
    params: ModelParams,
    which: str,
    step: float = 1e-5,
    ctl: SeriesControl = DEFAULT_CONTROL,
) -> float:
    """One-sided derivative of precision at tally +1 along one
    communication rate, evaluated at full communication.

    The rates live at their upper bound 1, so the difference is backward:
    ``(ppv1(1) - ppv1(1 - step)) / step``.
    """
    if which not in GRADIENT_KEYS:
        raise InvalidParamsError(f"which must be one of {GRADIENT_KEYS}, got {which!r}")
    if not 0.0 < step < 0.1:
        raise StepSizeError(f"step must lie in (0, 0.1) for a one-sided difference, got {step}")
    if not params.comm.full:
        raise InvalidParamsError(
            "gradients are defined at full communication; got "
            f"{params.comm}"
        )
    if params.targeting_active:
        raise InvalidParamsError("gradients use the series solution; disable targeting")
    base = _ppv1(params, ctl)
    shifted_comm = replace(params.comm, **{which.removeprefix("c_"): 1.0 - step})
    shifted = _ppv1(replace(params, comm=shifted_comm), ctl)
    return (base - shifted) / step


def approx_conditions(
    params: ModelParams,
    step: float = 1e-5,
    ctl: SeriesControl = DEFAULT_CONTROL,
) -> SuppressionReport:
    """Evaluate the leading-order suppression conditions and verify them
    against numeric gradients at full communication.

    The numeric side always runs at full communication regardless of the
    communication policy carried by ``params``; the closed forms depend
    only on base rate, replication rate, and initial study quality.
    """
    b, alpha, beta = _two_kind_rates(params)
    r = params.replication_rate
    full = replace(params, comm=CommunicationPolicy(1.0, 1.0, 1.0))
    numeric = {key: ppv1_gradient(full, key, step, ctl) for key in GRADIENT_KEYS}
    lead = (1.0 - beta) / alpha if alpha > 0.0 else float("inf")
    approx = {
        "c_new_negative": -(r**2) * lead * b * (beta - alpha) * (1.0 - beta - alpha) * (5.0 - 6.0 * alpha),
        "c_rep_negative": r * b * lead * (1.0 - beta - alpha) * (1.0 + 2.0 * r * (beta - alpha)),
        "c_rep_positive": -b * r * lead * (1.0 - beta - alpha) * (1.0 - 4.0 * r * (beta - alpha)),
    }
    conditions = {
        "suppress_new_negative_helps": alpha < beta,
        "suppress_rep_negative_helps": alpha > 0.5,
        "suppress_rep_positive_helps": beta - alpha <= 0.25,
    }
    regime_valid = b <= REGIME_MAX_BASE_RATE and r <= REGIME_MAX_REPLICATION
    return SuppressionReport(
        numeric_gradients=numeric,
        approx_derivatives=approx,
        conditions=conditions,
        regime_valid=regime_valid,
        step=step,
    )


# ---------------------------------------------------------------------------
# Parameter sweeps


@dataclass(frozen=True)
class SweepPoint:
    axis_name: str
    axis_value: float
    table: MetricsTable


def _with_axis(params: ModelParams, axis: str, value: float) -> ModelParams:
    if axis in ("base_rate", "power", "false_positive_rate") and len(params.kinds) != 2:
        raise InvalidParamsError(f"axis {axis!r} needs the two-kind model")
    if axis == "base_rate":
        true_kind, false_kind = params.kinds
        kinds = (
            replace(true_kind, base_rate_share=value),
            replace(false_kind, base_rate_share=1.0 - value),
        )
        return replace(params, kinds=kinds)
    if axis == "power":
        # scenario sweeps move both study stages together
        true_kind = replace(
            params.kinds[0], initial_positive_rate=value, replication_positive_rate=value
        )
        return replace(params, kinds=(true_kind,) + params.kinds[1:])
    if axis == "false_positive_rate":
        false_kind = replace(
            params.kinds[1], initial_positive_rate=value, replication_positive_rate=value
        )
        return replace(params, kinds=(params.kinds[0], false_kind))
    if axis == "replication_rate":
        return replace(params, replication_rate=value)
    if axis in GRADIENT_KEYS:
        comm = replace(params.comm, **{axis.removeprefix("c_"): value})
        return replace(params, comm=comm)
    raise InvalidParamsError(f"axis must be one of {SWEEP_AXES}, got {axis!r}")


def sweep(
    params: ModelParams,
    axis_name: str,
    values: Sequence[float],
    *,
    true_kinds: Sequence[str] | None = None,
    window: tuple[int, int] | None = None,
    tol: float = 1e-12,
    ctl: SeriesControl = DEFAULT_CONTROL,
) -> list[SweepPoint]:
    """Steady-state metrics at each value of one swept parameter.

    Every point is solved independently (series where it applies, fixed
    point under targeting) holding all other parameters fixed; output
    order follows ``values``.
    """
    points = []
    for value in values:
        point_params = validate_params(_with_axis(params, axis_name, float(value)))
        dist = steady_state(point_params, tol=tol, ctl=ctl)
        table = metrics_table(dist, true_kinds=true_kinds)
        if window is not None:
            table = tail_aggregate(table, window)
        points.append(SweepPoint(axis_name, float(value), table))
    return points
