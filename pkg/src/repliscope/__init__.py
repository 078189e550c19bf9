"""Population dynamics of published findings.

A population of hypotheses accumulates published positive and negative
findings; each hypothesis is summarized by its tally, the signed count
of published findings. The package computes the steady-state (kind,
tally) distribution three independent ways — an analytic series, a
deterministic fixed point, and a seeded Monte Carlo — and turns it into
precision / sensitivity / specificity metrics, communication-policy
sensitivity reports, and scenario figure datasets.
"""

from . import errors
from .comms import (
    SWEEP_AXES,
    SuppressionReport,
    SweepPoint,
    approx_conditions,
    ppv1_gradient,
    sweep,
)
from .config import load_bundled, load_params, params_from_config, parse_config_text
from .figures import figure_ids, render_figure
from .metrics import (
    MetricsRow,
    MetricsTable,
    metrics_table,
    precision,
    sensitivity,
    specificity,
    tail_aggregate,
)
from .params import (
    CommunicationPolicy,
    HypothesisKind,
    ModelParams,
    StudyProfile,
    TallyDistribution,
    empty_distribution,
    fold_to_bound,
    full_communication,
    positive_rate,
    resize_to_bound,
    two_kind_params,
    validate_params,
)
from .recursion import FixedPointResult, default_initial, fixed_point, growth_factor, step
from .series import (
    DEFAULT_CONTROL,
    SeriesControl,
    activity_prob,
    binomial_pmf,
    closed_form_s1,
    mass_arbitrary,
    mass_full_comm,
    new_given_activity_prob,
    positive_given_communicated,
    seq_prob,
    series_distribution,
    total_mass,
    uncommunicated_count_prob,
    uncommunicated_prob,
)
from .simulate import SimDiagnostics, SimOutcome, distance_to
from .simulate import run as simulate
from .solve import steady_state

__version__ = "0.1.0"

__all__ = [
    "CommunicationPolicy",
    "DEFAULT_CONTROL",
    "FixedPointResult",
    "HypothesisKind",
    "MetricsRow",
    "MetricsTable",
    "ModelParams",
    "SWEEP_AXES",
    "SeriesControl",
    "SimDiagnostics",
    "SimOutcome",
    "StudyProfile",
    "SuppressionReport",
    "SweepPoint",
    "TallyDistribution",
    "activity_prob",
    "approx_conditions",
    "binomial_pmf",
    "closed_form_s1",
    "default_initial",
    "distance_to",
    "empty_distribution",
    "errors",
    "figure_ids",
    "fixed_point",
    "fold_to_bound",
    "full_communication",
    "growth_factor",
    "load_bundled",
    "load_params",
    "mass_arbitrary",
    "mass_full_comm",
    "metrics_table",
    "new_given_activity_prob",
    "params_from_config",
    "parse_config_text",
    "positive_given_communicated",
    "positive_rate",
    "ppv1_gradient",
    "precision",
    "render_figure",
    "resize_to_bound",
    "sensitivity",
    "seq_prob",
    "series_distribution",
    "simulate",
    "specificity",
    "step",
    "steady_state",
    "sweep",
    "tail_aggregate",
    "total_mass",
    "two_kind_params",
    "uncommunicated_count_prob",
    "uncommunicated_prob",
    "validate_params",
]
