"""Closed-form and series steady-state solutions.

Under full communication with one per-study positive rate, the steady
state frequency of a kind at tally ``s`` is a geometric series over the
number of studies a hypothesis has received, each term a binomial count
of the finding sequences that net out to ``s``. With partial
communication the same construction survives as a chain of conditional
probabilities: the chance a research event produces any observable
activity, the chance that activity is a newly published hypothesis, and
the distribution of the net tally movement contributed by later
replications, where each replication is either suppressed (tally
unchanged) or communicated with a known positive fraction.

These routes cover arbitrary communication policies and stage-dependent
study quality, but not targeted replication, which has no closed
solution here and is handled by :mod:`repliscope.recursion`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import (
    AllSuppressedError,
    InvalidParamsError,
    NotFullCommunicationError,
    RadicandError,
)
from .params import HypothesisKind, ModelParams, TallyDistribution

#: Binomial terms switch from exact integer arithmetic to log-space
#: evaluation above this study count to avoid overflow.
_EXACT_BINOMIAL_LIMIT = 60


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for the study-count series.

    Terms carry a geometric factor ``ratio**m`` in the study count ``m``;
    summation stops at the smallest depth where that factor drops below
    ``epsilon``, capped at ``m_max``. The discarded tail is then bounded
    by the geometric remainder ``ratio**(M+1) / (1 - ratio)``.
    """

    epsilon: float = 1e-14
    m_max: int = 10_000

    def __post_init__(self):
        if not self.epsilon > 0.0:
            raise InvalidParamsError(f"epsilon must be positive, got {self.epsilon!r}")
        if int(self.m_max) < 1:
            raise InvalidParamsError(f"m_max must be >= 1, got {self.m_max!r}")
        object.__setattr__(self, "m_max", int(self.m_max))

    def depth(self, ratio: float) -> int:
        """Smallest m with ratio**m < epsilon, clamped to [1, m_max]."""
        if ratio <= 0.0:
            return 1
        if ratio >= 1.0:
            return self.m_max
        m = int(math.ceil(math.log(self.epsilon) / math.log(ratio)))
        return min(max(m, 1), self.m_max)


DEFAULT_CONTROL = SeriesControl()


def binomial_pmf(k: int, n: int, p: float) -> float:
    """Binomial(n, p) mass at k; zero outside 0 <= k <= n."""
    if k < 0 or k > n:
        return 0.0
    if p <= 0.0:
        return 1.0 if k == 0 else 0.0
    if p >= 1.0:
        return 1.0 if k == n else 0.0
    if n <= _EXACT_BINOMIAL_LIMIT:
        return math.comb(n, k) * p**k * (1.0 - p) ** (n - k)
    return math.exp(
        math.lgamma(n + 1)
        - math.lgamma(k + 1)
        - math.lgamma(n - k + 1)
        + k * math.log(p)
        + (n - k) * math.log(1.0 - p)
    )


def _binomial_row(n: int, p: float) -> np.ndarray:
    """Binomial(n, p) mass over k = 0..n."""
    if p <= 0.0:
        row = np.zeros(n + 1)
        row[0] = 1.0
        return row
    if p >= 1.0:
        row = np.zeros(n + 1)
        row[-1] = 1.0
        return row
    if n <= _EXACT_BINOMIAL_LIMIT:
        return np.array([binomial_pmf(k, n, p) for k in range(n + 1)])
    k = np.arange(n + 1)
    return np.exp(
        gammaln(n + 1)
        - gammaln(k + 1)
        - gammaln(n - k + 1)
        + k * math.log(p)
        + (n - k) * math.log(1.0 - p)
    )


# ---------------------------------------------------------------------------
# Conditional building blocks


def activity_prob(params: ModelParams) -> float:
    """Probability a research event leaves any observable trace.

    Replications always count as activity (the studied hypothesis is
    already published); a novel study counts only if its finding is
    communicated.
    """
    r = params.replication_rate
    c_new_neg = params.comm.new_negative
    published = sum(
        k.base_rate_share
        * (k.initial_positive_rate + (1.0 - k.initial_positive_rate) * c_new_neg)
        for k in params.kinds
    )
    return r + (1.0 - r) * published


def new_given_activity_prob(params: ModelParams) -> float:
    """Probability an observable event is a newly published hypothesis."""
    p_act = activity_prob(params)
    if p_act <= 0.0:
        raise InvalidParamsError(
            "no research event is ever observable with these parameters"
        )
    return (p_act - params.replication_rate) / p_act


def uncommunicated_prob(params: ModelParams, kind=None) -> float:
    """Probability one replication finding of ``kind`` stays unpublished."""
    k = params.kind(kind)
    p = k.replication_positive_rate
    return p * (1.0 - params.comm.rep_positive) + (1.0 - p) * (1.0 - params.comm.rep_negative)


def positive_given_communicated(params: ModelParams, kind=None) -> float:
    """Probability a communicated replication finding of ``kind`` is positive."""
    k = params.kind(kind)
    q_unc = uncommunicated_prob(params, k)
    if q_unc >= 1.0:
        raise AllSuppressedError(
            f"every replication finding of kind {k.label!r} is suppressed; "
            "no finding is ever communicated"
        )
    return k.replication_positive_rate * params.comm.rep_positive / (1.0 - q_unc)


def seq_prob(z: int, n: int, positive_prob: float) -> float:
    """Probability that n communicated findings net to a tally change z.

    An empty sequence nets to zero; otherwise the count of positives must
    be the integer (n + z) / 2, giving a binomial mass (zero when n and z
    have different parity or |z| > n).
    """
    if n < 0:
        raise ValueError(f"sequence length must be >= 0, got {n}")
    z = int(z)
    if n == 0:
        return 1.0 if z == 0 else 0.0
    if (n + z) % 2 != 0 or abs(z) > n:
        return 0.0
    return binomial_pmf((n + z) // 2, n, positive_prob)


def uncommunicated_count_prob(u: int, m: int, uncomm_prob: float) -> float:
    """Probability that u of m replication findings go unpublished."""
    if not 0 <= u <= m:
        raise ValueError(f"need 0 <= u <= m, got u={u}, m={m}")
    return binomial_pmf(u, m, uncomm_prob)


# ---------------------------------------------------------------------------
# Full-communication series and closed form


def _require_plain_series(params: ModelParams, kind: HypothesisKind) -> None:
    if not params.comm.full:
        raise NotFullCommunicationError(
            "the plain binomial series needs every finding communicated; "
            f"got communication rates {params.comm}; use the "
            "arbitrary-communication solution instead"
        )
    if kind.initial_positive_rate != kind.replication_positive_rate:
        raise NotFullCommunicationError(
            "the plain binomial series needs one positive rate for all "
            f"studies of a hypothesis; kind {kind.label!r} has initial rate "
            f"{kind.initial_positive_rate} but replication rate "
            f"{kind.replication_positive_rate}; use the "
            "arbitrary-communication solution instead"
        )


def mass_full_comm(
    params: ModelParams, kind=None, s: int = 1, ctl: SeriesControl = DEFAULT_CONTROL
) -> float:
    """Steady-state mass of ``kind`` at tally ``s`` under full communication.

    Sums, over the number of studies m a hypothesis has received, the
    probability it was studied exactly m times (geometric in the
    replication rate) times the binomial probability that those m
    findings net out to ``s``. Requires full communication, identical
    study quality across stages, and no targeting.
    """
    k = params.kind(kind)
    _require_plain_series(params, k)
    if params.targeting_active:
        raise InvalidParamsError("series solutions do not cover targeted replication")
    s = int(s)
    r = params.replication_rate
    p = k.initial_positive_rate
    share = k.base_rate_share

    m = max(abs(s), 1)
    if (m + s) % 2 != 0:
        m += 1
    if r == 0.0:
        return share * seq_prob(s, 1, p) if m == 1 else 0.0
    depth = max(ctl.depth(r), m)
    total = 0.0
    while m <= depth:
        total += r ** (m - 1) * seq_prob(s, m, p)
        m += 2
    return share * (1.0 - r) * total


def closed_form_s1(params: ModelParams, kind=None) -> float:
    """Closed form for the full-communication mass at tally +1.

    Equals :func:`mass_full_comm` at ``s = 1``; the geometric-binomial
    series at that tally closes in terms of an inverse square root. The
    replication rate must keep the radicand positive (automatic for any
    rate below 1), and the removable singularity at rate 0 is handled by
    returning the exact one-study value.
    """
    k = params.kind(kind)
    _require_plain_series(params, k)
    r = params.replication_rate
    p = k.initial_positive_rate
    share = k.base_rate_share
    neg = 1.0 - p
    if r < 1e-6:
        # One-study limit: only the first (always communicated) finding.
        return share * p * (1.0 - r)
    if neg == 0.0:
        # All findings positive; only the one-study history lands on +1.
        return share * (1.0 - r)
    radicand = 1.0 - 4.0 * r * r * neg * p
    if radicand <= 0.0:
        raise RadicandError(
            f"radicand {radicand} is not positive at replication rate {r}"
        )
    return share * (1.0 - r) / (2.0 * neg * r * r) * (radicand**-0.5 - 1.0)


# ---------------------------------------------------------------------------
# Arbitrary-communication solution


def _net_move_table(params: ModelParams, kind: HypothesisKind, ctl: SeriesControl):
    """Series weight of each net tally movement from replications.

    Returns ``(table, depth)`` where ``table[z + depth]`` sums, over
    replication counts m and unpublished counts u, the chance the
    published movements net to z, each study weighted by the replication
    probability conditional on observable activity.
    """
    r = params.replication_rate
    p_act = activity_prob(params)
    if p_act <= r and r > 0.0:
        raise InvalidParamsError(
            "no novel hypothesis is ever published (zero initial positive "
            "rates with suppressed novel negatives); the steady state is undefined"
        )
    ratio = r / p_act if p_act > 0.0 else 0.0
    depth = ctl.depth(ratio)
    table = np.zeros(2 * depth + 1)
    if ratio <= 0.0:
        return table, depth
    q_unc = uncommunicated_prob(params, kind)
    q_pos = positive_given_communicated(params, kind)  # raises when all suppressed
    # weight[n]: total series weight of histories with n published moves
    weight = np.zeros(depth + 1)
    ratio_m = 1.0
    for m in range(1, depth + 1):
        ratio_m *= ratio
        unpub = _binomial_row(m, q_unc)
        weight[: m + 1] += ratio_m * unpub[::-1]
    table[depth] += weight[0]
    for n in range(1, depth + 1):
        moves = _binomial_row(n, q_pos)
        z = 2 * np.arange(n + 1) - n
        np.add.at(table, z + depth, weight[n] * moves)
    return table, depth


def mass_arbitrary(
    params: ModelParams, kind=None, s: int = 1, ctl: SeriesControl = DEFAULT_CONTROL
) -> float:
    """Steady-state mass of ``kind`` at tally ``s`` for any communication.

    The mass factors into the kind's share of novel hypotheses, the
    probability of observable activity, the probability that activity is
    a new publication, and the chance that the initial finding plus the
    net replication movement land on ``s``. Summed over all tallies and
    kinds this reproduces the activity-closure total returned by
    :func:`total_mass`.
    """
    if params.targeting_active:
        raise InvalidParamsError("series solutions do not cover targeted replication")
    k = params.kind(kind)
    s = int(s)
    table, depth = _net_move_table(params, k, ctl)
    p_act = activity_prob(params)
    p_new = new_given_activity_prob(params)
    prefactor = k.base_rate_share * p_act * p_new

    def from_first(first: int) -> float:
        z = s - first
        base = 1.0 if s == first else 0.0
        if abs(z) <= depth:
            base += table[z + depth]
        return base

    p_init = k.initial_positive_rate
    return prefactor * (
        p_init * from_first(+1)
        + (1.0 - p_init) * params.comm.new_negative * from_first(-1)
    )


def total_mass(params: ModelParams) -> float:
    """Exact sum of the arbitrary-communication masses over all tallies.

    Every per-study geometric layer sums to one across movements, so the
    series total closes to ``p_act * (p_act - r) / (1 - r)`` with
    ``p_act`` the activity probability. Under full communication this is
    exactly 1.
    """
    p_act = activity_prob(params)
    r = params.replication_rate
    return p_act * (p_act - r) / (1.0 - r)


def series_distribution(
    params: ModelParams,
    ctl: SeriesControl = DEFAULT_CONTROL,
    tally_bound: int | None = None,
) -> TallyDistribution:
    """Raw series masses for every kind over a tally range.

    With ``tally_bound=None`` the support is wide enough to hold every
    term the truncation keeps, so the distribution total matches
    :func:`total_mass` up to the truncation remainder.
    """
    if params.targeting_active:
        raise InvalidParamsError("series solutions do not cover targeted replication")
    p_act = activity_prob(params)
    p_new = new_given_activity_prob(params)
    tables = [_net_move_table(params, k, ctl) for k in params.kinds]
    if tally_bound is None:
        tally_bound = max(depth for _, depth in tables) + 1
    tally_bound = int(tally_bound)
    mass = np.zeros((len(params.kinds), 2 * tally_bound + 1))
    for ki, k in enumerate(params.kinds):
        table, depth = tables[ki]
        prefactor = k.base_rate_share * p_act * p_new
        p_init = k.initial_positive_rate
        for first, branch in ((+1, p_init), (-1, (1.0 - p_init) * params.comm.new_negative)):
            if branch == 0.0:
                continue
            if abs(first) <= tally_bound:
                mass[ki, first + tally_bound] += prefactor * branch
            z_lo = max(-depth, -tally_bound - first)
            z_hi = min(depth, tally_bound - first)
            if z_lo > z_hi:
                continue
            cols = np.arange(z_lo, z_hi + 1) + first + tally_bound
            mass[ki, cols] += prefactor * branch * table[z_lo + depth : z_hi + depth + 1]
    return TallyDistribution(params.kind_labels, tally_bound, mass, "raw")
