"""Parameter and state types shared by every solver.

The model tracks a growing population of published hypotheses. Each
hypothesis belongs to one epistemic kind (the classic setup has two,
"true" and "false") and carries a tally: published positive findings
minus published negative findings. Kinds differ only in how often they
appear among novel hypotheses and how often a study of them comes back
positive, so any number of kinds is supported; :func:`two_kind_params`
builds the standard true/false pair.

All types are immutable value objects once constructed and may be shared
freely between threads or processes.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Iterable, Union

import numpy as np

from .errors import (
    EmptyTargetError,
    InvalidParamsError,
    InvalidProbabilityError,
    ShareSumError,
)

#: Kind shares must sum to 1 within this tolerance to be accepted.
SHARE_SUM_TOL = 1e-9
#: Shares closer to 1 than this are left untouched so that validation
#: is exactly idempotent.
SHARE_RENORM_TOL = 1e-12

BOUNDARY_MODES = ("reflecting", "absorbing")
STAGES = ("initial", "replication")


def _as_probability(name: str, value) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise InvalidProbabilityError(f"{name} must be a number in [0, 1], got {value!r}")
    if not math.isfinite(value) or not 0.0 <= value <= 1.0:
        raise InvalidProbabilityError(f"{name} must lie in [0, 1], got {value!r}")
    return value


@dataclass(frozen=True)
class StudyProfile:
    """Positive-finding rates of one study stage.

    ``power`` is the probability that a study of a more-correct hypothesis
    returns a positive finding; ``false_positive_rate`` the probability
    that a study of a less-correct hypothesis does. One profile describes
    initial studies, another (possibly identical) describes replications.
    """

    power: float
    false_positive_rate: float

    def __post_init__(self):
        object.__setattr__(self, "power", _as_probability("power", self.power))
        object.__setattr__(
            self,
            "false_positive_rate",
            _as_probability("false_positive_rate", self.false_positive_rate),
        )


@dataclass(frozen=True)
class HypothesisKind:
    """One epistemic category of hypotheses.

    ``base_rate_share`` is the fraction of novel hypotheses of this kind;
    the two rates give the probability of a positive finding in an initial
    study and in a replication, respectively.
    """

    label: str
    base_rate_share: float
    initial_positive_rate: float
    replication_positive_rate: float

    def __post_init__(self):
        if not self.label:
            raise InvalidParamsError("kind label must be a non-empty string")
        for name in ("base_rate_share", "initial_positive_rate", "replication_positive_rate"):
            object.__setattr__(self, name, _as_probability(name, getattr(self, name)))


@dataclass(frozen=True)
class CommunicationPolicy:
    """Probabilities that findings reach the published record.

    Novel positive findings are always communicated; the three adjustable
    rates cover novel negative, replication negative, and replication
    positive findings. Only communicated findings move a tally.
    """

    new_negative: float = 1.0
    rep_negative: float = 1.0
    rep_positive: float = 1.0

    #: Novel positive findings are communicated unconditionally.
    new_positive = 1.0

    def __post_init__(self):
        for name in ("new_negative", "rep_negative", "rep_positive"):
            object.__setattr__(self, name, _as_probability(name, getattr(self, name)))

    @property
    def full(self) -> bool:
        return self.new_negative == 1.0 and self.rep_negative == 1.0 and self.rep_positive == 1.0


def full_communication() -> CommunicationPolicy:
    return CommunicationPolicy(1.0, 1.0, 1.0)


@dataclass(frozen=True)
class ModelParams:
    """Complete parameterization of the publication process.

    ``activity_rate`` scales how much research happens per time interval;
    it multiplies every flow identically, so steady-state outputs do not
    depend on it and it is excluded from the bundled scenario configs.
    ``target_fraction`` of replication effort is restricted to hypotheses
    whose tally currently lies in ``target_tallies``; the remainder picks
    uniformly from the whole published pool.
    """

    kinds: tuple[HypothesisKind, ...]
    replication_rate: float
    comm: CommunicationPolicy = field(default_factory=CommunicationPolicy)
    activity_rate: float = 1.0
    target_fraction: float = 0.0
    target_tallies: frozenset[int] = frozenset()
    tally_bound: int = 30
    boundary_mode: str = "reflecting"

    def __post_init__(self):
        object.__setattr__(self, "kinds", tuple(self.kinds))
        if not self.kinds:
            raise InvalidParamsError("at least one hypothesis kind is required")
        labels = [k.label for k in self.kinds]
        if len(set(labels)) != len(labels):
            raise InvalidParamsError(f"kind labels must be unique, got {labels}")
        r = _as_probability("replication_rate", self.replication_rate)
        if r >= 1.0:
            raise InvalidProbabilityError(
                "replication_rate must lie in [0, 1); with no novel hypotheses "
                "the published population cannot grow"
            )
        object.__setattr__(self, "replication_rate", r)
        a = float(self.activity_rate)
        if not math.isfinite(a) or a <= 0.0:
            raise InvalidParamsError(f"activity_rate must be positive, got {self.activity_rate!r}")
        object.__setattr__(self, "activity_rate", a)
        object.__setattr__(
            self, "target_fraction", _as_probability("target_fraction", self.target_fraction)
        )
        object.__setattr__(self, "target_tallies", frozenset(int(s) for s in self.target_tallies))
        bound = int(self.tally_bound)
        if bound < 1:
            raise InvalidParamsError(f"tally_bound must be >= 1, got {self.tally_bound!r}")
        object.__setattr__(self, "tally_bound", bound)
        if self.boundary_mode not in BOUNDARY_MODES:
            raise InvalidParamsError(
                f"boundary_mode must be one of {BOUNDARY_MODES}, got {self.boundary_mode!r}"
            )

    # -- convenience accessors -------------------------------------------

    @property
    def kind_labels(self) -> tuple[str, ...]:
        return tuple(k.label for k in self.kinds)

    def kind(self, which: Union[str, HypothesisKind, None]) -> HypothesisKind:
        """Resolve a kind by label or instance; ``None`` means the first kind."""
        if which is None:
            return self.kinds[0]
        if isinstance(which, HypothesisKind):
            return which
        for k in self.kinds:
            if k.label == which:
                return k
        raise InvalidParamsError(f"unknown kind {which!r}; have {self.kind_labels}")

    @property
    def targeting_active(self) -> bool:
        return self.target_fraction > 0.0 and bool(self.target_tallies)


def positive_rate(kind: HypothesisKind, stage: str) -> float:
    """Probability of a positive finding for ``kind`` at the given stage.

    ``stage`` is ``"initial"`` for a first study of a novel hypothesis and
    ``"replication"`` for any later study.
    """
    if stage == "initial":
        return kind.initial_positive_rate
    if stage == "replication":
        return kind.replication_positive_rate
    raise InvalidParamsError(f"stage must be one of {STAGES}, got {stage!r}")


def two_kind_params(
    base_rate: float,
    replication_rate: float = 0.0,
    *,
    initial: StudyProfile = StudyProfile(0.8, 0.05),
    replication: StudyProfile | None = None,
    comm: CommunicationPolicy | None = None,
    activity_rate: float = 1.0,
    target_fraction: float = 0.0,
    target_tallies: Iterable[int] = (),
    tally_bound: int = 30,
    boundary_mode: str = "reflecting",
) -> ModelParams:
    """Build the standard true/false parameterization.

    ``base_rate`` is the probability a novel hypothesis is true. The
    initial profile must have power strictly above its false-positive
    rate; study quality may differ between stages via ``replication``
    (defaults to the initial profile). A replication profile whose power
    does not exceed its false-positive rate is legal but suspicious, so
    it triggers a warning rather than an error.
    """
    base_rate = _as_probability("base_rate", base_rate)
    if replication is None:
        replication = initial
    if initial.power <= initial.false_positive_rate:
        raise InvalidParamsError(
            "initial-study power must exceed the false-positive rate "
            f"(got power={initial.power}, false_positive_rate={initial.false_positive_rate})"
        )
    if replication.power <= replication.false_positive_rate:
        warnings.warn(
            "replication power does not exceed the replication false-positive "
            "rate; replications will push true hypotheses downward",
            stacklevel=2,
        )
    kinds = (
        HypothesisKind("true", base_rate, initial.power, replication.power),
        HypothesisKind(
            "false", 1.0 - base_rate, initial.false_positive_rate, replication.false_positive_rate
        ),
    )
    params = ModelParams(
        kinds=kinds,
        replication_rate=replication_rate,
        comm=comm if comm is not None else CommunicationPolicy(),
        activity_rate=activity_rate,
        target_fraction=target_fraction,
        target_tallies=frozenset(target_tallies),
        tally_bound=tally_bound,
        boundary_mode=boundary_mode,
    )
    return validate_params(params)


def validate_params(params: ModelParams) -> ModelParams:
    """Check cross-field invariants and return a canonical instance.

    Kind shares must sum to 1 within ``SHARE_SUM_TOL``; small deviations
    are renormalized away. The result is idempotent: validating an already
    validated instance returns an equal instance.
    """
    shares = [k.base_rate_share for k in params.kinds]
    total = math.fsum(shares)
    if abs(total - 1.0) > SHARE_SUM_TOL:
        raise ShareSumError(
            f"kind shares must sum to 1 within {SHARE_SUM_TOL}, got {total!r}"
        )
    kinds = params.kinds
    if abs(total - 1.0) > SHARE_RENORM_TOL:
        kinds = tuple(replace(k, base_rate_share=k.base_rate_share / total) for k in kinds)
    if params.target_fraction > 0.0 and not params.target_tallies:
        raise EmptyTargetError(
            "target_fraction > 0 requires a non-empty set of target tallies"
        )
    if params.target_tallies:
        bad = [s for s in params.target_tallies if abs(s) > params.tally_bound]
        if bad:
            raise InvalidParamsError(
                f"target tallies {sorted(bad)} fall outside [-{params.tally_bound}, "
                f"{params.tally_bound}]"
            )
    if kinds is params.kinds:
        return params
    return replace(params, kinds=kinds)


# ---------------------------------------------------------------------------
# System state


@dataclass(frozen=True)
class TallyDistribution:
    """Mass of each kind at each tally in ``[-tally_bound, tally_bound]``.

    ``mass`` has one row per kind (ordered as ``kind_labels``) and one
    column per tally. ``normalization`` records whether the masses are raw
    flow units or sum to one. The array is stored read-only; treat
    instances as immutable values.
    """

    kind_labels: tuple[str, ...]
    tally_bound: int
    mass: np.ndarray
    normalization: str = "raw"

    def __post_init__(self):
        object.__setattr__(self, "kind_labels", tuple(self.kind_labels))
        bound = int(self.tally_bound)
        if bound < 1:
            raise InvalidParamsError(f"tally_bound must be >= 1, got {self.tally_bound!r}")
        object.__setattr__(self, "tally_bound", bound)
        arr = np.array(self.mass, dtype=float, copy=True)
        expected = (len(self.kind_labels), 2 * bound + 1)
        if arr.shape != expected:
            raise InvalidParamsError(f"mass must have shape {expected}, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidParamsError("all masses must be finite")
        if np.any(arr < 0.0):
            raise InvalidParamsError("all masses must be non-negative")
        if self.normalization not in ("raw", "normalized"):
            raise InvalidParamsError(
                f"normalization must be 'raw' or 'normalized', got {self.normalization!r}"
            )
        if self.normalization == "normalized" and abs(arr.sum() - 1.0) > 1e-10:
            raise InvalidParamsError(
                f"normalized distribution must have total mass 1, got {arr.sum()!r}"
            )
        arr.flags.writeable = False
        object.__setattr__(self, "mass", arr)

    # -- lookups ----------------------------------------------------------

    def tallies(self) -> np.ndarray:
        return np.arange(-self.tally_bound, self.tally_bound + 1)

    def kind_index(self, kind: Union[str, HypothesisKind]) -> int:
        label = kind.label if isinstance(kind, HypothesisKind) else kind
        try:
            return self.kind_labels.index(label)
        except ValueError:
            raise InvalidParamsError(
                f"unknown kind {label!r}; have {self.kind_labels}"
            ) from None

    def _column(self, s: int) -> int:
        s = int(s)
        if abs(s) > self.tally_bound:
            raise InvalidParamsError(
                f"tally {s} outside [-{self.tally_bound}, {self.tally_bound}]"
            )
        return s + self.tally_bound

    def mass_at(self, kind: Union[str, HypothesisKind], s: int) -> float:
        return float(self.mass[self.kind_index(kind), self._column(s)])

    def tally_total(self, s: int) -> float:
        return float(self.mass[:, self._column(s)].sum())

    def kind_total(self, kind: Union[str, HypothesisKind]) -> float:
        return float(self.mass[self.kind_index(kind)].sum())

    def total(self) -> float:
        return float(self.mass.sum())

    def normalized(self) -> "TallyDistribution":
        if self.normalization == "normalized":
            return self
        total = self.mass.sum()
        if total <= 0.0:
            raise InvalidParamsError("cannot normalize a distribution with zero total mass")
        return TallyDistribution(
            self.kind_labels, self.tally_bound, self.mass / total, "normalized"
        )


def empty_distribution(params: ModelParams) -> TallyDistribution:
    """All-zero raw distribution matching the parameter set's support."""
    shape = (len(params.kinds), 2 * params.tally_bound + 1)
    return TallyDistribution(params.kind_labels, params.tally_bound, np.zeros(shape), "raw")


def fold_to_bound(dist: TallyDistribution, bound: int) -> TallyDistribution:
    """Fold mass outside ``[-bound, bound]`` onto the window endpoints.

    Keeps the total mass of every kind unchanged, so a wide distribution
    can be reported on a narrower support without hiding its tails.
    """
    bound = int(bound)
    if bound < 1 or bound > dist.tally_bound:
        raise InvalidParamsError(
            f"fold bound must lie in [1, {dist.tally_bound}], got {bound}"
        )
    if bound == dist.tally_bound:
        return dist
    old = dist.tally_bound
    lo = old - bound
    hi = old + bound
    folded = dist.mass[:, lo : hi + 1].copy()
    folded[:, 0] += dist.mass[:, :lo].sum(axis=1)
    folded[:, -1] += dist.mass[:, hi + 1 :].sum(axis=1)
    return TallyDistribution(dist.kind_labels, bound, folded, dist.normalization)


def resize_to_bound(dist: TallyDistribution, bound: int) -> TallyDistribution:
    """Return ``dist`` on exactly ``[-bound, bound]``.

    Narrower targets fold the tails onto the endpoints; wider targets
    zero-pad. Total mass is unchanged either way.
    """
    bound = int(bound)
    if bound <= dist.tally_bound:
        return fold_to_bound(dist, bound)
    pad = bound - dist.tally_bound
    shape = (len(dist.kind_labels), 2 * bound + 1)
    mass = np.zeros(shape)
    mass[:, pad : pad + 2 * dist.tally_bound + 1] = dist.mass
    return TallyDistribution(dist.kind_labels, bound, mass, dist.normalization)
