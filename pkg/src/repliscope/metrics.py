"""Precision, sensitivity, and specificity over tally distributions.

Precision at a tally is the fraction of its mass carried by the
designated correct kinds; sensitivity and specificity locate the correct
and incorrect populations across tallies. All three are ratios, so they
are invariant to a global rescaling of the masses. Tallies holding no
mass have no defined precision and are reported as NaN rather than 0
or 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import EmptyTallyError, InvalidParamsError, KindExtinctError, WindowError
from .params import TallyDistribution


@dataclass(frozen=True)
class MetricsRow:
    tally: int
    mass_true: float
    mass_false: float
    precision: float
    sensitivity: float
    specificity: float
    aggregated: bool = False


@dataclass(frozen=True)
class MetricsTable:
    """Per-tally metrics over a window, true kinds folded together.

    ``window`` gives the inclusive tally range of the rows. Rows flagged
    ``aggregated`` are window endpoints that absorbed out-of-window mass
    via :func:`tail_aggregate`.
    """

    rows: tuple[MetricsRow, ...]
    window: tuple[int, int]
    true_kinds: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        object.__setattr__(self, "window", (int(self.window[0]), int(self.window[1])))
        object.__setattr__(self, "true_kinds", tuple(self.true_kinds))

    def row(self, s: int) -> MetricsRow:
        lo, _ = self.window
        idx = int(s) - lo
        if not 0 <= idx < len(self.rows):
            raise WindowError(f"tally {s} outside window {self.window}")
        return self.rows[idx]


def _resolve_true_kinds(dist: TallyDistribution, true_kinds) -> tuple[str, ...]:
    if true_kinds is None:
        return (dist.kind_labels[0],)
    chosen = tuple(true_kinds)
    for label in chosen:
        if label not in dist.kind_labels:
            raise InvalidParamsError(f"unknown kind {label!r}; have {dist.kind_labels}")
    if not chosen or len(chosen) == len(dist.kind_labels):
        raise InvalidParamsError("true kinds must be a proper non-empty subset of all kinds")
    return chosen


def _split_mass(dist: TallyDistribution, true_kinds) -> tuple[np.ndarray, np.ndarray]:
    chosen = _resolve_true_kinds(dist, true_kinds)
    idx = [dist.kind_index(label) for label in chosen]
    rest = [i for i in range(len(dist.kind_labels)) if i not in idx]
    return dist.mass[idx].sum(axis=0), dist.mass[rest].sum(axis=0)


def precision(dist: TallyDistribution, s: int, true_kinds: Sequence[str] | None = None) -> float:
    """Fraction of the mass at tally ``s`` that is of a correct kind."""
    mass_true, mass_false = _split_mass(dist, true_kinds)
    col = s + dist.tally_bound
    if abs(int(s)) > dist.tally_bound:
        raise WindowError(f"tally {s} outside support of the distribution")
    denom = mass_true[col] + mass_false[col]
    if denom <= 0.0:
        raise EmptyTallyError(f"no mass at tally {s}; precision undefined")
    return float(mass_true[col] / denom)


def sensitivity(dist: TallyDistribution, s: int, true_kinds: Sequence[str] | None = None) -> float:
    """Fraction of all correct-kind mass sitting at tally ``s``."""
    mass_true, _ = _split_mass(dist, true_kinds)
    total = mass_true.sum()
    if total <= 0.0:
        raise KindExtinctError("no correct-kind mass anywhere; sensitivity undefined")
    return float(mass_true[s + dist.tally_bound] / total)


def specificity(dist: TallyDistribution, s: int, true_kinds: Sequence[str] | None = None) -> float:
    """Fraction of all incorrect-kind mass sitting at tally ``s``."""
    _, mass_false = _split_mass(dist, true_kinds)
    total = mass_false.sum()
    if total <= 0.0:
        raise KindExtinctError("no incorrect-kind mass anywhere; specificity undefined")
    return float(mass_false[s + dist.tally_bound] / total)


def metrics_table(
    dist: TallyDistribution,
    true_kinds: Sequence[str] | None = None,
    window: tuple[int, int] | None = None,
) -> MetricsTable:
    """Tabulate the three metrics for every tally in ``window``.

    Cells that a scalar metric would refuse (no mass at the tally, or an
    extinct kind) hold NaN so whole tables stay writable for degenerate
    scenarios like a zero base rate.
    """
    chosen = _resolve_true_kinds(dist, true_kinds)
    mass_true, mass_false = _split_mass(dist, chosen)
    bound = dist.tally_bound
    if window is None:
        window = (-bound, bound)
    lo, hi = int(window[0]), int(window[1])
    if lo > hi:
        raise WindowError(f"window {window} is empty")
    if lo < -bound or hi > bound:
        raise WindowError(f"window {window} outside support [-{bound}, {bound}]")
    # fsum over the full support, matching tail_aggregate's summation so a
    # full-window aggregation is an exact identity
    tot_true = math.fsum(mass_true.tolist())
    tot_false = math.fsum(mass_false.tolist())
    rows = []
    for s in range(lo, hi + 1):
        col = s + bound
        m_t = float(mass_true[col])
        m_f = float(mass_false[col])
        denom = m_t + m_f
        rows.append(
            MetricsRow(
                tally=s,
                mass_true=m_t,
                mass_false=m_f,
                precision=m_t / denom if denom > 0.0 else math.nan,
                sensitivity=m_t / tot_true if tot_true > 0.0 else math.nan,
                specificity=m_f / tot_false if tot_false > 0.0 else math.nan,
            )
        )
    return MetricsTable(tuple(rows), (lo, hi), chosen)


def tail_aggregate(table: MetricsTable, window: tuple[int, int]) -> MetricsTable:
    """Fold mass outside ``window`` onto the window endpoints.

    Per-kind totals are preserved exactly, so sensitivity and specificity
    still sum to one over the folded window when the input table covered
    the full support. Precision at the endpoints is recomputed from the
    folded masses; endpoint rows that actually absorbed mass are flagged
    ``aggregated``.
    """
    lo, hi = int(window[0]), int(window[1])
    t_lo, t_hi = table.window
    if lo > hi:
        raise WindowError(f"window {window} is empty")
    if lo < t_lo or hi > t_hi:
        raise WindowError(f"window {window} outside table window {table.window}")
    tot_true = math.fsum(r.mass_true for r in table.rows)
    tot_false = math.fsum(r.mass_false for r in table.rows)

    def build_row(s: int) -> MetricsRow:
        if s == lo:
            members = [r for r in table.rows if r.tally <= lo]
        elif s == hi:
            members = [r for r in table.rows if r.tally >= hi]
        else:
            members = [table.row(s)]
        m_t = math.fsum(r.mass_true for r in members)
        m_f = math.fsum(r.mass_false for r in members)
        denom = m_t + m_f
        folded = any(
            r.mass_true > 0.0 or r.mass_false > 0.0 for r in members if r.tally != s
        )
        return MetricsRow(
            tally=s,
            mass_true=m_t,
            mass_false=m_f,
            precision=m_t / denom if denom > 0.0 else math.nan,
            sensitivity=m_t / tot_true if tot_true > 0.0 else math.nan,
            specificity=m_f / tot_false if tot_false > 0.0 else math.nan,
            aggregated=folded,
        )

    rows = tuple(build_row(s) for s in range(lo, hi + 1))
    return MetricsTable(rows, (lo, hi), table.true_kinds)
