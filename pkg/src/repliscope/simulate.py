"""Seeded event-level Monte Carlo of the publication process.

Each event is one research act: with probability equal to the
replication rate an already-published hypothesis is drawn (uniformly, or
from the target tallies for the targeted fraction of effort) and
restudied; otherwise a novel hypothesis is drawn by kind share and
studied for the first time. Findings are communicated per policy and
only communicated findings create or move a published record.

Runs are reproducible: the generator is PCG64, a documented,
version-stable algorithm, and the number of random draws per event is
fixed, so identical ``(params, seed, events)`` give bit-identical
outcomes on a fixed NumPy version.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BoundsMismatchError, InvalidParamsError
from .params import ModelParams, TallyDistribution

#: Live published records are capped at this count; beyond it the pool is
#: uniformly subsampled, which leaves normalized frequencies unbiased.
POPULATION_CAP = 1_000_000

_CHUNK = 200_000
#: Uniform draws consumed per event: activity, targeting, selection,
#: finding, communication. Fixed so the stream never depends on outcomes.
_DRAWS = 5


@dataclass(frozen=True)
class SimDiagnostics:
    """Event-level incidents worth surfacing alongside the histogram.

    ``forced_novel_events``: replications drawn before anything was
    published, resolved by running a novel study instead.
    ``empty_target_events``: targeted replications finding no record on
    any target tally, resolved by unbiased selection.
    ``cull_events``: uniform subsamplings applied to keep the live pool
    under the population cap.
    """

    forced_novel_events: int = 0
    empty_target_events: int = 0
    cull_events: int = 0


@dataclass(frozen=True)
class SimOutcome:
    """Result of one simulation run."""

    histogram: TallyDistribution
    events: int
    population_size: int
    seed: int
    diagnostics: SimDiagnostics


class _TargetIndex:
    """Record ids bucketed by tally, supporting O(1) moves and uniform
    draws from the target set."""

    def __init__(self, target_tallies, bound):
        self.bound = bound
        self.buckets = {s: [] for s in range(-bound, bound + 1)}
        self.slot = []  # record id -> position in its bucket
        self.target = sorted(target_tallies)

    def add(self, record_id, tally):
        bucket = self.buckets[tally]
        self.slot.append(len(bucket))
        bucket.append(record_id)

    def move(self, record_id, old, new):
        bucket = self.buckets[old]
        pos = self.slot[record_id]
        last = bucket[-1]
        bucket[pos] = last
        self.slot[last] = pos
        bucket.pop()
        dest = self.buckets[new]
        self.slot[record_id] = len(dest)
        dest.append(record_id)

    def target_count(self):
        return sum(len(self.buckets[s]) for s in self.target)

    def pick_target(self, u):
        count = self.target_count()
        idx = min(int(u * count), count - 1)
        for s in self.target:
            bucket = self.buckets[s]
            if idx < len(bucket):
                return bucket[idx]
            idx -= len(bucket)
        raise AssertionError("target index out of range")

    def rebuild(self, tallies):
        self.buckets = {s: [] for s in range(-self.bound, self.bound + 1)}
        self.slot = []
        for record_id, tally in enumerate(tallies):
            self.add(record_id, tally)


def run(
    params: ModelParams,
    seed: int,
    events: int,
    population_cap: int = POPULATION_CAP,
) -> SimOutcome:
    """Simulate ``events`` research events and histogram the survivors.

    The published pool holds one record per communicated hypothesis with
    its kind and current tally, always inside the tally bound. Returns
    the normalized (kind, tally) histogram of the final pool.
    """
    events = int(events)
    if events < 1:
        raise InvalidParamsError(f"events must be >= 1, got {events}")
    if population_cap < 2:
        raise InvalidParamsError(f"population_cap must be >= 2, got {population_cap}")
    rng = np.random.Generator(np.random.PCG64(seed))

    r = params.replication_rate
    bound = params.tally_bound
    reflecting = params.boundary_mode == "reflecting"
    c_new_neg = params.comm.new_negative
    c_rep_neg = params.comm.rep_negative
    c_rep_pos = params.comm.rep_positive
    init_rates = [k.initial_positive_rate for k in params.kinds]
    rep_rates = [k.replication_positive_rate for k in params.kinds]
    share_edges = np.cumsum([k.base_rate_share for k in params.kinds]).tolist()
    share_edges[-1] = 1.0 + 1e-12  # guard the top edge against rounding
    n_kinds = len(params.kinds)

    targeting = params.targeting_active
    r_target = params.target_fraction
    index = _TargetIndex(params.target_tallies, bound) if targeting else None

    kinds: list[int] = []
    tallies: list[int] = []
    forced_novel = 0
    empty_target = 0
    culls = 0

    done = 0
    while done < events:
        m = min(_CHUNK, events - done)
        u = rng.random((m, _DRAWS))
        u_act = u[:, 0].tolist()
        u_tgt = u[:, 1].tolist()
        u_sel = u[:, 2].tolist()
        u_find = u[:, 3].tolist()
        u_comm = u[:, 4].tolist()
        for i in range(m):
            pool = len(tallies)
            if u_act[i] < r and pool > 0:
                # replication of a published hypothesis
                if targeting and u_tgt[i] < r_target:
                    if index.target_count() > 0:
                        idx = index.pick_target(u_sel[i])
                    else:
                        empty_target += 1
                        idx = min(int(u_sel[i] * pool), pool - 1)
                else:
                    idx = min(int(u_sel[i] * pool), pool - 1)
                s = tallies[idx]
                if not reflecting and abs(s) == bound:
                    continue  # absorbed: tally frozen
                if u_find[i] < rep_rates[kinds[idx]]:
                    if u_comm[i] < c_rep_pos and s < bound:
                        tallies[idx] = s + 1
                        if targeting:
                            index.move(idx, s, s + 1)
                elif u_comm[i] < c_rep_neg and s > -bound:
                    tallies[idx] = s - 1
                    if targeting:
                        index.move(idx, s, s - 1)
            else:
                # novel hypothesis (forced when nothing is published yet)
                if u_act[i] < r:
                    forced_novel += 1
                if n_kinds == 2:
                    k = 0 if u_sel[i] < share_edges[0] else 1
                else:
                    k = 0
                    while u_sel[i] >= share_edges[k]:
                        k += 1
                if u_find[i] < init_rates[k]:
                    kinds.append(k)
                    tallies.append(1)
                    if targeting:
                        index.add(len(tallies) - 1, 1)
                elif u_comm[i] < c_new_neg:
                    kinds.append(k)
                    tallies.append(-1)
                    if targeting:
                        index.add(len(tallies) - 1, -1)
            if len(tallies) > population_cap:
                keep = rng.permutation(len(tallies))[: population_cap // 2]
                kinds = [kinds[j] for j in keep]
                tallies = [tallies[j] for j in keep]
                culls += 1
                if targeting:
                    index.rebuild(tallies)
        done += m

    hist = np.zeros((n_kinds, 2 * bound + 1))
    offset = bound
    for k, s in zip(kinds, tallies):
        hist[k, s + offset] += 1.0
    total = hist.sum()
    if total > 0.0:
        histogram = TallyDistribution(params.kind_labels, bound, hist / total, "normalized")
    else:
        histogram = TallyDistribution(params.kind_labels, bound, hist, "raw")
    return SimOutcome(
        histogram=histogram,
        events=events,
        population_size=len(tallies),
        seed=int(seed),
        diagnostics=SimDiagnostics(forced_novel, empty_target, culls),
    )


def distance_to(outcome: SimOutcome, reference: TallyDistribution) -> float:
    """Total variation distance between the run's histogram and a reference.

    Both distributions are normalized first; their kind labels and tally
    bounds must match.
    """
    hist = outcome.histogram
    if (
        hist.kind_labels != reference.kind_labels
        or hist.tally_bound != reference.tally_bound
    ):
        raise BoundsMismatchError(
            "histogram and reference must share kind labels and tally bound"
        )
    p = hist.normalized().mass
    q = reference.normalized().mass
    return float(0.5 * np.abs(p - q).sum())
