"""Classify N-tuples of channels by which K-subsets admit joint channels.

An N-tuple is (N,K)-compatible when every K-subset is compatible,
(N,K)-incompatible when at least one is not, and (N,K)-strong incompatible
when none is.  Genuine (K+1)-level labels additionally require oracle
confirmation of compatibility one level down; criterion evidence alone can
only certify the incompatible half.  Subsets the criterion leaves open are
surfaced as undetermined rather than silently counted either way.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum

from .criteria import (
    CRITERION_MARGIN,
    Verdict,
    VerdictKind,
    oracle_verdict,
    resolve_bases,
    zhu_criterion_channels,
)
from .sdp import DEFAULT_ORACLE_BUDGET, Feasibility, solve_joint_channel


class AssemblageLabel(Enum):
    NK_COMPATIBLE = "(N,K)-compatible"
    NK_INCOMPATIBLE = "(N,K)-incompatible"
    NK_STRONG_INCOMPATIBLE = "(N,K)-strong-incompatible"
    NK1_GENUINELY_INCOMPATIBLE = "(N,K+1)-genuinely-incompatible"
    NK1_GENUINELY_STRONG_INCOMPATIBLE = "(N,K+1)-genuinely-strong-incompatible"


@dataclass(frozen=True)
class AssemblageReport:
    n: int
    k: int
    subset_verdicts: dict
    labels: frozenset
    higher_verdicts: dict = field(default_factory=dict)

    @property
    def undetermined_subsets(self):
        return tuple(
            s
            for s, v in self.subset_verdicts.items()
            if v.kind is VerdictKind.UNDETERMINED
        )


def subset_sums_depolarizing(ts, k: int) -> dict:
    """Sum of squared noise parameters for every K-subset, keyed by indices."""
    ts = [float(t) for t in ts]
    if not 1 <= k <= len(ts):
        raise ValueError(f"subset size {k} out of range for {len(ts)} parameters")
    return {
        subset: float(sum(ts[i] * ts[i] for i in subset))
        for subset in itertools.combinations(range(len(ts)), k)
    }


def _decide_subset(channels, bases_policy, use_oracle, margin, budget) -> Verdict:
    d = channels[0].d
    bases, labels = resolve_bases(d, len(channels), bases_policy)
    verdict = zhu_criterion_channels(
        channels, bases, basis_labels=labels, margin=margin
    )
    if verdict.kind is VerdictKind.INCOMPATIBLE_CERTIFIED or not use_oracle:
        return verdict
    result = solve_joint_channel(channels, budget=budget)
    if result.status is Feasibility.MARGINAL:
        # keep whatever information the criterion produced
        return verdict
    return oracle_verdict(result.lambda_star, result.status)


def classify(
    channels,
    k: int,
    bases_policy: str = "auto",
    use_oracle: bool = False,
    *,
    margin: float = CRITERION_MARGIN,
    budget: int = DEFAULT_ORACLE_BUDGET,
) -> AssemblageReport:
    """Evaluate every K-subset and attach the hierarchy labels.

    Subsets are enumerated in lexicographic order.  With ``use_oracle`` the
    compatible half of the hierarchy (and the genuine (K+1) labels) can be
    resolved; without it only incompatibility certificates are produced.
    """
    channels = list(channels)
    n = len(channels)
    if not 1 <= k <= n:
        raise ValueError(f"subset size k={k} out of range for {n} channels")

    verdicts = {}
    for subset in itertools.combinations(range(n), k):
        verdicts[subset] = _decide_subset(
            [channels[i] for i in subset], bases_policy, use_oracle, margin, budget
        )

    labels = set()
    kinds = [v.kind for v in verdicts.values()]
    n_incomp = sum(1 for x in kinds if x is VerdictKind.INCOMPATIBLE_CERTIFIED)
    n_comp = sum(1 for x in kinds if x is VerdictKind.COMPATIBLE_CERTIFIED)
    if n_incomp >= 1:
        labels.add(AssemblageLabel.NK_INCOMPATIBLE)
    if n_incomp == len(verdicts):
        labels.add(AssemblageLabel.NK_STRONG_INCOMPATIBLE)
    nk_compatible = n_comp == len(verdicts)
    if nk_compatible:
        labels.add(AssemblageLabel.NK_COMPATIBLE)

    higher = {}
    if nk_compatible and k < n:
        for subset in itertools.combinations(range(n), k + 1):
            higher[subset] = _decide_subset(
                [channels[i] for i in subset],
                bases_policy,
                use_oracle,
                margin,
                budget,
            )
        h_kinds = [v.kind for v in higher.values()]
        h_incomp = sum(1 for x in h_kinds if x is VerdictKind.INCOMPATIBLE_CERTIFIED)
        if h_incomp >= 1:
            labels.add(AssemblageLabel.NK1_GENUINELY_INCOMPATIBLE)
        if h_incomp == len(higher):
            labels.add(AssemblageLabel.NK1_GENUINELY_STRONG_INCOMPATIBLE)

    return AssemblageReport(
        n=n,
        k=k,
        subset_verdicts=verdicts,
        labels=frozenset(labels),
        higher_verdicts=higher,
    )
