"""Decision procedures for channel and measurement incompatibility.

The trace-threshold criterion is one-sided: a value strictly above the
dimension certifies incompatibility, while anything else stays
undetermined.  Certified compatibility only ever comes from a feasible
joint-channel witness produced by the exact oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .channels import make_schur
from .fisher import (
    beta,
    canonical_basis,
    fourier_basis,
    g_matrix,
    g_matrix_povm,
    is_prime,
    mub_family,
)
from .sdp import DominationProblem, SolverStatus, solve_domination

# Converts "strictly larger than d" into a numerically stable test; the
# solver reports values to better than this accuracy.
CRITERION_MARGIN = 1e-6
# Closed-form criteria are exact; this only guards float round-off.
ANALYTIC_EPS = 1e-12


class VerdictKind(Enum):
    INCOMPATIBLE_CERTIFIED = "incompatible-certified"
    COMPATIBLE_CERTIFIED = "compatible-certified"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class Verdict:
    """Outcome of a decision procedure.

    ``value`` is the criterion SDP value when one was computed, ``margin``
    the safety margin the decision used, and ``certificate`` a human
    readable account of the evidence (bases, SDP value, oracle optimum).
    """

    kind: VerdictKind
    value: float | None
    margin: float
    certificate: str

    @property
    def certified(self) -> bool:
        return self.kind is not VerdictKind.UNDETERMINED


def select_bases(d: int, count: int):
    """Default measurement bases for a criterion run.

    Uses a mutually unbiased family when the dimension is prime and no more
    than d + 1 bases are needed (its first two members are the canonical
    and Fourier bases, which is the right pair for Schur channels).
    Otherwise the canonical and Fourier bases are cycled.  Callers with
    better problem knowledge should pass explicit bases instead.
    """
    if count < 1:
        raise ValueError("at least one basis is required")
    if is_prime(d) and count <= d + 1:
        fam = mub_family(d)
        names = ["canonical", "fourier"] + [f"mub-{k}" for k in range(2, d + 1)]
        return list(fam.bases[:count]), names[:count]
    pair = [canonical_basis(d), fourier_basis(d)]
    names = ["canonical", "fourier"]
    return (
        [pair[i % 2] for i in range(count)],
        [names[i % 2] for i in range(count)],
    )


def resolve_bases(d: int, count: int, policy: str = "auto"):
    """Turn a named basis policy into concrete bases plus labels."""
    if policy == "auto":
        return select_bases(d, count)
    if policy == "canonical-fourier":
        pair = [canonical_basis(d), fourier_basis(d)]
        names = ["canonical", "fourier"]
        return (
            [pair[i % 2] for i in range(count)],
            [names[i % 2] for i in range(count)],
        )
    raise ValueError(f"unknown bases policy {policy!r}")


def zhu_criterion_channels(
    channels,
    bases,
    *,
    basis_labels=None,
    margin: float = CRITERION_MARGIN,
    sdp_gap: float = 1e-6,
) -> Verdict:
    """Fisher-information incompatibility criterion for channels.

    Builds one G-matrix per (channel, basis) pair and minimizes Tr H over
    common dominators H.  A value strictly above d plus the margin
    certifies that no joint channel exists.
    """
    channels = list(channels)
    bases = list(bases)
    if len(channels) != len(bases):
        raise ValueError(
            f"got {len(channels)} channels but {len(bases)} bases"
        )
    if not channels:
        raise ValueError("at least one channel is required")
    d = channels[0].d
    for c in channels:
        if c.d != d:
            raise ValueError("all channels must share one square dimension")
    if basis_labels is None:
        basis_labels = [f"basis-{i}" for i in range(len(bases))]

    gs = [g_matrix(c, e).m for c, e in zip(channels, bases)]
    result = solve_domination(
        DominationProblem(d * d, tuple(gs)), gap_tol=sdp_gap
    )
    if result.status is not SolverStatus.OPTIMAL:
        return Verdict(
            VerdictKind.UNDETERMINED,
            None,
            margin,
            f"criterion SDP did not converge ({result.status.value}, "
            f"gap {result.gap:.2e})",
        )
    value = result.value
    cert = (
        f"criterion SDP value {value:.9f} vs threshold {d} "
        f"(bases: {', '.join(basis_labels)}; solver gap {result.gap:.1e})"
    )
    if value > d + margin:
        return Verdict(VerdictKind.INCOMPATIBLE_CERTIFIED, value, margin, cert)
    return Verdict(VerdictKind.UNDETERMINED, value, margin, cert)


def zhu_criterion_povms(
    povms, *, margin: float = CRITERION_MARGIN, sdp_gap: float = 1e-6
) -> Verdict:
    """Fisher-information incompatibility criterion for POVMs."""
    povms = list(povms)
    if not povms:
        raise ValueError("at least one POVM is required")
    d = povms[0].d
    for p in povms:
        if p.d != d:
            raise ValueError("all POVMs must share one dimension")
    gs = [g_matrix_povm(p, label=f"povm-{i}").m for i, p in enumerate(povms)]
    result = solve_domination(
        DominationProblem(d * d, tuple(gs)), gap_tol=sdp_gap
    )
    if result.status is not SolverStatus.OPTIMAL:
        return Verdict(
            VerdictKind.UNDETERMINED,
            None,
            margin,
            f"criterion SDP did not converge ({result.status.value})",
        )
    value = result.value
    cert = (
        f"criterion SDP value {value:.9f} vs threshold {d} "
        f"({len(povms)} POVMs; solver gap {result.gap:.1e})"
    )
    if value > d + margin:
        return Verdict(VerdictKind.INCOMPATIBLE_CERTIFIED, value, margin, cert)
    return Verdict(VerdictKind.UNDETERMINED, value, margin, cert)


def schur_pair_criterion(b, c, s: float, t: float) -> Verdict:
    """Analytic incompatibility test for two noise-scaled Schur channels.

    The channels are s * (B o X) + (1-s) * Delta and the same with (C, t).
    Measuring one in the canonical and the other in the Fourier basis makes
    the criterion SDP value analytic, and it exceeds the threshold exactly
    when s^2 + beta(C) t^2 > 1 or beta(B) s^2 + t^2 > 1.
    """
    # constructing the channels validates PSD and the unit diagonal
    chan_b = make_schur(b)
    make_schur(c)
    d = chan_b.d
    if not (0.0 <= s <= 1.0 and 0.0 <= t <= 1.0):
        raise ValueError(f"noise parameters must lie in [0, 1], got s={s}, t={t}")
    beta_b, beta_c = beta(b), beta(c)
    lhs1 = s * s + beta_c * t * t
    lhs2 = beta_b * s * s + t * t
    lhs = max(lhs1, lhs2)
    value = 1.0 + (d - 1) * lhs
    orientation = "canonical/fourier" if lhs1 >= lhs2 else "fourier/canonical"
    cert = (
        f"ellipse test max(s^2 + {beta_c:.6f} t^2, {beta_b:.6f} s^2 + t^2) "
        f"= {lhs:.9f} vs 1 ({orientation})"
    )
    if lhs > 1.0 + ANALYTIC_EPS:
        return Verdict(VerdictKind.INCOMPATIBLE_CERTIFIED, value, ANALYTIC_EPS, cert)
    return Verdict(VerdictKind.UNDETERMINED, value, ANALYTIC_EPS, cert)


def depolarizing_criterion(d: int, ts) -> Verdict:
    """Analytic incompatibility test for depolarizing channels.

    Over a mutually unbiased family the criterion SDP value is
    1 + (d - 1) * sum(t_i^2), so the channels are certified incompatible
    exactly when sum(t_i^2) > 1.
    """
    ts = [float(t) for t in ts]
    n = len(ts)
    if not is_prime(d):
        raise ValueError(
            f"d={d} is not prime, no unbiased family is constructed; "
            "use zhu_criterion_channels with explicit bases instead"
        )
    if n > d + 1:
        raise ValueError(
            f"{n} channels exceed the {d + 1} available unbiased bases; "
            "use zhu_criterion_channels with explicit bases instead"
        )
    if any(not 0.0 <= t <= 1.0 for t in ts):
        raise ValueError(f"noise parameters must lie in [0, 1], got {ts}")
    total = float(sum(t * t for t in ts))
    value = 1.0 + (d - 1) * total
    cert = f"sum of squared noise parameters {total:.9f} vs 1 over {n} unbiased bases"
    if total > 1.0 + ANALYTIC_EPS:
        return Verdict(VerdictKind.INCOMPATIBLE_CERTIFIED, value, ANALYTIC_EPS, cert)
    return Verdict(VerdictKind.UNDETERMINED, value, ANALYTIC_EPS, cert)


def exact_depolarizing_pair(d: int, s: float, t: float) -> bool:
    """Exact compatibility of two depolarizing channels.

    True iff t + s - (2/d) sqrt((1-t)(1-s)) <= 1, the known necessary and
    sufficient condition.
    """
    if not (0.0 <= s <= 1.0 and 0.0 <= t <= 1.0):
        raise ValueError(f"noise parameters must lie in [0, 1], got s={s}, t={t}")
    lhs = t + s - (2.0 / d) * math.sqrt((1.0 - t) * (1.0 - s))
    return lhs <= 1.0 + ANALYTIC_EPS


def self_compat_threshold(d: int) -> float:
    """Largest t for which the depolarizing channel is compatible with itself."""
    if d < 2:
        raise ValueError("dimension must be at least 2")
    return (d + 2.0) / (2.0 * (d + 1.0))


def oracle_verdict(lambda_star: float, status, *, band: float = 1e-7) -> Verdict:
    """Wrap an oracle outcome as a Verdict (the only source of compatibility)."""
    from .sdp import Feasibility

    cert = f"oracle joint-channel optimum lambda* = {lambda_star:.3e}"
    if status is Feasibility.FEASIBLE:
        return Verdict(VerdictKind.COMPATIBLE_CERTIFIED, None, band, cert)
    if status is Feasibility.INFEASIBLE:
        return Verdict(VerdictKind.INCOMPATIBLE_CERTIFIED, None, band, cert)
    return Verdict(VerdictKind.UNDETERMINED, None, band, cert + " (marginal)")
