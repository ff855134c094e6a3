"""Map compatibility regions by ray bisection and emit figure datasets.

The compatibility region of a channel tuple collects the noise vectors s
for which the channels s_i * Phi_i + (1 - s_i) * Delta stay compatible.
It is convex, closed, contains the origin and every coordinate unit
vector, so along any ray from the origin there is a single crossing and
bisection applies.  Criterion boundaries are outer bounds on the region;
oracle boundaries are exact up to the bisection tolerance.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channels import Channel, make_schur
from .criteria import (
    CRITERION_MARGIN,
    VerdictKind,
    resolve_bases,
    zhu_criterion_channels,
)
from .fisher import beta
from .sdp import DEFAULT_ORACLE_BUDGET, Feasibility, solve_joint_channel

MIN_BISECT_TOL = 1e-4


@dataclass(frozen=True)
class RayResult:
    direction: tuple
    criterion_radius: float
    oracle_radius: float | None = None
    analytic_radius: float | None = None


@dataclass(frozen=True)
class RegionReport:
    channel_labels: tuple
    rays: tuple
    grid: object = None


def mix_toward_depolarizing(channel: Channel, s: float) -> Channel:
    """Noise-scale a channel: s * Phi + (1 - s) * Delta as a Choi mixture."""
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"mixing weight {s} outside [0, 1]")
    d = channel.d
    delta_choi = np.eye(d * d) / d
    return Channel(
        d,
        d,
        s * channel.choi + (1.0 - s) * delta_choi,
        label=f"{channel.label}*{s:.6f}",
    )


def ray_directions(n_channels: int, count: int):
    """Evenly spread unit directions in the positive orthant (pairs only)."""
    if n_channels != 2:
        raise ValueError(
            "automatic ray generation is implemented for channel pairs; "
            "pass explicit directions for larger tuples"
        )
    if count < 1:
        raise ValueError("at least one ray is required")
    if count == 1:
        angles = [np.pi / 4]
    else:
        angles = np.linspace(0.0, np.pi / 2, count)
    return [(float(np.cos(a)), float(np.sin(a))) for a in angles]


def bisect_boundary(inside, r_max: float, tol: float) -> float:
    """Largest certified-inside radius along a ray.

    ``inside`` must be monotone (single crossing) with ``inside(0)`` true.
    Returns a radius r with inside(r) true and inside(r') false for some
    r' <= r + tol, or r_max when the whole segment is inside.
    """
    if not inside(0.0):
        raise RuntimeError("ray origin claimed outside a region that contains 0")
    if inside(r_max):
        return r_max
    lo, hi = 0.0, r_max
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if inside(mid):
            lo = mid
        else:
            hi = mid
    return lo


def scan_rays(
    base_channels,
    directions,
    use_oracle: bool = False,
    bisect_tol: float = 1e-3,
    *,
    bases_policy: str = "auto",
    margin: float = CRITERION_MARGIN,
    budget: int = DEFAULT_ORACLE_BUDGET,
    analytic=None,
    jobs: int = 1,
) -> RegionReport:
    """Bisect the criterion (and optionally oracle) boundary along each ray.

    ``analytic``, when given, is a callable mapping a direction to a known
    closed-form boundary radius; it is stored alongside the bisection
    results.  Rays are independent and may be evaluated in parallel, with
    output order fixed by the input order.
    """
    base_channels = list(base_channels)
    if bisect_tol < MIN_BISECT_TOL:
        raise ValueError(f"bisect_tol must be at least {MIN_BISECT_TOL}")
    n = len(base_channels)
    d = base_channels[0].d
    for c in base_channels:
        if c.d != d:
            raise ValueError("all channels must share one square dimension")
    dirs = []
    for u in directions:
        u = np.asarray(u, dtype=float)
        if u.shape != (n,) or abs(float(np.linalg.norm(u)) - 1.0) > 1e-9:
            raise ValueError(f"direction {u} is not a unit vector of length {n}")
        if np.any(u < -1e-12):
            raise ValueError(f"direction {u} leaves the positive orthant")
        dirs.append(np.clip(u, 0.0, None))

    bases, labels = resolve_bases(d, n, bases_policy)

    def scaled(r, u):
        return [
            mix_toward_depolarizing(c, min(r * ui, 1.0))
            for c, ui in zip(base_channels, u)
        ]

    def criterion_inside(r, u):
        verdict = zhu_criterion_channels(
            scaled(r, u), bases, basis_labels=labels, margin=margin
        )
        return verdict.kind is not VerdictKind.INCOMPATIBLE_CERTIFIED

    def oracle_inside(r, u):
        result = solve_joint_channel(scaled(r, u), budget=budget)
        # the region is closed, so marginal boundary verdicts count as inside
        return result.status is not Feasibility.INFEASIBLE

    def run_ray(u):
        live = u[u > 1e-12]
        r_max = float(1.0 / live.max())
        crit = bisect_boundary(lambda r: criterion_inside(r, u), r_max, bisect_tol)
        orac = (
            bisect_boundary(lambda r: oracle_inside(r, u), r_max, bisect_tol)
            if use_oracle
            else None
        )
        ana = float(analytic(u)) if analytic is not None else None
        return RayResult(
            direction=tuple(float(v) for v in u),
            criterion_radius=float(crit),
            oracle_radius=orac,
            analytic_radius=ana,
        )

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rays = tuple(pool.map(run_ray, dirs))
    else:
        rays = tuple(run_ray(u) for u in dirs)
    return RegionReport(
        channel_labels=tuple(c.label for c in base_channels),
        rays=rays,
    )


# ---------------------------------------------------------------------------
# figure datasets
# ---------------------------------------------------------------------------

def exact_pair_root(d: int, s: float) -> float:
    """Value of t solving t + s - (2/d) sqrt((1-t)(1-s)) = 1 for given s."""
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s={s} outside [0, 1]")
    b = 1.0 - s
    y = math.sqrt(b / (d * d) + 1.0 - b) - math.sqrt(b) / d
    return 1.0 - y * y


def emit_figure2_data(ds, resolution: int) -> dict:
    """Exact vs criterion thresholds for depolarizing pairs, per dimension.

    Rows are (d, s, t_exact, t_criterion) with t_exact the exact-boundary
    root and t_criterion = sqrt(1 - s^2) the criterion circle.
    """
    if resolution < 16:
        raise ValueError("resolution must be at least 16")
    rows = []
    for d in ds:
        for s in np.linspace(0.0, 1.0, resolution):
            s = float(s)
            t_exact = exact_pair_root(int(d), s)
            t_criterion = math.sqrt(max(0.0, 1.0 - s * s))
            rows.append([int(d), s, t_exact, t_criterion])
    return {
        "columns": ["d", "s", "t_exact", "t_criterion"],
        "rows": rows,
        "meta": {
            "description": "exact and criterion compatibility thresholds "
            "for pairs of depolarizing channels",
        },
    }


def emit_figure1_data(
    b,
    c,
    resolution: int,
    use_oracle: bool = False,
    *,
    budget: int = DEFAULT_ORACLE_BUDGET,
    bisect_tol: float = 1e-3,
) -> dict:
    """Criterion region (and optional oracle samples) for a Schur pair.

    Rows are (s, t, criterion_inside, oracle_compatible); the oracle column
    is empty unless requested.  With the oracle on, the boundary radii
    along both axes and the diagonal are recorded in the metadata; those
    are the maximally compatible mixtures in the respective directions.
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    chan_b, chan_c = make_schur(b), make_schur(c)
    beta_b, beta_c = beta(b), beta(c)
    eps = 1e-12

    def criterion_inside(s, t):
        return (
            s * s + beta_c * t * t <= 1.0 + eps
            and beta_b * s * s + t * t <= 1.0 + eps
        )

    def oracle_compatible(s, t):
        pair = [
            mix_toward_depolarizing(chan_b, s),
            mix_toward_depolarizing(chan_c, t),
        ]
        return solve_joint_channel(pair, budget=budget).status is not (
            Feasibility.INFEASIBLE
        )

    grid = np.linspace(0.0, 1.0, resolution)
    rows = []
    for s in grid:
        for t in grid:
            s, t = float(s), float(t)
            row = [s, t, criterion_inside(s, t)]
            row.append(oracle_compatible(s, t) if use_oracle else None)
            rows.append(row)

    meta = {
        "beta_b": beta_b,
        "beta_c": beta_c,
        "criterion_region": "s^2 + beta_c t^2 <= 1 and beta_b s^2 + t^2 <= 1",
    }
    if use_oracle:
        diag = bisect_boundary(
            lambda r: oracle_compatible(r / math.sqrt(2.0), r / math.sqrt(2.0)),
            math.sqrt(2.0),
            bisect_tol,
        )
        axis_s = bisect_boundary(lambda r: oracle_compatible(r, 0.0), 1.0, bisect_tol)
        axis_t = bisect_boundary(lambda r: oracle_compatible(0.0, r), 1.0, bisect_tol)
        meta["boundary_points"] = {
            "diagonal_coordinate": diag / math.sqrt(2.0),
            "axis_s": axis_s,
            "axis_t": axis_t,
        }
        meta["boundary_interpretation"] = (
            "oracle compatibility boundary along the coordinate axes and "
            "the diagonal; these are the maximally compatible mixtures in "
            "those directions"
        )
    return {
        "columns": ["s", "t", "criterion_inside", "oracle_compatible"],
        "rows": rows,
        "meta": meta,
    }


# ---------------------------------------------------------------------------
# tabular output
# ---------------------------------------------------------------------------

def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def dataset_to_csv(dataset: dict) -> str:
    lines = [",".join(dataset["columns"])]
    for row in dataset["rows"]:
        lines.append(",".join(_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def region_report_to_dataset(report: RegionReport) -> dict:
    n = len(report.rays[0].direction) if report.rays else 0
    columns = [f"u{i}" for i in range(n)]
    columns += ["criterion_radius", "oracle_radius", "analytic_radius"]
    rows = []
    for ray in report.rays:
        rows.append(
            list(ray.direction)
            + [ray.criterion_radius, ray.oracle_radius, ray.analytic_radius]
        )
    return {
        "columns": columns,
        "rows": rows,
        "meta": {"channels": list(report.channel_labels)},
    }
