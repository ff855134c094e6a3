"""Two small dense semidefinite solvers.

(a) ``solve_domination``: minimize Tr H subject to H >= G_i for a list of
    Hermitian constraints.  A log-det barrier is driven down a geometric
    schedule with damped Newton centering steps:

        minimize  Tr H - mu * sum_i log det(H - G_i + eps I).

    The reported gap comes from the barrier parameter, 2 * mu * N * dim.

(b) ``solve_joint_channel`` / ``solve_povm_joint``: decide whether a joint
    channel (or joint measurement) with prescribed marginals exists.  The
    affine constraints are eliminated by a particular least-squares
    solution plus an orthonormal null-space basis, and the concave function
    lambda_min over the remaining free coordinates is maximized by the same
    barrier machinery applied to

        maximize  lambda + mu * log det(J(x) - lambda I).

    The returned optimum is certified a posteriori: the scaled inverse
    slack matrix is an almost-feasible dual point whose constraint defect,
    multiplied by an a priori bound on the optimizer norm, bounds the
    distance to the true optimum from above.

Hermitian variables are carried as real coordinate vectors over a fixed
orthonormal basis (diagonal units plus symmetric and antisymmetric
off-diagonal pairs scaled by 1/sqrt(2)), so the Newton linear algebra is
real throughout.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .channels import Channel
from .linalg import check_hermitian

DOMINATION_GAP_TOL = 1e-6
FEASIBILITY_GAP_COARSE = 1e-5
FEASIBILITY_GAP_FINE = 5e-8
FEASIBLE_BAND = 1e-7
# N * (d^(N+1))^2; 2000 admits d=2 with N <= 3 and d=3 pairs, nothing larger
DEFAULT_ORACLE_BUDGET = 2000

_BARRIER_SHIFT = 1e-12
_MU_FACTOR = 0.2
_ARMIJO = 0.01
# dense Hessian assembly for the domination solver up to this matrix size
_DENSE_QUADREP_MAX_DIM = 30


class SolverStatus(Enum):
    OPTIMAL = "optimal"
    MAX_ITERATIONS = "max-iterations"
    NUMERICAL_FAILURE = "numerical-failure"


class Feasibility(Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    MARGINAL = "marginal"


@dataclass(frozen=True)
class DominationProblem:
    """Constraints of the program min Tr H s.t. H >= constraints[i]."""

    dim: int
    constraints: tuple

    def __post_init__(self):
        if not self.constraints:
            raise ValueError("at least one constraint is required")
        mats = tuple(check_hermitian(c) for c in self.constraints)
        for k, c in enumerate(mats):
            if c.shape != (self.dim, self.dim):
                raise ValueError(
                    f"constraint {k} has shape {c.shape}, expected ({self.dim}, {self.dim})"
                )
        object.__setattr__(self, "constraints", mats)


@dataclass(frozen=True)
class SdpResult:
    value: float
    optimizer: np.ndarray
    gap: float
    iterations: int
    status: SolverStatus


@dataclass(frozen=True)
class FeasibilityResult:
    lambda_star: float
    witness: np.ndarray
    status: Feasibility
    gap: float = float("nan")
    iterations: int = 0


# ---------------------------------------------------------------------------
# real coordinates for Hermitian matrices
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _triu(d: int):
    iu, ju = np.triu_indices(d, 1)
    return iu, ju


def hermitian_coord_count(d: int) -> int:
    return d * d


def mat_to_coords(m) -> np.ndarray:
    """Coordinates of a Hermitian matrix in the fixed orthonormal real basis."""
    a = np.asarray(m, dtype=np.complex128)
    d = a.shape[0]
    iu, ju = _triu(d)
    upper = a[iu, ju]
    return np.concatenate(
        [np.diag(a).real, np.sqrt(2.0) * upper.real, np.sqrt(2.0) * upper.imag]
    )


def coords_to_mat(x, d: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.size != d * d:
        raise ValueError(f"coordinate vector of length {x.size}, expected {d * d}")
    iu, ju = _triu(d)
    k = len(iu)
    m = np.zeros((d, d), dtype=np.complex128)
    m[np.arange(d), np.arange(d)] = x[:d]
    upper = (x[d:d + k] + 1j * x[d + k:]) / np.sqrt(2.0)
    m[iu, ju] = upper
    m[ju, iu] = upper.conj()
    return m


def _quad_rep_sum(u_stack: np.ndarray) -> np.ndarray:
    """Coordinate-basis matrix of X -> sum_i U_i X U_i on Hermitians."""
    d = u_stack.shape[-1]
    iu, ju = _triu(d)
    k = len(iu)
    n = d * d
    sq2 = np.sqrt(2.0)

    dd = np.zeros((d, d))
    w = np.zeros((d, k), dtype=np.complex128)
    z1 = np.zeros((k, k), dtype=np.complex128)
    z2 = np.zeros((k, k), dtype=np.complex128)
    for u in u_stack:
        dd += (u * u.conj()).real
        # w[r, b] = u[r, iu_b] * u[ju_b, r]
        w += u[:, iu] * u[ju, :].T
        a1 = u[ju][:, iu]
        z1 += a1 * a1.T
        z2 += u[ju][:, ju] * u[iu][:, iu].T

    out = np.empty((n, n))
    sd, ss, sa = slice(0, d), slice(d, d + k), slice(d + k, n)
    out[sd, sd] = dd
    out[sd, ss] = sq2 * w.real
    out[ss, sd] = out[sd, ss].T
    out[sd, sa] = -sq2 * w.imag
    out[sa, sd] = out[sd, sa].T
    out[ss, ss] = (z1 + z2).real
    out[ss, sa] = (z2 - z1).imag
    out[sa, ss] = out[ss, sa].T
    out[sa, sa] = (z2 - z1).real
    return out


def _quad_rep(u: np.ndarray) -> np.ndarray:
    """Real matrix of the map X -> u X u on Hermitians, in coordinate form."""
    return _quad_rep_sum(u[None, :, :])


# ---------------------------------------------------------------------------
# domination solver
# ---------------------------------------------------------------------------

def _chol_logdet(s_stack):
    """Stacked Cholesky factors and total log-determinant, or (None, None)."""
    try:
        chol = np.linalg.cholesky(s_stack)
    except np.linalg.LinAlgError:
        return None, None
    diags = np.diagonal(chol, axis1=-2, axis2=-1).real
    if np.any(diags <= 0.0):
        return None, None
    return chol, 2.0 * float(np.log(diags).sum())


def _newton_cg(u_stack, mu, rhs_mat, tol, max_iter):
    """Solve mu * sum_i U_i X U_i = rhs over Hermitian X by preconditioned CG."""
    n_cons = u_stack.shape[0]
    mean_u = u_stack.sum(axis=0) / n_cons
    mean_inv = np.linalg.inv(mean_u)
    mean_inv = (mean_inv + mean_inv.conj().T) / 2.0
    scale = mu * n_cons

    def hv(x):
        return mu * np.einsum("ipq,qr,irs->ps", u_stack, x, u_stack, optimize=True)

    def pre(r):
        return (mean_inv @ r @ mean_inv) / scale

    x = np.zeros_like(rhs_mat)
    r = rhs_mat.copy()
    z = pre(r)
    p = z
    rz = np.vdot(r, z).real
    b_norm = np.linalg.norm(rhs_mat)
    for _ in range(max_iter):
        if np.linalg.norm(r) <= tol * max(1.0, b_norm):
            break
        hp = hv(p)
        alpha = rz / max(np.vdot(p, hp).real, 1e-300)
        x = x + alpha * p
        r = r - alpha * hp
        z = pre(r)
        rz_new = np.vdot(r, z).real
        p = z + (rz_new / max(rz, 1e-300)) * p
        rz = rz_new
    return (x + x.conj().T) / 2.0


def solve_domination(
    problem: DominationProblem,
    *,
    gap_tol: float = DOMINATION_GAP_TOL,
    max_newton_steps: int = 800,
) -> SdpResult:
    """Minimize Tr H over H dominating every constraint in the PSD order."""
    g_stack = np.stack(problem.constraints)
    n_cons, dim = g_stack.shape[0], problem.dim
    nu = n_cons * dim
    eye = np.eye(dim)
    shifted = g_stack - _BARRIER_SHIFT * eye

    lam_top = max(float(np.linalg.eigvalsh(g)[-1]) for g in problem.constraints)
    h = (lam_top + 1.0) * eye

    mu = 1.0
    mu_final = gap_tol / (4.0 * nu)
    dense = dim <= _DENSE_QUADREP_MAX_DIM

    steps = 0
    status = SolverStatus.OPTIMAL

    def phi_of(h_try, mu_now):
        _, logdet = _chol_logdet(h_try[None, :, :] - shifted)
        if logdet is None:
            return None
        return float(np.trace(h_try).real) - mu_now * logdet

    while status is SolverStatus.OPTIMAL:
        # center at the current barrier weight
        for _ in range(60):
            s_stack = h[None, :, :] - shifted
            chol, logdet = _chol_logdet(s_stack)
            if chol is None:
                status = SolverStatus.NUMERICAL_FAILURE
                break
            u_stack = np.linalg.inv(s_stack)
            u_stack = (u_stack + u_stack.conj().transpose(0, 2, 1)) / 2.0
            grad = eye - mu * u_stack.sum(axis=0)
            if dense:
                hess = mu * _quad_rep_sum(u_stack)
                gvec = mat_to_coords(grad)
                try:
                    dx = -np.linalg.solve(hess, gvec)
                except np.linalg.LinAlgError:
                    status = SolverStatus.NUMERICAL_FAILURE
                    break
                dec2 = float(-gvec @ dx)
                step_mat = coords_to_mat(dx, dim)
            else:
                step_mat = _newton_cg(u_stack, mu, -grad, 1e-12, 4 * dim * dim)
                dec2 = float(np.vdot(step_mat, -grad).real)
            tol_dec = max(mu / 16.0, 1e-13 * (1.0 + abs(float(np.trace(h).real))))
            if dec2 <= tol_dec:
                break
            phi0 = float(np.trace(h).real) - mu * logdet
            t = 1.0
            accepted = False
            while t > 1e-13:
                h_try = h + t * step_mat
                phi_try = phi_of(h_try, mu)
                if phi_try is not None and phi_try <= phi0 - _ARMIJO * t * dec2:
                    h = h_try
                    accepted = True
                    break
                t *= 0.5
            steps += 1
            if not accepted:
                status = SolverStatus.NUMERICAL_FAILURE
                break
            if steps >= max_newton_steps:
                status = SolverStatus.MAX_ITERATIONS
                break
        if status is not SolverStatus.OPTIMAL or mu <= mu_final:
            break
        mu = max(mu * _MU_FACTOR, mu_final)

    h = (h + h.conj().T) / 2.0
    return SdpResult(
        value=float(np.trace(h).real),
        optimizer=h,
        gap=2.0 * nu * mu,
        iterations=steps,
        status=status,
    )


# ---------------------------------------------------------------------------
# affine lambda_min maximization engine
# ---------------------------------------------------------------------------

def _max_affine_min_eig(
    j0: np.ndarray,
    basis: np.ndarray,
    *,
    coarse_gap: float = FEASIBILITY_GAP_COARSE,
    fine_gap: float = FEASIBILITY_GAP_FINE,
    band: float = FEASIBLE_BAND,
    max_newton_steps: int = 4000,
):
    """Maximize lambda_min(j0 + sum_k x_k basis[k]) over x.

    Returns ``(x, lam_attained, upper_bound, steps)``.  ``basis`` must be
    orthonormal in the Frobenius inner product, with traceless members.
    """
    dim = j0.shape[0]
    m = basis.shape[0] if basis.size else 0
    eye = np.eye(dim)

    if m == 0:
        lam = float(np.linalg.eigvalsh(j0)[0])
        return np.zeros(0), lam, lam, 0

    traces = np.abs(np.einsum("kpp->k", basis))
    if traces.max() > 1e-8:
        raise ValueError("free directions must be traceless for the optimum bound")

    basis_sw = basis.transpose(0, 2, 1).reshape(m, dim * dim)

    x = np.zeros(m)
    lam = float(np.linalg.eigvalsh(j0)[0]) - 1.0
    mu = 1.0
    steps = 0

    def s_of(x_now, lam_now):
        return j0 + np.tensordot(x_now, basis, axes=1) - lam_now * eye

    def phi_of(x_now, lam_now, mu_now):
        _, logdet = _chol_logdet(s_of(x_now, lam_now)[None, :, :])
        if logdet is None:
            return None
        return lam_now + mu_now * logdet

    best = (x.copy(), lam)
    ub_min = float("inf")
    while True:
        # center at the current barrier weight
        u = None
        polish_done = 0
        for _ in range(80):
            s = s_of(x, lam)
            chol, logdet = _chol_logdet(s[None, :, :])
            if chol is None:
                raise RuntimeError("barrier iterate left the feasible cone")
            u = np.linalg.inv(s)
            u = (u + u.conj().T) / 2.0
            t_stack = np.einsum("pq,kqr,rs->kps", u, basis, u, optimize=True)
            gx = mu * np.einsum("kpq,qp->k", basis, u, optimize=True).real
            gl = 1.0 - mu * float(np.trace(u).real)
            hxx = mu * (t_stack.reshape(m, -1) @ basis_sw.T).real
            hxl = mu * np.einsum("kpp->k", t_stack).real
            hll = mu * float((u * u.conj()).sum().real)
            mat = np.empty((m + 1, m + 1))
            mat[:m, :m] = hxx
            mat[:m, m] = -hxl
            mat[m, :m] = -hxl
            mat[m, m] = hll
            grad = np.concatenate([gx, [gl]])
            try:
                dz = np.linalg.solve(mat, grad)
            except np.linalg.LinAlgError:
                dz = np.linalg.lstsq(mat, grad, rcond=None)[0]
            dec2 = float(grad @ dz)
            hard_tol = 1e-13 * (1.0 + abs(lam))
            if dec2 <= hard_tol:
                break
            if dec2 <= mu / 16.0:
                # a couple of extra steps tighten the dual certificate
                polish_done += 1
                if polish_done > 2:
                    break
            phi0 = lam + mu * logdet
            t = 1.0
            accepted = False
            while t > 1e-13:
                x_try = x + t * dz[:m]
                lam_try = lam + t * dz[m]
                phi_try = phi_of(x_try, lam_try, mu)
                if phi_try is not None and phi_try >= phi0 + _ARMIJO * t * dec2:
                    x, lam = x_try, lam_try
                    accepted = True
                    break
                t *= 0.5
            steps += 1
            if not accepted or steps >= max_newton_steps:
                break

        # certificate: restore exact dual feasibility of the scaled inverse
        # slack by projecting out the free directions, then mix with the
        # (always dual-feasible) normalized identity to regain positivity
        s = s_of(x, lam)
        lam_att = lam + float(np.linalg.eigvalsh(s)[0])
        if u is None:
            u = np.linalg.inv(s)
            u = (u + u.conj().T) / 2.0
        y = u / float(np.trace(u).real)
        defect = np.einsum("kpq,qp->k", basis, y, optimize=True).real
        y_proj = y - np.tensordot(defect, basis, axes=1)
        y_min = float(np.linalg.eigvalsh(y_proj)[0])
        theta = 0.0
        if y_min < 0.0:
            theta = -y_min * dim / (1.0 - y_min * dim)
        ub = (1.0 - theta) * float(np.vdot(y_proj, j0).real) + theta * float(
            np.trace(j0).real
        ) / dim

        if lam_att > best[1]:
            best = (x.copy(), lam_att)
        ub_min = min(ub_min, ub)
        gap = ub_min - best[1]
        decided = best[1] >= band or ub_min <= -band
        if gap <= fine_gap or (gap <= coarse_gap and decided):
            break
        if mu <= 1e-13 or steps >= max_newton_steps:
            break
        mu *= _MU_FACTOR

    x_best, lam_best = best
    return x_best, lam_best, ub_min, steps


def _classify(lam: float, band: float = FEASIBLE_BAND) -> Feasibility:
    if lam >= band:
        return Feasibility.FEASIBLE
    if lam <= -band:
        return Feasibility.INFEASIBLE
    return Feasibility.MARGINAL


def _null_space_setup(rows: np.ndarray, rhs: np.ndarray, dim: int, to_matrix):
    """Particular solution and orthonormal traceless null basis of rows @ x = rhs."""
    sol, _, _, _ = np.linalg.lstsq(rows, rhs, rcond=None)
    residual = float(np.linalg.norm(rows @ sol - rhs))
    if residual > 1e-8 * (1.0 + float(np.linalg.norm(rhs))):
        raise RuntimeError(
            f"marginal constraints are inconsistent: residual {residual:.3e}"
        )
    _, svals, vt = np.linalg.svd(rows, full_matrices=True)
    tol = max(rows.shape) * np.finfo(float).eps * (svals[0] if svals.size else 1.0)
    rank = int((svals > tol).sum())
    null_rows = vt[rank:]
    j0 = to_matrix(sol)
    basis = np.stack([to_matrix(r) for r in null_rows]) if len(null_rows) else (
        np.zeros((0, j0.shape[0], j0.shape[0]), dtype=np.complex128)
    )
    return j0, basis


# ---------------------------------------------------------------------------
# joint channel oracle
# ---------------------------------------------------------------------------

def _embed_for_partial_trace(small: np.ndarray, dims, keep) -> np.ndarray:
    """Adjoint of the partial trace: <embed(A), M> == <A, Tr_discarded(M)>."""
    dims = list(dims)
    k = len(dims)
    kept = sorted(keep)
    traced = [i for i in range(k) if i not in kept]
    d_tr = int(np.prod([dims[i] for i in traced])) if traced else 1
    big = np.kron(small, np.eye(d_tr, dtype=np.complex128))
    order = kept + traced
    dims_in_order = [dims[i] for i in order]
    t = big.reshape(dims_in_order + dims_in_order)
    perm = list(np.argsort(order))
    t = t.transpose(perm + [p + k for p in perm])
    total = int(np.prod(dims))
    return np.ascontiguousarray(t.reshape(total, total))


def solve_joint_channel(
    channels,
    *,
    budget: int = DEFAULT_ORACLE_BUDGET,
    coarse_gap: float = FEASIBILITY_GAP_COARSE,
    fine_gap: float = FEASIBILITY_GAP_FINE,
) -> FeasibilityResult:
    """Decide whether the given channels are marginals of one joint channel.

    Maximizes the smallest eigenvalue over all Hermitian J of dimension
    d^(N+1) with Tr over all outputs equal to I_d and the i-th output
    marginal equal to the i-th Choi matrix.  A nonnegative optimum means a
    joint channel exists.
    """
    channels = list(channels)
    if not channels:
        raise ValueError("at least one channel is required")
    d = channels[0].d
    for c in channels:
        if c.d != d:
            raise ValueError("all channels must share one square dimension")
    n = len(channels)
    big_dim = d ** (n + 1)
    cost = n * big_dim * big_dim
    if cost > budget:
        raise ValueError(
            f"joint Choi matrix of dimension {d}^{n + 1} = {big_dim} needs "
            f"N * dim^2 = {cost}, over the oracle budget {budget}; raise the "
            "budget explicitly to force the solve"
        )

    dims = [d] * (n + 1)
    targets = [(frozenset({0, i + 1}), c.choi) for i, c in enumerate(channels)]
    targets.append((frozenset({0}), np.eye(d, dtype=np.complex128)))

    rows, rhs_parts = [], []
    for keep, target in targets:
        dk = int(np.prod([dims[i] for i in sorted(keep)]))
        nk = hermitian_coord_count(dk)
        rhs_parts.append(mat_to_coords(target))
        unit = np.zeros(nk)
        for b in range(nk):
            unit[b] = 1.0
            emb = _embed_for_partial_trace(coords_to_mat(unit, dk), dims, keep)
            rows.append(mat_to_coords(emb))
            unit[b] = 0.0

    j0, basis = _null_space_setup(
        np.array(rows), np.concatenate(rhs_parts), big_dim,
        lambda v: coords_to_mat(v, big_dim),
    )
    x, lam, ub, steps = _max_affine_min_eig(
        j0, basis, coarse_gap=coarse_gap, fine_gap=fine_gap
    )
    witness = j0 + (np.tensordot(x, basis, axes=1) if x.size else 0.0)
    witness = (witness + witness.conj().T) / 2.0
    return FeasibilityResult(
        lambda_star=lam,
        witness=witness,
        status=_classify(lam),
        gap=ub - lam,
        iterations=steps,
    )


def joint_witness_channel(result: FeasibilityResult, d: int, n: int) -> Channel:
    """Package a feasible oracle witness as a d -> d^n channel."""
    if result.status is not Feasibility.FEASIBLE:
        raise ValueError(
            f"witness with status {result.status.value} is not a certified channel"
        )
    return Channel(d, d ** n, result.witness, label="joint-witness")


# ---------------------------------------------------------------------------
# joint measurement oracle
# ---------------------------------------------------------------------------

def solve_povm_joint(
    povms,
    *,
    budget: int = DEFAULT_ORACLE_BUDGET,
    coarse_gap: float = FEASIBILITY_GAP_COARSE,
    fine_gap: float = FEASIBILITY_GAP_FINE,
) -> FeasibilityResult:
    """Decide joint measurability of the given POVMs.

    The joint measurement is a block-diagonal variable with one d x d block
    per joint outcome; marginal matching is affine and positivity of every
    block is the PSD constraint, so the same lambda_min engine applies.
    """
    povms = list(povms)
    if not povms:
        raise ValueError("at least one POVM is required")
    d = povms[0].d
    for p in povms:
        if p.d != d:
            raise ValueError("all POVMs must share one dimension")
    counts = [len(p) for p in povms]
    n_out = int(np.prod(counts))
    big_dim = n_out * d
    if big_dim * big_dim > budget:
        raise ValueError(
            f"joint measurement block matrix of dimension {n_out} * {d} = {big_dim} "
            f"needs dim^2 = {big_dim * big_dim}, over the oracle budget {budget}"
        )

    bc = hermitian_coord_count(d)
    n_coords = n_out * bc
    outcomes = list(itertools.product(*[range(c) for c in counts]))

    rows, rhs_parts = [], []
    for i, p in enumerate(povms):
        for a in range(counts[i]):
            rhs_parts.append(mat_to_coords(p.effects[a]))
            sel = [sb for sb, s in enumerate(outcomes) if s[i] == a]
            for b in range(bc):
                row = np.zeros(n_coords)
                row[[sb * bc + b for sb in sel]] = 1.0
                rows.append(row)

    def to_big(v):
        out = np.zeros((big_dim, big_dim), dtype=np.complex128)
        for sb in range(n_out):
            block = coords_to_mat(v[sb * bc:(sb + 1) * bc], d)
            out[sb * d:(sb + 1) * d, sb * d:(sb + 1) * d] = block
        return out

    j0, basis = _null_space_setup(
        np.array(rows), np.concatenate(rhs_parts), big_dim, to_big
    )
    x, lam, ub, steps = _max_affine_min_eig(
        j0, basis, coarse_gap=coarse_gap, fine_gap=fine_gap
    )
    witness = j0 + (np.tensordot(x, basis, axes=1) if x.size else 0.0)
    witness = (witness + witness.conj().T) / 2.0
    return FeasibilityResult(
        lambda_star=lam,
        witness=witness,
        status=_classify(lam),
        gap=ub - lam,
        iterations=steps,
    )
