import numpy as np
import pytest

from qincompat import (
    Povm,
    canonical_basis,
    fourier_basis,
    g_matrix,
    induced_povm,
    make_depolarizing,
    make_identity,
    mub_family,
    z_matrix,
)
from qincompat.sdp import (
    DominationProblem,
    Feasibility,
    SolverStatus,
    _embed_for_partial_trace,
    _quad_rep,
    coords_to_mat,
    mat_to_coords,
    solve_domination,
    solve_joint_channel,
    solve_povm_joint,
)
from qincompat.linalg import frob_inner, partial_trace
from helpers import (
    random_basis,
    random_channel,
    random_compatible_pair,
    random_hermitian,
    random_psd,
    random_unitary,
)

RNG = np.random.default_rng(2718)


# --- coordinate carrier -----------------------------------------------------

def test_coords_roundtrip():
    for d in (2, 3, 6):
        m = random_hermitian(RNG, d)
        back = coords_to_mat(mat_to_coords(m), d)
        assert np.abs(back - m).max() < 1e-14


def test_coords_isometry():
    a = random_hermitian(RNG, 4)
    b = random_hermitian(RNG, 4)
    lhs = float(mat_to_coords(a) @ mat_to_coords(b))
    assert abs(lhs - frob_inner(a, b).real) < 1e-12


def test_quad_rep_matches_sandwich():
    for d in (2, 4):
        u = random_hermitian(RNG, d)
        x = random_hermitian(RNG, d)
        lhs = _quad_rep(u) @ mat_to_coords(x)
        assert np.abs(lhs - mat_to_coords(u @ x @ u)).max() < 1e-12


def test_embed_is_partial_trace_adjoint():
    dims = [2, 3, 2]
    keep = {0, 2}
    small = random_hermitian(RNG, 4)
    big = random_hermitian(RNG, 12)
    lhs = frob_inner(_embed_for_partial_trace(small, dims, keep), big)
    rhs = frob_inner(small, partial_trace(big, dims, keep))
    assert abs(lhs - rhs) < 1e-12


# --- domination solver -------------------------------------------------------

def test_single_constraint_is_tight():
    g = z_matrix(canonical_basis(2))
    res = solve_domination(DominationProblem(4, (g,)))
    assert res.status is SolverStatus.OPTIMAL
    assert abs(res.value - 2.0) < 1e-6
    assert np.abs(res.optimizer - g).max() < 1e-3
    assert res.gap <= 1e-6


def test_commuting_diagonal_pair():
    a = np.diag([3.0, 1.0]).astype(complex)
    b = np.diag([2.0, 2.0]).astype(complex)
    res = solve_domination(DominationProblem(2, (a, b)))
    assert abs(res.value - 5.0) < 1e-6


def test_commuting_random_pairs_match_eigen_max():
    for _ in range(20):
        d = 6
        u = random_unitary(RNG, d)
        da = RNG.uniform(0.0, 3.0, d)
        db = RNG.uniform(0.0, 3.0, d)
        a = u @ np.diag(da) @ u.conj().T
        b = u @ np.diag(db) @ u.conj().T
        res = solve_domination(DominationProblem(d, (a, b)))
        # oracle: joint eigenbasis, largest eigenvalue per direction
        assert abs(res.value - np.maximum(da, db).sum()) < 1e-6


def test_mub_constraints_closed_form():
    for d in (2, 3):
        fam = mub_family(d)
        for n in range(2, d + 2):
            ts = RNG.uniform(0.0, 1.0, n)
            cons = tuple(
                g_matrix(make_depolarizing(d, t), e).m
                for t, e in zip(ts, fam.bases)
            )
            res = solve_domination(DominationProblem(d * d, cons))
            expected = 1.0 + (d - 1) * float((ts ** 2).sum())
            assert abs(res.value - expected) < 1e-6


def test_weak_duality():
    cons = tuple(random_psd(RNG, 4) for _ in range(3))
    res = solve_domination(DominationProblem(4, cons))
    for c in cons:
        assert res.value >= np.trace(c).real - 1e-6


def test_feasibility_of_optimizer():
    cons = tuple(random_psd(RNG, 5) for _ in range(2))
    res = solve_domination(DominationProblem(5, cons))
    for c in cons:
        assert np.linalg.eigvalsh(res.optimizer - c)[0] >= -1e-7


def test_monotone_in_constraints():
    a, b, c = (random_psd(RNG, 4) for _ in range(3))
    two = solve_domination(DominationProblem(4, (a, b))).value
    three = solve_domination(DominationProblem(4, (a, b, c))).value
    assert three >= two - 1e-9


def test_orthogonal_closed_form():
    d = 3
    fam = mub_family(d)
    ts = (0.9, 0.6, 0.8)
    cons = tuple(
        g_matrix(make_depolarizing(d, t), e).m for t, e in zip(ts, fam.bases)
    )
    res = solve_domination(DominationProblem(d * d, cons))
    expected = 1.0 - len(cons) + sum(np.trace(c).real for c in cons)
    assert abs(res.value - expected) < 1e-6


def test_problem_validation():
    with pytest.raises(ValueError, match="at least one"):
        DominationProblem(4, ())
    with pytest.raises(ValueError, match="shape"):
        DominationProblem(4, (np.eye(3),))


# --- joint channel oracle ----------------------------------------------------

def test_delta_compatible_with_anything():
    phi = random_channel(RNG, 2)
    res = solve_joint_channel([make_depolarizing(2, 0.0), phi])
    assert res.status is Feasibility.FEASIBLE


def test_no_cloning():
    res = solve_joint_channel([make_identity(2), make_identity(2)])
    assert res.status is Feasibility.INFEASIBLE
    assert res.lambda_star < -1e-3


def test_depolarizing_boundary_marginal():
    c = make_depolarizing(2, 2.0 / 3.0)
    res = solve_joint_channel([c, c])
    assert res.status in (Feasibility.MARGINAL, Feasibility.FEASIBLE)
    assert abs(res.lambda_star) < 1e-5


def test_depolarizing_decisive_sides():
    inside = make_depolarizing(2, 0.6)
    assert solve_joint_channel([inside, inside]).status is Feasibility.FEASIBLE
    outside = make_depolarizing(2, 0.75)
    assert solve_joint_channel([outside, outside]).status is Feasibility.INFEASIBLE


def test_feasible_witness_is_valid_joint_choi():
    c1, c2 = random_compatible_pair(RNG, 2)
    res = solve_joint_channel([c1, c2])
    assert res.status is Feasibility.FEASIBLE
    w = res.witness
    assert np.abs(w - w.conj().T).max() < 1e-9
    assert np.linalg.eigvalsh(w)[0] >= -1e-6
    assert np.abs(partial_trace(w, [2, 2, 2], {0}) - np.eye(2)).max() < 1e-6
    # marginals reproduce the inputs
    assert np.abs(partial_trace(w, [2, 2, 2], {0, 1}) - c1.choi).max() < 1e-6
    assert np.abs(partial_trace(w, [2, 2, 2], {0, 2}) - c2.choi).max() < 1e-6


def test_oracle_permutation_symmetry():
    a = make_depolarizing(2, 0.8)
    b = random_channel(RNG, 2)
    r1 = solve_joint_channel([a, b])
    r2 = solve_joint_channel([b, a])
    assert r1.status == r2.status
    assert abs(r1.lambda_star - r2.lambda_star) < 1e-6


def test_budget_error_names_dimension():
    with pytest.raises(ValueError, match="3\\^3 = 27"):
        solve_joint_channel([make_depolarizing(3, 0.5)] * 2, budget=100)


def test_certified_gap_small():
    res = solve_joint_channel([make_identity(2), make_identity(2)])
    assert res.gap <= 1e-4


def test_witness_packages_as_rectangular_channel():
    from qincompat.sdp import joint_witness_channel

    c1, c2 = random_compatible_pair(RNG, 2)
    res = solve_joint_channel([c1, c2])
    joint = joint_witness_channel(res, 2, 2)
    assert joint.d_in == 2 and joint.d_out == 4
    infeasible = solve_joint_channel([make_identity(2), make_identity(2)])
    with pytest.raises(ValueError, match="not a certified channel"):
        joint_witness_channel(infeasible, 2, 2)


# --- joint measurement oracle ------------------------------------------------

def test_trivial_povms_jointly_measurable():
    p = Povm(2, (np.eye(2),))
    res = solve_povm_joint([p, p])
    assert res.status is Feasibility.FEASIBLE


def test_canonical_fourier_not_jointly_measurable():
    pc = Povm(2, tuple(np.outer(v, v.conj()) for v in canonical_basis(2)))
    pf = Povm(2, tuple(np.outer(v, v.conj()) for v in fourier_basis(2)))
    res = solve_povm_joint([pc, pf])
    assert res.status is Feasibility.INFEASIBLE


def test_induced_povms_of_compatible_pair():
    c1, c2 = random_compatible_pair(RNG, 2)
    p1 = induced_povm(c1, random_basis(RNG, 2))
    p2 = induced_povm(c2, random_basis(RNG, 2))
    res = solve_povm_joint([p1, p2])
    assert res.status is Feasibility.FEASIBLE


def test_povm_joint_budget():
    p = Povm(2, tuple(np.eye(2) / 4 for _ in range(4)))
    with pytest.raises(ValueError, match="budget"):
        solve_povm_joint([p, p, p, p, p], budget=100)
