import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qincompat.linalg import (
    check_basis,
    check_hermitian,
    eigh,
    frob_inner,
    is_psd,
    kron,
    min_eigenvalue,
    partial_trace,
    unvec,
    vec,
)
from helpers import random_basis, random_hermitian, random_povm

RNG = np.random.default_rng(20240817)


def test_kron_identity():
    assert np.array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))


def test_kron_diag():
    out = kron(np.diag([1.0, 0.0]), np.diag([1.0, 0.0]))
    assert np.array_equal(out, np.diag([1.0, 0.0, 0.0, 0.0]))


def test_kron_trace_multiplicative():
    for _ in range(10):
        a = random_hermitian(RNG, 3)
        b = random_hermitian(RNG, 3)
        # oracle: direct multiplication of the two traces
        expected = np.trace(a) * np.trace(b)
        assert abs(np.trace(kron(a, b)) - expected) < 1e-12


def test_partial_trace_of_maximally_entangled():
    v = vec(np.eye(2))
    omega = np.outer(v, v.conj()) / 2.0
    out = partial_trace(omega, [2, 2], {0})
    assert np.abs(out - np.eye(2) / 2).max() < 1e-14


def test_partial_trace_of_kron():
    for _ in range(10):
        a = random_hermitian(RNG, 2)
        b = random_hermitian(RNG, 2)
        out = partial_trace(kron(a, b), [2, 2], {0})
        assert np.abs(out - a * np.trace(b)).max() < 1e-12


def test_partial_trace_keep_all_is_identity_map():
    m = random_hermitian(RNG, 6)
    out = partial_trace(m, [2, 3], {0, 1})
    assert np.abs(out - m).max() < 1e-14


def test_partial_trace_preserves_trace():
    m = random_hermitian(RNG, 8)
    out = partial_trace(m, [2, 2, 2], {1})
    assert abs(np.trace(out) - np.trace(m)) < 1e-12


def test_partial_trace_dim_mismatch_message():
    with pytest.raises(ValueError, match="product of dims is 6"):
        partial_trace(np.eye(4), [2, 3], {0})


def test_partial_trace_composition():
    # tracing out factor 2 then factor 3 equals tracing out both at once
    for _ in range(5):
        m = random_hermitian(RNG, 8)
        once = partial_trace(m, [2, 2, 2], {0})
        stepwise = partial_trace(partial_trace(m, [2, 2, 2], {0, 1}), [2, 2], {0})
        assert np.abs(once - stepwise).max() < 1e-12


def test_vec_convention():
    e0 = np.array([[1.0, 0.0], [0.0, 0.0]])
    assert np.array_equal(vec(e0), [1, 0, 0, 0])
    e01 = np.array([[0.0, 1.0], [0.0, 0.0]])
    assert np.array_equal(vec(e01), [0, 1, 0, 0])


def test_vec_of_projector_is_kron():
    for d in (2, 3, 5):
        v = RNG.normal(size=d) + 1j * RNG.normal(size=d)
        v /= np.linalg.norm(v)
        assert np.abs(vec(np.outer(v, v.conj())) - np.kron(v, v.conj())).max() < 1e-14


def test_vec_inner_product_is_trace():
    for _ in range(10):
        a = random_hermitian(RNG, 4)
        b = random_hermitian(RNG, 4)
        lhs = np.vdot(vec(a), vec(b))
        assert abs(lhs - np.trace(a.conj().T @ b)) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=2, max_value=6), st.integers(min_value=0, max_value=2**31))
def test_vec_unvec_roundtrip(d, seed):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    assert np.array_equal(unvec(vec(m)), m)


def test_eigh_identity():
    w, v = eigh(np.eye(3))
    assert np.allclose(w, 1.0)
    assert np.abs(v.conj().T @ v - np.eye(3)).max() < 1e-12


def test_eigh_sorted_ascending():
    w, _ = eigh(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(w, [1.0, 2.0, 3.0])


def test_eigh_reconstruction():
    for _ in range(100):
        m = random_hermitian(RNG, 6)
        w, v = eigh(m)
        rebuilt = (v * w) @ v.conj().T
        assert np.linalg.norm(rebuilt - m) < 1e-9 * max(1.0, np.linalg.norm(m))


def test_eigh_deterministic():
    m = random_hermitian(RNG, 5)
    w1, v1 = eigh(m)
    w2, v2 = eigh(m.copy())
    assert np.array_equal(w1, w2)
    assert np.array_equal(v1, v2)


def test_eigh_weyl_bounds():
    for _ in range(5):
        a = random_hermitian(RNG, 4)
        b = random_hermitian(RNG, 4)
        wa, _ = eigh(a)
        wb, _ = eigh(b)
        wab, _ = eigh(a + b)
        assert np.all(wab >= wa + wb[0] - 1e-10)
        assert np.all(wab <= wa + wb[-1] + 1e-10)


def test_is_psd():
    assert is_psd(np.eye(3), 0.0)
    assert not is_psd(np.diag([1.0, -1e-6]), 1e-8)
    with pytest.raises(ValueError):
        is_psd(np.eye(2), -1.0)


def test_is_psd_g_minus_omega():
    from qincompat.fisher import g_matrix_povm, omega

    for _ in range(10):
        p = random_povm(RNG, 2, 3)
        g = g_matrix_povm(p)
        assert is_psd(g.m - omega(2), 1e-9)


def test_frob_inner_identity():
    for d in (2, 3, 5):
        assert abs(frob_inner(np.eye(d), np.eye(d)) - d) < 1e-12


def test_frob_inner_dim_mismatch():
    with pytest.raises(ValueError, match="dimension mismatch"):
        frob_inner(np.eye(2), np.eye(3))


def test_frob_inner_hermitian_is_real():
    a = random_hermitian(RNG, 4)
    b = random_hermitian(RNG, 4)
    assert abs(frob_inner(a, b).imag) < 1e-12


def test_check_hermitian_rejects():
    with pytest.raises(ValueError, match="not Hermitian"):
        check_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_check_basis():
    check_basis(random_basis(RNG, 4))
    with pytest.raises(ValueError, match="orthonormal"):
        check_basis(np.ones((2, 2)))


def test_min_eigenvalue():
    assert abs(min_eigenvalue(np.diag([2.0, -3.0, 1.0])) + 3.0) < 1e-12
