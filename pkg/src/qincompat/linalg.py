"""Dense complex matrix primitives.

Kronecker products, partial traces, row-major vectorization and Hermitian
eigendecompositions.  Every function is pure and returns fresh arrays, so
values can be shared freely between threads.

Vectorization is row-major: ``vec(m)[d*i + j] == m[i, j]``.  With this
choice ``vec(|e><e|) == kron(e, conj(e))``, which the Fisher-geometry
module relies on.
"""

from __future__ import annotations

import numpy as np

# Inputs are constructed analytically; Hermiticity drift beyond this is a bug.
HERMITICITY_RTOL = 1e-10

_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def as_matrix(m) -> np.ndarray:
    """Coerce to a 2-D complex128 array."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got array of shape {a.shape}")
    return a


def check_square(m) -> np.ndarray:
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def check_hermitian(m, rtol: float = HERMITICITY_RTOL) -> np.ndarray:
    """Return ``m`` as a complex array, raising if it is not Hermitian."""
    a = check_square(m)
    defect = np.linalg.norm(a - a.conj().T)
    if defect > rtol * max(1.0, np.linalg.norm(a)):
        raise ValueError(
            f"matrix is not Hermitian: ||M - M^dag|| = {defect:.3e} exceeds "
            f"tolerance {rtol:.1e} (relative)"
        )
    return a


def check_basis(e, tol: float = HERMITICITY_RTOL) -> np.ndarray:
    """Validate an orthonormal basis given as rows of a d x d array."""
    a = check_square(e)
    gram = a.conj() @ a.T
    defect = np.abs(gram - np.eye(a.shape[0])).max()
    if defect > tol:
        raise ValueError(
            f"rows do not form an orthonormal basis: Gram defect {defect:.3e}"
        )
    return a


def kron(a, b) -> np.ndarray:
    """Kronecker product."""
    return np.kron(as_matrix(a), as_matrix(b))


def vec(m) -> np.ndarray:
    """Row-major vectorization of a square matrix."""
    a = check_square(m)
    return a.reshape(-1).copy()


def unvec(v) -> np.ndarray:
    """Inverse of :func:`vec`."""
    a = np.asarray(v, dtype=np.complex128).reshape(-1)
    d = int(round(np.sqrt(a.size)))
    if d * d != a.size:
        raise ValueError(f"vector of length {a.size} is not a vectorized square matrix")
    return a.reshape(d, d).copy()


def partial_trace(m, dims, keep) -> np.ndarray:
    """Trace out all tensor factors not listed in ``keep``.

    Parameters
    ----------
    m : array
        Square matrix on the tensor product of subsystems with dimensions
        ``dims`` (subsystem 0 first).
    dims : sequence of int
        Dimension of each tensor factor; their product must match ``m``.
    keep : iterable of int
        Zero-based indices of the subsystems to keep (nonempty).
    """
    a = check_square(m)
    dims = [int(d) for d in dims]
    if any(d <= 0 for d in dims):
        raise ValueError(f"subsystem dimensions must be positive, got {dims}")
    total = int(np.prod(dims))
    if total != a.shape[0]:
        raise ValueError(
            f"dimension mismatch: product of dims is {total}, "
            f"but the matrix has dimension {a.shape[0]}"
        )
    k = len(dims)
    if k > len(_LETTERS) // 2:
        raise ValueError(f"too many subsystems ({k})")
    kept = sorted(set(int(i) for i in keep))
    if not kept:
        raise ValueError("keep must name at least one subsystem")
    if kept[0] < 0 or kept[-1] >= k:
        raise ValueError(f"keep indices {kept} out of range for {k} subsystems")

    row = list(_LETTERS[:k])
    col = list(_LETTERS[k:2 * k])
    for i in range(k):
        if i not in kept:
            col[i] = row[i]
    out = "".join(row[i] for i in kept) + "".join(col[i] for i in kept)
    expr = "".join(row) + "".join(col) + "->" + out
    t = a.reshape(dims + dims)
    reduced = np.einsum(expr, t)
    dk = int(np.prod([dims[i] for i in kept]))
    return np.ascontiguousarray(reduced.reshape(dk, dk))


def eigh(m):
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(w, v)`` with eigenvalues ``w`` ascending and ``v[:, k]`` the
    eigenvector for ``w[k]``.  Output is deterministic for identical input
    bits.
    """
    a = check_hermitian(m)
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        # LAPACK does not expose its sweep count; carry its diagnostic.
        raise RuntimeError(f"eigendecomposition failed to converge: {exc}") from exc
    return w, v


def min_eigenvalue(m) -> float:
    return float(np.linalg.eigvalsh(check_hermitian(m))[0])


def max_eigenvalue(m) -> float:
    return float(np.linalg.eigvalsh(check_hermitian(m))[-1])


def is_psd(m, tol: float) -> bool:
    """True iff the smallest eigenvalue is at least ``-tol``."""
    if tol < 0:
        raise ValueError("tol must be non-negative")
    return min_eigenvalue(m) >= -tol


def frob_inner(a, b) -> complex:
    """Frobenius inner product Tr(a^dag b)."""
    ma, mb = as_matrix(a), as_matrix(b)
    if ma.shape != mb.shape:
        raise ValueError(f"dimension mismatch: {ma.shape} vs {mb.shape}")
    return complex(np.vdot(ma, mb))
