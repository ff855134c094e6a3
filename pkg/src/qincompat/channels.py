"""Quantum channels in the Choi representation, plus POVMs.

Choi convention: the input factor comes first,

    choi = sum_{ij} |i><j| (x) Phi(|i><j|),

so a channel d_in -> d_out is stored as a Hermitian matrix of size
d_in * d_out with tensor factors ordered (input, output).  Complete
positivity is positive semidefiniteness of the Choi matrix and trace
preservation is Tr_out(choi) = I_in.

Channel maps are square (d_in == d_out) in all criterion workflows, but
the type supports rectangular channels so joint channels returned by the
feasibility oracle fit the same container.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    as_matrix,
    check_basis,
    check_hermitian,
    min_eigenvalue,
    partial_trace,
    vec,
)

# Constructors are exact in exact arithmetic; this only absorbs float noise.
VALIDATION_TOL = 1e-9


class ChannelValidationError(ValueError):
    pass


class PovmValidationError(ValueError):
    pass


def _frozen_array(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=np.complex128)
    out.setflags(write=False)
    return out


def validate_channel(choi, d_in: int, d_out: int, tol: float = VALIDATION_TOL) -> None:
    """Raise ChannelValidationError unless ``choi`` is a CP + TP Choi matrix."""
    a = as_matrix(choi)
    dim = d_in * d_out
    if a.shape != (dim, dim):
        raise ChannelValidationError(
            f"Choi matrix has shape {a.shape}, expected ({dim}, {dim}) "
            f"for a {d_in} -> {d_out} channel"
        )
    try:
        a = check_hermitian(a)
    except ValueError as exc:
        raise ChannelValidationError(str(exc)) from exc
    lam = min_eigenvalue(a)
    if lam < -tol:
        raise ChannelValidationError(
            f"not completely positive: Choi matrix has eigenvalue {lam:.3e}"
        )
    marg = partial_trace(a, [d_in, d_out], keep={0})
    defect = np.abs(marg - np.eye(d_in)).max()
    if defect > tol:
        raise ChannelValidationError(
            f"not trace preserving: Tr_out(choi) deviates from identity by {defect:.3e}"
        )


@dataclass(frozen=True)
class Channel:
    """A completely positive trace-preserving map stored as its Choi matrix."""

    d_in: int
    d_out: int
    choi: np.ndarray
    label: str = ""

    def __post_init__(self):
        validate_channel(self.choi, self.d_in, self.d_out)
        object.__setattr__(self, "choi", _frozen_array(self.choi))

    @property
    def d(self) -> int:
        """Common dimension of a square channel."""
        if self.d_in != self.d_out:
            raise ValueError(
                f"channel {self.label!r} is {self.d_in} -> {self.d_out}, not square"
            )
        return self.d_in

    def as_tensor(self) -> np.ndarray:
        """Choi matrix reshaped to (in, out, in, out) axes."""
        return self.choi.reshape(self.d_in, self.d_out, self.d_in, self.d_out)


@dataclass(frozen=True)
class Povm:
    """A finite list of positive effects summing to the identity."""

    d: int
    effects: tuple = field(default_factory=tuple)

    def __post_init__(self):
        effs = tuple(_frozen_array(as_matrix(e)) for e in self.effects)
        validate_povm(effs, self.d)
        object.__setattr__(self, "effects", effs)

    def __len__(self) -> int:
        return len(self.effects)


def validate_povm(effects, d: int, tol: float = VALIDATION_TOL) -> None:
    if not effects:
        raise PovmValidationError("a POVM needs at least one effect")
    total = np.zeros((d, d), dtype=np.complex128)
    for k, e in enumerate(effects):
        a = as_matrix(e)
        if a.shape != (d, d):
            raise PovmValidationError(
                f"effect {k} has shape {a.shape}, expected ({d}, {d})"
            )
        try:
            a = check_hermitian(a)
        except ValueError as exc:
            raise PovmValidationError(f"effect {k}: {exc}") from exc
        lam = min_eigenvalue(a)
        if lam < -tol:
            raise PovmValidationError(
                f"effect {k} is not positive semidefinite: eigenvalue {lam:.3e}"
            )
        total += a
    defect = np.abs(total - np.eye(d)).max()
    if defect > tol:
        raise PovmValidationError(
            f"effects do not sum to the identity: max deviation {defect:.3e}"
        )


# ---------------------------------------------------------------------------
# named channel families
# ---------------------------------------------------------------------------

def _identity_choi(d: int) -> np.ndarray:
    v = vec(np.eye(d))
    return np.outer(v, v.conj())


def make_identity(d: int) -> Channel:
    return Channel(d, d, _identity_choi(d), label=f"identity(d={d})")


def make_depolarizing(d: int, t: float) -> Channel:
    """Mixture t * id + (1 - t) * Delta, Delta(X) = Tr(X) I/d."""
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValueError(
            f"depolarizing parameter t={t} outside [0, 1]; the map is not "
            "completely positive there"
        )
    choi = t * _identity_choi(d) + (1.0 - t) * np.eye(d * d) / d
    return Channel(d, d, choi, label=f"depolarizing(d={d},t={t:g})")


def make_schur(b) -> Channel:
    """Entrywise multiplication X -> b o X for PSD b with unit diagonal."""
    a = check_hermitian(b)
    d = a.shape[0]
    lam = min_eigenvalue(a)
    if lam < -VALIDATION_TOL:
        raise ChannelValidationError(
            f"Schur matrix is not positive semidefinite: eigenvalue {lam:.3e}"
        )
    diag_defect = np.abs(np.diag(a) - 1.0).max()
    if diag_defect > VALIDATION_TOL:
        raise ChannelValidationError(
            f"Schur matrix diagonal deviates from 1 by {diag_defect:.3e}; "
            "the map would not be trace preserving"
        )
    choi = np.zeros((d * d, d * d), dtype=np.complex128)
    diag_pos = np.arange(d) * d + np.arange(d)
    choi[np.ix_(diag_pos, diag_pos)] = a
    return Channel(d, d, choi, label=f"schur(d={d})")


# ---------------------------------------------------------------------------
# channel action
# ---------------------------------------------------------------------------

def apply(c: Channel, x) -> np.ndarray:
    """Apply the channel to an operator on the input space."""
    a = as_matrix(x)
    if a.shape != (c.d_in, c.d_in):
        raise ValueError(
            f"operator has shape {a.shape}, channel input dimension is {c.d_in}"
        )
    return np.einsum("iajb,ij->ab", c.as_tensor(), a)


def adjoint_apply(c: Channel, a) -> np.ndarray:
    """Heisenberg-picture action, <A, Phi(rho)> = <Phi*(A), rho>."""
    m = as_matrix(a)
    if m.shape != (c.d_out, c.d_out):
        raise ValueError(
            f"operator has shape {m.shape}, channel output dimension is {c.d_out}"
        )
    return np.einsum("iajb,ab->ij", c.as_tensor().conj(), m)


def induced_povm(c: Channel, e) -> Povm:
    """POVM with effects Phi*(|e_i><e_i|) for the rows e_i of ``e``."""
    basis = check_basis(e)
    if basis.shape[0] != c.d_out:
        raise ValueError(
            f"basis dimension {basis.shape[0]} does not match output dimension {c.d_out}"
        )
    effects = [adjoint_apply(c, np.outer(v, v.conj())) for v in basis]
    return Povm(c.d_in, tuple(effects))


def marginal_channel(joint: Channel, dims, keep: int) -> Channel:
    """Marginal of a joint channel whose output factors as ``dims``."""
    dims = [int(d) for d in dims]
    if int(np.prod(dims)) != joint.d_out:
        raise ValueError(
            f"output dimension {joint.d_out} does not factor as {dims} "
            f"(product {int(np.prod(dims))})"
        )
    keep = int(keep)
    if not 0 <= keep < len(dims):
        raise ValueError(f"keep={keep} out of range for {len(dims)} output factors")
    choi = partial_trace(joint.choi, [joint.d_in] + dims, keep={0, keep + 1})
    return Channel(
        joint.d_in, dims[keep], choi, label=f"{joint.label}[marginal {keep}]"
    )


# ---------------------------------------------------------------------------
# JSON channel specs (consumed by the CLI)
# ---------------------------------------------------------------------------

def _pair_to_complex(p) -> complex:
    re, im = p
    return complex(float(re), float(im))


def _complex_to_pair(z: complex):
    return [float(z.real), float(z.imag)]


def _matrix_from_pairs(rows) -> np.ndarray:
    return np.array(
        [[_pair_to_complex(p) for p in row] for row in rows], dtype=np.complex128
    )


def channel_from_spec(spec: dict) -> Channel:
    """Build a channel from its JSON description.

    Recognized kinds::

        {"kind": "depolarizing", "d": 2, "t": 0.8}
        {"kind": "schur", "B": [[[re, im], ...], ...]}
        {"kind": "choi", "d_in": 2, "d_out": 2, "entries": [[re, im], ...]}

    ``entries`` is the row-major flattening of the Choi matrix.  An optional
    ``label`` overrides the generated one.
    """
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ValueError("channel spec must be an object with a 'kind' field")
    kind = spec["kind"]
    if kind == "depolarizing":
        c = make_depolarizing(int(spec["d"]), float(spec["t"]))
    elif kind == "schur":
        c = make_schur(_matrix_from_pairs(spec["B"]))
    elif kind == "choi":
        d_in, d_out = int(spec["d_in"]), int(spec["d_out"])
        entries = [_pair_to_complex(p) for p in spec["entries"]]
        dim = d_in * d_out
        if len(entries) != dim * dim:
            raise ValueError(
                f"choi spec has {len(entries)} entries, expected {dim * dim}"
            )
        choi = np.array(entries, dtype=np.complex128).reshape(dim, dim)
        c = Channel(d_in, d_out, choi, label=f"choi({d_in}->{d_out})")
    else:
        raise ValueError(f"unknown channel kind {kind!r}")
    if "label" in spec:
        c = Channel(c.d_in, c.d_out, c.choi, label=str(spec["label"]))
    return c


def channel_to_spec(c: Channel) -> dict:
    entries = [_complex_to_pair(z) for z in c.choi.reshape(-1)]
    return {
        "kind": "choi",
        "d_in": c.d_in,
        "d_out": c.d_out,
        "entries": entries,
        "label": c.label,
    }


def povm_from_spec(spec: dict) -> Povm:
    """Build a POVM from ``{"kind": "povm", "d": 2, "effects": [matrix, ...]}``."""
    if not isinstance(spec, dict) or spec.get("kind") != "povm":
        raise ValueError("povm spec must be an object with kind 'povm'")
    d = int(spec["d"])
    effects = tuple(_matrix_from_pairs(rows) for rows in spec["effects"])
    return Povm(d, effects)
