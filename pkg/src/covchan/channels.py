"""Density matrices, Kraus sets, and the Choi-matrix channel-equality oracle.

A channel is represented by an ordered set of Kraus operators acting as
``rho -> sum_A K_A rho K_A^dagger``. Two sets describe the same channel
exactly when their Choi matrices coincide, which turns a universally
quantified statement over all input states into one finite matrix
comparison. The Choi matrix here is ``sum_A vec(K_A) vec(K_A)^dagger``
with the column-stacking ``vec`` (Fortran order); that convention is part
of the serialization contract and must not drift.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass

import numpy as np

from .linalg import (
    as_cmatrix,
    dagger,
    frobenius_distance,
    random_unitary,
)

__all__ = [
    "CHANNEL_EQUALITY_TOL",
    "COMPLETENESS_TOL",
    "HERMITICITY_TOL",
    "PSD_TOL",
    "TRACE_TOL",
    "ChoiMatrix",
    "DensityMatrix",
    "KrausSet",
    "apply_channel",
    "apply_kraus",
    "apply_to_matrix_units",
    "channels_equal",
    "choi_distance",
    "choi_matrix",
    "completeness_defect",
    "kraus_gram",
    "matrix_units",
    "random_kraus_set",
    "vec",
]

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
COMPLETENESS_TOL = 1e-9
CHANNEL_EQUALITY_TOL = 1e-9


def vec(m: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization: stacks columns top to bottom."""
    return np.asarray(m).reshape(-1, order="F")


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive-semidefinite, unit-trace complex matrix.

    Validation runs at construction; tolerance knobs exist because channel
    outputs accumulate slightly more floating dust than hand-written
    fixtures (see :func:`apply_channel`).
    """

    mat: np.ndarray
    herm_tol: InitVar[float] = HERMITICITY_TOL
    trace_tol: InitVar[float] = TRACE_TOL
    psd_tol: InitVar[float] = PSD_TOL

    def __post_init__(self, herm_tol: float, trace_tol: float, psd_tol: float):
        mat = as_cmatrix(self.mat, name="density matrix")
        if mat.shape[0] != mat.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {mat.shape}")
        herm = frobenius_distance(mat, dagger(mat))
        if herm > herm_tol:
            raise ValueError(f"density matrix is not Hermitian: defect {herm:.3e}")
        tr = np.trace(mat)
        if abs(tr - 1.0) > trace_tol:
            raise ValueError(f"density matrix trace {tr:.12g} is not 1")
        lo = float(np.linalg.eigvalsh(mat).min())
        if lo < -psd_tol:
            raise ValueError(
                f"density matrix has negative eigenvalue {lo:.3e}"
            )
        object.__setattr__(self, "mat", mat)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @classmethod
    def from_state_vector(cls, psi) -> "DensityMatrix":
        """Pure state |psi><psi| / <psi|psi> for any nonzero vector."""
        v = np.asarray(psi, dtype=np.complex128).reshape(-1)
        norm = np.linalg.norm(v)
        if norm == 0.0 or not np.all(np.isfinite(v)):
            raise ValueError("state vector must be nonzero and finite")
        v = v / norm
        return cls(np.outer(v, v.conj()))


@dataclass(frozen=True, eq=False)
class KrausSet:
    """Ordered list of same-dimension complex square operators.

    ``rank`` is the number of operators; the index runs over measurement
    branches or environment basis labels, flattened to a single subscript.
    ``trace_preserving=False`` admits selective-measurement branch subsets,
    which deliberately fail completeness; the completeness invariant is
    enforced only when the flag is set.
    """

    ops: tuple
    trace_preserving: bool = True
    completeness_tol: InitVar[float] = COMPLETENESS_TOL

    def __post_init__(self, completeness_tol: float):
        ops = tuple(
            as_cmatrix(op, name=f"Kraus operator {i}")
            for i, op in enumerate(self.ops)
        )
        if not ops:
            raise ValueError("a Kraus set needs at least one operator")
        d = ops[0].shape[0]
        for i, op in enumerate(ops):
            if op.shape != (d, d):
                raise ValueError(
                    f"Kraus operator {i} has shape {op.shape}, expected ({d}, {d})"
                )
        object.__setattr__(self, "ops", ops)
        if self.trace_preserving:
            defect = completeness_defect(self)
            if defect > completeness_tol:
                raise ValueError(
                    f"completeness defect {defect:.3e} exceeds "
                    f"{completeness_tol:.1e}; sum of K^dagger K is not the identity"
                )

    @property
    def dim(self) -> int:
        return self.ops[0].shape[0]

    @property
    def rank(self) -> int:
        return len(self.ops)


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    """Canonical d^2 x d^2 channel representative; the equality oracle."""

    mat: np.ndarray
    dim: int

    def __post_init__(self):
        mat = as_cmatrix(self.mat, name="Choi matrix")
        d2 = self.dim * self.dim
        if mat.shape != (d2, d2):
            raise ValueError(
                f"Choi matrix for dim {self.dim} must be {d2}x{d2}, got {mat.shape}"
            )
        herm = frobenius_distance(mat, dagger(mat))
        if herm > HERMITICITY_TOL:
            raise ValueError(f"Choi matrix is not Hermitian: defect {herm:.3e}")
        object.__setattr__(self, "mat", mat)


def apply_kraus(ops, mat: np.ndarray) -> np.ndarray:
    """Raw operator-sum action ``sum_A K_A M K_A^dagger`` on any matrix.

    No completeness, trace, or Hermiticity requirements; used for selective
    branches and for probing the channel on non-Hermitian basis elements.
    """
    mat = np.asarray(mat)
    d = mat.shape[0]
    out = np.zeros((d, d), dtype=np.complex128)
    for op in ops:
        if op.shape[1] != d:
            raise ValueError(
                f"operator shape {op.shape} does not act on dim {d}"
            )
        out += op @ mat @ dagger(op)
    return out


def apply_channel(k: KrausSet, rho: DensityMatrix) -> DensityMatrix:
    """Evolve a state through a trace-preserving channel.

    Validation slack on the output scales with the set's completeness
    defect: a defect of eps can move the trace by about eps, which is
    legitimately above the constructor's default tolerance.
    """
    if not k.trace_preserving:
        raise ValueError(
            "apply_channel needs a trace-preserving set; "
            "use apply_kraus for selective branches"
        )
    if k.dim != rho.dim:
        raise ValueError(f"dimension mismatch: channel {k.dim} vs state {rho.dim}")
    out = apply_kraus(k.ops, rho.mat)
    out = 0.5 * (out + dagger(out))
    slack = 2.0 * completeness_defect(k)
    return DensityMatrix(
        out,
        trace_tol=max(TRACE_TOL, slack),
        psd_tol=max(PSD_TOL, slack),
    )


def completeness_defect(k: KrausSet) -> float:
    """``|| sum_A K_A^dagger K_A - I ||_F``; zero iff trace-preserving."""
    acc = np.zeros((k.dim, k.dim), dtype=np.complex128)
    for op in k.ops:
        acc += dagger(op) @ op
    return frobenius_distance(acc, np.eye(k.dim))


def choi_matrix(k: KrausSet) -> ChoiMatrix:
    """``sum_A vec(K_A) vec(K_A)^dagger`` with column-stacking vec."""
    d = k.dim
    c = np.zeros((d * d, d * d), dtype=np.complex128)
    for op in k.ops:
        v = vec(op)
        c += np.outer(v, v.conj())
    c = 0.5 * (c + dagger(c))
    return ChoiMatrix(c, d)


def choi_distance(k: KrausSet, l: KrausSet) -> float:
    """Frobenius distance between Choi matrices; a metric on channels."""
    if k.dim != l.dim:
        raise ValueError(f"dimension mismatch: {k.dim} vs {l.dim}")
    return frobenius_distance(choi_matrix(k).mat, choi_matrix(l).mat)


def channels_equal(k: KrausSet, l: KrausSet, tol: float = CHANNEL_EQUALITY_TOL) -> bool:
    """Whether two Kraus sets define the same map on every input state.

    Decided through the Choi matrices, which is complete: no sampling of
    input states is involved, and sets of different rank compare fine.
    """
    return choi_distance(k, l) <= tol


def matrix_units(d: int) -> list:
    """The d^2 matrix units E_ij in row-major (i, j) order."""
    units = []
    for i in range(d):
        for j in range(d):
            e = np.zeros((d, d), dtype=np.complex128)
            e[i, j] = 1.0
            units.append(e)
    return units


def apply_to_matrix_units(k: KrausSet) -> list:
    """Channel action on every matrix unit, row-major order.

    By linearity this list determines the channel completely, so it serves
    as an independent brute-force cross-check of the Choi oracle.
    """
    return [apply_kraus(k.ops, e) for e in matrix_units(k.dim)]


def kraus_gram(ops) -> np.ndarray:
    """Hilbert-Schmidt Gram matrix ``G[a, b] = Tr(K_a^dagger K_b)``."""
    n = len(ops)
    g = np.zeros((n, n), dtype=np.complex128)
    for a in range(n):
        for b in range(a, n):
            g[a, b] = np.trace(dagger(ops[a]) @ ops[b])
            g[b, a] = np.conj(g[a, b])
    return g


def random_kraus_set(dim: int, rank: int, seed) -> KrausSet:
    """Haar-random trace-preserving channel with the requested rank.

    Built from a Haar unitary on a space of dimension ``rank * dim`` by
    slicing stacked d x d blocks of its first d columns; the unitarity of
    the big matrix makes the completeness sum the identity exactly up to
    QR roundoff.
    """
    if dim < 1 or rank < 1:
        raise ValueError("dim and rank must be >= 1")
    u = random_unitary(rank * dim, seed)
    ops = [u[a * dim : (a + 1) * dim, :dim] for a in range(rank)]
    return KrausSet(ops)
