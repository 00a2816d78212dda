"""Frame transforms, compatibility residuals, and the solution family.

The physical question: an observer in frame S describes an evolution with
Kraus set {K_A}; an observer in frame S' uses {L'_A}. States transform
covariantly, ``rho' = Lam rho Lam^dagger``. The two accounts are compatible
when the pulled-back S' channel equals the S channel on every state, which
the Choi oracle decides exactly. Compatibility does NOT force operator
covariance ``L'_A = Lam K_A Lam^dagger`` once the set has more than one
element: mixing the covariant solution by any unitary gives a continuum of
equally compatible sets. With a single element the freedom collapses to a
global phase, and this module both checks that rigidity directly and hunts
for counterexamples numerically.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import InitVar, dataclass

import numpy as np

from .channels import (
    CHANNEL_EQUALITY_TOL,
    COMPLETENESS_TOL,
    PSD_TOL,
    TRACE_TOL,
    DensityMatrix,
    KrausSet,
    channels_equal,
    choi_matrix,
    completeness_defect,
    kraus_gram,
    vec,
)
from .linalg import (
    as_cmatrix,
    dagger,
    frobenius_distance,
    random_unitary,
    spawn_rng,
    unitarity_defect,
)

__all__ = [
    "GRAM_MIN_EIGENVALUE",
    "PHASE_DISTANCE_FLOOR",
    "UNITARY_TOL",
    "CovarianceReport",
    "FrameTransform",
    "MixingUnitary",
    "N1CheckResult",
    "N1SearchReport",
    "N1Violation",
    "PhaseEquivalence",
    "Verdict",
    "analyze",
    "compatibility_residual",
    "conjugate_kraus",
    "covariant_distance",
    "extract_mixing",
    "make_noncovariant_solution",
    "mix_kraus",
    "n1_covariance_search",
    "n1_uniqueness_check",
    "phase_aligned_distance",
    "phase_permutation_distance",
    "transform_state",
]

UNITARY_TOL = 1e-10

# Below this smallest Gram eigenvalue the mixing reconstruction's linear
# solve is unreliable at double precision.
GRAM_MIN_EIGENVALUE = 1e-8

# A candidate closer than this to the covariant solution (after optimal
# phase alignment) counts as trivially covariant in searches and sweeps.
PHASE_DISTANCE_FLOOR = 1e-6


@dataclass(frozen=True, eq=False)
class FrameTransform:
    """Unitary implementing the change of frame on states and operators."""

    mat: np.ndarray
    unitarity_tol: InitVar[float] = UNITARY_TOL

    def __post_init__(self, unitarity_tol: float):
        mat = as_cmatrix(self.mat, name="frame transform")
        if mat.shape[0] != mat.shape[1]:
            raise ValueError(f"frame transform must be square, got {mat.shape}")
        defect = unitarity_defect(mat)
        if defect > unitarity_tol:
            raise ValueError(f"frame transform is not unitary: defect {defect:.3e}")
        object.__setattr__(self, "mat", mat)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def inverse(self) -> "FrameTransform":
        return FrameTransform(dagger(self.mat))


@dataclass(frozen=True, eq=False)
class MixingUnitary:
    """N x N unitary reshuffling Kraus elements without changing the channel."""

    mat: np.ndarray
    unitarity_tol: InitVar[float] = UNITARY_TOL

    def __post_init__(self, unitarity_tol: float):
        mat = as_cmatrix(self.mat, name="mixing unitary")
        if mat.shape[0] != mat.shape[1]:
            raise ValueError(f"mixing unitary must be square, got {mat.shape}")
        defect = unitarity_defect(mat)
        if defect > unitarity_tol:
            raise ValueError(f"mixing unitary is not unitary: defect {defect:.3e}")
        object.__setattr__(self, "mat", mat)

    @property
    def rank(self) -> int:
        return self.mat.shape[0]


class Verdict(enum.Enum):
    """Trichotomy for a two-frame pair of Kraus sets."""

    COVARIANT = "COVARIANT"
    NONCOVARIANT_COMPATIBLE = "NONCOVARIANT_COMPATIBLE"
    INCOMPATIBLE = "INCOMPATIBLE"


@dataclass(frozen=True)
class CovarianceReport:
    """Outcome of comparing frame-S and frame-S' channel descriptions.

    residual: Choi distance between the S channel and the pulled-back S'
        channel; zero means the two frames describe the same physical map.
    covariant_distance: worst per-operator distance from the element-wise
        conjugated set, raw (no phase alignment); infinity when the ranks
        differ so no pairing exists.
    """

    residual: float
    covariant_distance: float
    rank: int
    dim: int
    tol: float
    verdict: Verdict


def transform_state(rho: DensityMatrix, f: FrameTransform) -> DensityMatrix:
    """Covariant state map ``rho -> Lam rho Lam^dagger``; spectrum-preserving."""
    if rho.dim != f.dim:
        raise ValueError(f"dimension mismatch: state {rho.dim} vs frame {f.dim}")
    out = f.mat @ rho.mat @ dagger(f.mat)
    out = 0.5 * (out + dagger(out))
    slack = 2.0 * unitarity_defect(f.mat)
    return DensityMatrix(
        out, trace_tol=max(TRACE_TOL, slack), psd_tol=max(PSD_TOL, slack)
    )


def conjugate_kraus(k: KrausSet, f: FrameTransform) -> KrausSet:
    """Element-wise ``Lam K_A Lam^dagger``: the covariant solution.

    Always compatible with ``k`` across the frame change, whatever the
    rank. Preserves order, rank, and the completeness defect.
    """
    if k.dim != f.dim:
        raise ValueError(f"dimension mismatch: set {k.dim} vs frame {f.dim}")
    lam = f.mat
    lam_dag = dagger(lam)
    ops = [lam @ op @ lam_dag for op in k.ops]
    tol = max(COMPLETENESS_TOL, completeness_defect(k) + 1e-10)
    return KrausSet(
        ops, trace_preserving=k.trace_preserving, completeness_tol=tol
    )


def compatibility_residual(k: KrausSet, lprime: KrausSet, f: FrameTransform) -> float:
    """How far the two frame accounts are from describing the same map.

    Pulls the S' set back through the inverse frame and takes the Choi
    distance to the S set. Zero (within tolerance) exactly when
    ``sum_A K_A rho K_A^dagger`` and the back-transformed
    ``sum_A Lam^dagger L'_A Lam rho Lam^dagger L'_A^dagger Lam`` agree for
    every state, with no sampling involved.
    """
    if not (k.dim == lprime.dim == f.dim):
        raise ValueError(
            f"dimension mismatch: {k.dim}, {lprime.dim}, frame {f.dim}"
        )
    pulled_back = conjugate_kraus(lprime, f.inverse())
    return frobenius_distance(choi_matrix(k).mat, choi_matrix(pulled_back).mat)


def mix_kraus(k: KrausSet, v: MixingUnitary) -> KrausSet:
    """``L_A = sum_B V_AB K_B``: same channel for every unitary V.

    This is the whole unitary-freedom family; the channel, the completeness
    sum, and hence all statistics are untouched.
    """
    if v.rank != k.rank:
        raise ValueError(f"rank mismatch: mixing {v.rank} vs set {k.rank}")
    stacked = np.stack(k.ops)
    mixed = np.einsum("ab,bij->aij", v.mat, stacked)
    tol = max(COMPLETENESS_TOL, completeness_defect(k) + 1e-10)
    return KrausSet(
        list(mixed), trace_preserving=k.trace_preserving, completeness_tol=tol
    )


def make_noncovariant_solution(
    k: KrausSet, f: FrameTransform, v: MixingUnitary
) -> KrausSet:
    """A frame-S' set that is fully compatible yet not operator-covariant.

    Mixes the covariant solution by ``v``. The residual is zero by
    construction for any unitary ``v``; the per-operator covariant distance
    is strictly positive whenever ``v`` is not phase-times-permutation and
    the operators are linearly independent.
    """
    return mix_kraus(conjugate_kraus(k, f), v)


def covariant_distance(k: KrausSet, lprime: KrausSet, f: FrameTransform) -> float:
    """``max_A || L'_A - Lam K_A Lam^dagger ||_F``; inf on rank mismatch."""
    if k.dim != lprime.dim or k.dim != f.dim:
        raise ValueError(
            f"dimension mismatch: {k.dim}, {lprime.dim}, frame {f.dim}"
        )
    if k.rank != lprime.rank:
        return math.inf
    reference = conjugate_kraus(k, f)
    return max(
        frobenius_distance(a, b) for a, b in zip(lprime.ops, reference.ops)
    )


def analyze(
    k: KrausSet,
    lprime: KrausSet,
    f: FrameTransform,
    tol: float = CHANNEL_EQUALITY_TOL,
) -> CovarianceReport:
    """Classify a two-frame pair: covariant, compatible, or incompatible."""
    residual = compatibility_residual(k, lprime, f)
    distance = covariant_distance(k, lprime, f)
    if residual > tol:
        verdict = Verdict.INCOMPATIBLE
    elif distance <= tol:
        verdict = Verdict.COVARIANT
    else:
        verdict = Verdict.NONCOVARIANT_COMPATIBLE
    return CovarianceReport(
        residual=residual,
        covariant_distance=distance,
        rank=k.rank,
        dim=k.dim,
        tol=tol,
        verdict=verdict,
    )


class PhaseEquivalence(enum.Enum):
    EQUAL_UP_TO_PHASE = "EQUAL_UP_TO_PHASE"
    DIFFERENT = "DIFFERENT"


@dataclass(frozen=True)
class N1CheckResult:
    """Single-operator comparison: equal up to a global phase, or a witness.

    phase: the aligning unit scalar c (only when equal up to phase).
    distance: ``min_c || L - c K ||_F`` over unit-modulus c.
    witness / witness_distance: a state whose images under the two maps
    differ by more than the tolerance (only when DIFFERENT).
    """

    verdict: PhaseEquivalence
    distance: float
    phase: complex | None = None
    witness: DensityMatrix | None = None
    witness_distance: float | None = None


def phase_aligned_distance(k1: np.ndarray, l1: np.ndarray):
    """``(min_c ||l1 - c k1||_F, best c)`` over unit-modulus scalars c.

    The optimum is the phase of ``Tr(k1^dagger l1)``; for orthogonal inputs
    every phase ties and c defaults to 1.
    """
    t = complex(np.trace(dagger(k1) @ l1))
    c = t / abs(t) if abs(t) > 0.0 else 1.0 + 0.0j
    return frobenius_distance(l1, c * k1), c


def _witness_states(d: int):
    # d^2 pure states spanning the Hermitian matrices: basis states plus
    # two superpositions per pair. Complete by linearity, so two unitary
    # conjugations that agree on all of them are the same channel.
    states = []
    eye = np.eye(d, dtype=np.complex128)
    for i in range(d):
        states.append(eye[i])
    for i in range(d):
        for j in range(i + 1, d):
            states.append((eye[i] + eye[j]) / np.sqrt(2.0))
            states.append((eye[i] + 1j * eye[j]) / np.sqrt(2.0))
    return states


def _check_single_op_unitary(mat: np.ndarray, name: str, tol: float) -> None:
    defect = unitarity_defect(mat)
    if defect > tol:
        raise ValueError(
            f"{name} fails the completeness condition for a single-operator "
            f"set: ||K^dagger K - I||_F = {defect:.3e} exceeds {tol:.1e}"
        )


def n1_uniqueness_check(k1, l1, tol: float = CHANNEL_EQUALITY_TOL) -> N1CheckResult:
    """Test single-operator rigidity: the sets agree only if L1 = c K1.

    For one-element trace-preserving sets the operators are unitary and the
    usual mixing freedom degenerates to a global phase, so the channels
    coincide exactly when the operators match up to that phase. When they
    do not, a witness state with visibly different images is produced by
    scanning the spanning family of pure states (complete by linearity).
    """
    k1 = as_cmatrix(k1, name="K1")
    l1 = as_cmatrix(l1, name="L1")
    if k1.shape != l1.shape or k1.shape[0] != k1.shape[1]:
        raise ValueError(f"operators must be square and same shape: {k1.shape} vs {l1.shape}")
    gate = max(tol, 1e-12)
    _check_single_op_unitary(k1, "K1", gate)
    _check_single_op_unitary(l1, "L1", gate)

    distance, phase = phase_aligned_distance(k1, l1)
    if distance <= tol:
        return N1CheckResult(
            verdict=PhaseEquivalence.EQUAL_UP_TO_PHASE,
            distance=distance,
            phase=phase,
        )

    best_state = None
    best_dist = -1.0
    for psi in _witness_states(k1.shape[0]):
        rho = np.outer(psi, psi.conj())
        img_k = k1 @ rho @ dagger(k1)
        img_l = l1 @ rho @ dagger(l1)
        dist = frobenius_distance(img_k, img_l)
        if dist > best_dist:
            best_dist = dist
            best_state = rho
    witness = DensityMatrix(0.5 * (best_state + dagger(best_state)))
    return N1CheckResult(
        verdict=PhaseEquivalence.DIFFERENT,
        distance=distance,
        witness=witness,
        witness_distance=best_dist,
    )


@dataclass(frozen=True)
class N1Violation:
    """A search candidate that would falsify single-operator rigidity."""

    residual: float
    phase_distance: float
    candidate: np.ndarray


@dataclass(frozen=True)
class N1SearchReport:
    """Outcome of hunting for a compatible-but-noncovariant single operator.

    min_residual is the smallest compatibility residual seen among
    candidates kept away from the covariant solution (phase distance above
    the floor); infinity when no candidate cleared the floor, as happens
    for scalars where every unitary is a phase.
    """

    dim: int
    trials: int
    tol: float
    distance_floor: float
    examined: int
    min_residual: float
    best_phase_distance: float | None
    best_candidate: np.ndarray | None
    violations: tuple

    @property
    def violation_count(self) -> int:
        return len(self.violations)


def _hermitian_basis(d: int):
    basis = []
    for i in range(d):
        g = np.zeros((d, d), dtype=np.complex128)
        g[i, i] = 1.0
        basis.append(g)
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    for i in range(d):
        for j in range(i + 1, d):
            g = np.zeros((d, d), dtype=np.complex128)
            g[i, j] = inv_sqrt2
            g[j, i] = inv_sqrt2
            basis.append(g)
            g = np.zeros((d, d), dtype=np.complex128)
            g[i, j] = -1j * inv_sqrt2
            g[j, i] = 1j * inv_sqrt2
            basis.append(g)
    return basis


def _rank1_choi_residual(target: np.ndarray, cand: np.ndarray) -> float:
    vt = vec(target)
    vc = vec(cand)
    return frobenius_distance(np.outer(vt, vt.conj()), np.outer(vc, vc.conj()))


def n1_covariance_search(
    k1,
    f: FrameTransform,
    trials: int,
    seed: int,
    tol: float = CHANNEL_EQUALITY_TOL,
    distance_floor: float = PHASE_DISTANCE_FLOOR,
    restarts: int = 3,
) -> N1SearchReport:
    """Search for a single-operator counterexample to covariance rigidity.

    Samples random unitary candidates for the frame-S' operator and then
    runs a gradient-free descent on the unitary group (one step per
    Hermitian generator direction, shrinking step size, several restarts),
    minimizing the compatibility residual while staying at least
    ``distance_floor`` away from the covariant solution in phase-aligned
    distance. Rigidity predicts the constrained minimum stays orders of
    magnitude above ``tol``; any candidate below it is recorded as a
    violation (which would indict this implementation, not the math).

    Deterministic in (inputs, trials, seed); candidates are evaluated in a
    fixed order and streams are keyed per trial index.
    """
    k1 = as_cmatrix(k1, name="K1")
    if k1.shape[0] != k1.shape[1]:
        raise ValueError(f"K1 must be square, got {k1.shape}")
    if k1.shape[0] != f.dim:
        raise ValueError(f"dimension mismatch: K1 {k1.shape[0]} vs frame {f.dim}")
    if trials < 0:
        raise ValueError("trials must be >= 0")
    _check_single_op_unitary(k1, "K1", max(tol, 1e-9))

    d = f.dim
    target = f.mat @ k1 @ dagger(f.mat)

    min_residual = math.inf
    best_phase_distance = None
    best_candidate = None
    violations = []
    examined = 0

    def consider(cand: np.ndarray):
        nonlocal min_residual, best_phase_distance, best_candidate, examined
        examined += 1
        phase_dist, _ = phase_aligned_distance(target, cand)
        if phase_dist <= distance_floor:
            return math.inf
        residual = _rank1_choi_residual(target, cand)
        if residual < min_residual:
            min_residual = residual
            best_phase_distance = phase_dist
            best_candidate = cand
        if residual <= tol:
            violations.append(
                N1Violation(
                    residual=residual, phase_distance=phase_dist, candidate=cand
                )
            )
        return residual

    for i in range(trials):
        consider(random_unitary(d, spawn_rng(seed, 0, i)))

    generators = [np.linalg.eigh(g) for g in _hermitian_basis(d)]
    for r in range(restarts):
        u = random_unitary(d, spawn_rng(seed, 1, r))
        best = consider(u)
        step = 0.5
        while step > 1e-7:
            improved = False
            for w, gvecs in generators:
                for sign in (1.0, -1.0):
                    rot = (gvecs * np.exp(1j * sign * step * w)) @ dagger(gvecs)
                    cand = rot @ u
                    res = consider(cand)
                    if res < best - 1e-15:
                        best = res
                        u = cand
                        improved = True
            if not improved:
                step *= 0.5

    return N1SearchReport(
        dim=d,
        trials=trials,
        tol=tol,
        distance_floor=distance_floor,
        examined=examined,
        min_residual=min_residual,
        best_phase_distance=best_phase_distance,
        best_candidate=best_candidate,
        violations=tuple(violations),
    )


def phase_permutation_distance(v: MixingUnitary) -> float:
    """Distance from the trivial mixings: phase matrices times permutations.

    ``min over diagonal-phase D and permutation P of || V - D P ||_F``,
    which reduces to an assignment problem over row-column pairings solved
    exactly by enumeration (ranks here are small).
    """
    m = np.abs(v.mat)
    n = m.shape[0]
    if n > 8:
        raise ValueError("permutation enumeration is limited to rank <= 8")
    best = max(
        sum(m[a, sigma[a]] for a in range(n))
        for sigma in itertools.permutations(range(n))
    )
    return math.sqrt(max(0.0, 2.0 * (n - best)))


def extract_mixing(
    k: KrausSet, l: KrausSet, tol: float = CHANNEL_EQUALITY_TOL
) -> MixingUnitary | None:
    """Recover the unitary V with ``L_A = sum_B V_AB K_B``, if one exists.

    Solves the Hilbert-Schmidt linear system: overlaps of L against K
    tested against the Gram matrix of K. Returns None when the Gram matrix
    is singular beyond tolerance (linearly dependent Kraus elements) or
    when the solved V fails verification, so a returned V is always
    correct: unitary within ``tol`` and reconstructing every operator
    within ``tol * rank``.
    """
    if k.rank != l.rank:
        raise ValueError(f"rank mismatch: {k.rank} vs {l.rank}")
    if k.dim != l.dim:
        raise ValueError(f"dimension mismatch: {k.dim} vs {l.dim}")
    if not channels_equal(k, l, tol):
        raise ValueError(
            "the sets define different channels; no mixing unitary can relate them"
        )
    n = k.rank
    gram = kraus_gram(k.ops)
    if float(np.linalg.eigvalsh(gram).min()) <= GRAM_MIN_EIGENVALUE:
        return None

    # overlaps[a, c] = Tr(K_c^dagger L_a) = sum_b V[a, b] gram[c, b]
    overlaps = np.zeros((n, n), dtype=np.complex128)
    for a in range(n):
        for c in range(n):
            overlaps[a, c] = np.trace(dagger(k.ops[c]) @ l.ops[a])
    v = np.linalg.solve(gram, overlaps.T).T

    if unitarity_defect(v) > tol:
        return None
    limit = tol * n
    for a in range(n):
        rebuilt = sum(v[a, b] * k.ops[b] for b in range(n))
        if frobenius_distance(l.ops[a], rebuilt) > limit:
            return None
    return MixingUnitary(v, unitarity_tol=tol)
