"""Two-frame runs of sequential interventions on a bipartite state.

One observer evolves the state through a list of selective measurements;
a second observer, related by a unitary frame change, runs the same story
with frame-local operator choices. The runner records branch statistics
and endpoint states in both accounts and measures how far they are from
covariant agreement. Outcome statistics and the non-selective endpoint
must agree whenever the second observer's sets come from the compatible
family; the individual post-branch states may legitimately differ, which
is exactly the representation freedom under study, so they are reported
but never folded into the defect.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .channels import (
    CHANNEL_EQUALITY_TOL,
    COMPLETENESS_TOL,
    DensityMatrix,
    KrausSet,
    apply_kraus,
    completeness_defect,
)
from .covariance import (
    FrameTransform,
    MixingUnitary,
    Verdict,
    conjugate_kraus,
    mix_kraus,
    transform_state,
)
from .linalg import dagger, frobenius_distance

__all__ = [
    "NULL_BRANCH_PROB",
    "BranchRecord",
    "Intervention",
    "InterventionRecord",
    "ScenarioConfig",
    "ScenarioResult",
    "Target",
    "embed_local",
    "run_scenario",
]

# Branches at or below this probability are reported as null rather than
# renormalized; dividing by anything smaller is numerically meaningless.
NULL_BRANCH_PROB = 1e-12

_MAX_BRANCHES = 65536


class Target(enum.Enum):
    """Which tensor factor an intervention acts on."""

    SUBSYSTEM_A = "A"
    SUBSYSTEM_B = "B"
    JOINT = "JOINT"


@dataclass(frozen=True)
class Intervention:
    """One measurement step: each Kraus operator is one outcome branch.

    The set as a whole must be trace-preserving (the branches partition
    completeness). The frame-S' account uses the covariant conjugation by
    default; ``mixing`` swaps in a mixed member of the compatible family,
    and ``sprime_kraus`` overrides the S' operators outright (same local
    space as ``kraus``), which is how deliberately incompatible choices
    are injected.
    """

    label: str
    kraus: KrausSet
    target: Target
    mixing: MixingUnitary | None = None
    sprime_kraus: KrausSet | None = None

    def __post_init__(self):
        if not self.kraus.trace_preserving:
            raise ValueError(
                f"intervention {self.label!r}: branches must jointly form a "
                "trace-preserving set"
            )
        if self.mixing is not None and self.sprime_kraus is not None:
            raise ValueError(
                f"intervention {self.label!r}: give a mixing unitary or an "
                "explicit frame-S' set, not both"
            )
        if self.mixing is not None and self.mixing.rank != self.kraus.rank:
            raise ValueError(
                f"intervention {self.label!r}: mixing rank {self.mixing.rank} "
                f"does not match branch count {self.kraus.rank}"
            )
        if self.sprime_kraus is not None:
            if self.sprime_kraus.dim != self.kraus.dim:
                raise ValueError(
                    f"intervention {self.label!r}: frame-S' set dimension "
                    f"{self.sprime_kraus.dim} does not match {self.kraus.dim}"
                )
            if self.sprime_kraus.rank != self.kraus.rank:
                raise ValueError(
                    f"intervention {self.label!r}: frame-S' set has "
                    f"{self.sprime_kraus.rank} branches, expected {self.kraus.rank}"
                )


@dataclass(frozen=True)
class ScenarioConfig:
    """A bipartite initial state, a frame change, and an intervention list."""

    initial_state: DensityMatrix
    dim_a: int
    dim_b: int
    frame: FrameTransform
    interventions: tuple
    tol: float = CHANNEL_EQUALITY_TOL

    def __post_init__(self):
        if self.dim_a < 1 or self.dim_b < 1:
            raise ValueError("subsystem dimensions must be >= 1")
        d = self.dim_a * self.dim_b
        if self.initial_state.dim != d:
            raise ValueError(
                f"initial state dim {self.initial_state.dim} is not "
                f"dim_a * dim_b = {d}"
            )
        if self.frame.dim != d:
            raise ValueError(f"frame dim {self.frame.dim} is not {d}")
        object.__setattr__(self, "interventions", tuple(self.interventions))
        for iv in self.interventions:
            expected = {
                Target.SUBSYSTEM_A: self.dim_a,
                Target.SUBSYSTEM_B: self.dim_b,
                Target.JOINT: d,
            }[iv.target]
            if iv.kraus.dim != expected:
                raise ValueError(
                    f"intervention {iv.label!r} acts on dim {iv.kraus.dim}, "
                    f"target {iv.target.value} needs dim {expected}"
                )


@dataclass(frozen=True)
class InterventionRecord:
    """Marginal branch probabilities for one intervention, both frames."""

    label: str
    target: Target
    probabilities_s: tuple
    probabilities_sprime: tuple
    probability_defect: float


@dataclass(frozen=True)
class BranchRecord:
    """One leaf of the outcome tree: a full outcome sequence.

    States are renormalized post-measurement states; ``None`` marks a null
    branch (probability at or below the null threshold in that frame).
    """

    sequence: tuple
    probability_s: float
    probability_sprime: float
    state_s: DensityMatrix | None
    state_sprime: DensityMatrix | None


@dataclass(frozen=True)
class ScenarioResult:
    """Both frame accounts of a scenario plus their disagreement measures.

    covariance_defect is the largest of every branch-probability mismatch
    (marginal and joint) and the endpoint-state mismatch
    ``|| rho'_f - Lam rho_f Lam^dagger ||_F``. representation_distance is
    the worst per-operator distance of the S' sets from the covariant
    conjugates, infinite when an override changed the pairing structure.
    """

    dim_a: int
    dim_b: int
    interventions: tuple
    branches: tuple
    final_state_s: DensityMatrix
    final_state_sprime: DensityMatrix
    probability_defect: float
    state_defect: float
    covariance_defect: float
    representation_distance: float
    tol: float
    verdict: Verdict


def embed_local(k: KrausSet, target: Target, dim_a: int, dim_b: int) -> KrausSet:
    """Lift a local Kraus set to the joint space, identity on the rest."""
    d = dim_a * dim_b
    if target is Target.JOINT:
        if k.dim != d:
            raise ValueError(f"joint set has dim {k.dim}, expected {d}")
        return k
    if target is Target.SUBSYSTEM_A:
        if k.dim != dim_a:
            raise ValueError(f"set dim {k.dim} does not match subsystem A ({dim_a})")
        eye = np.eye(dim_b)
        ops = [np.kron(op, eye) for op in k.ops]
        scale = math.sqrt(dim_b)
    else:
        if k.dim != dim_b:
            raise ValueError(f"set dim {k.dim} does not match subsystem B ({dim_b})")
        eye = np.eye(dim_a)
        ops = [np.kron(eye, op) for op in k.ops]
        scale = math.sqrt(dim_a)
    # the identity factor multiplies the completeness defect by sqrt(dim)
    tol = max(COMPLETENESS_TOL, scale * completeness_defect(k) + 1e-10)
    return KrausSet(ops, trace_preserving=k.trace_preserving, completeness_tol=tol)


def _sprime_set(
    iv: Intervention, k_joint: KrausSet, cfg: ScenarioConfig
) -> KrausSet:
    if iv.sprime_kraus is not None:
        return embed_local(iv.sprime_kraus, iv.target, cfg.dim_a, cfg.dim_b)
    covariant = conjugate_kraus(k_joint, cfg.frame)
    if iv.mixing is not None:
        return mix_kraus(covariant, iv.mixing)
    return covariant


def _branch_probabilities(ops, mat: np.ndarray) -> tuple:
    return tuple(
        float(np.trace(op @ mat @ dagger(op)).real) for op in ops
    )


def _renormalized(mat: np.ndarray, prob: float) -> DensityMatrix | None:
    if prob <= NULL_BRANCH_PROB:
        return None
    state = mat / prob
    state = 0.5 * (state + dagger(state))
    # cancellation in low-probability branches leaves more dust than the
    # default constructor tolerances admit
    return DensityMatrix(state, herm_tol=1e-8, trace_tol=1e-8, psd_tol=1e-8)


def run_scenario(cfg: ScenarioConfig) -> ScenarioResult:
    """Run both frame accounts and measure their covariant agreement.

    Frame S starts from the initial state; frame S' starts from its
    covariant transform and evolves through the per-intervention S' sets.
    Marginal branch probabilities at each intervention are taken on the
    non-selective state (by linearity these equal the true marginals), and
    the full outcome tree is tracked for joint statistics and post-branch
    states.
    """
    lam = cfg.frame.mat
    rho = cfg.initial_state.mat
    sigma = transform_state(cfg.initial_state, cfg.frame).mat

    records = []
    leaves = [((), rho, sigma)]
    representation_distance = 0.0

    for iv in cfg.interventions:
        k_joint = embed_local(iv.kraus, iv.target, cfg.dim_a, cfg.dim_b)
        l_joint = _sprime_set(iv, k_joint, cfg)

        covariant = conjugate_kraus(k_joint, cfg.frame)
        if l_joint.rank == covariant.rank:
            rep = max(
                frobenius_distance(a, b)
                for a, b in zip(l_joint.ops, covariant.ops)
            )
        else:
            rep = math.inf
        representation_distance = max(representation_distance, rep)

        probs_s = _branch_probabilities(k_joint.ops, rho)
        probs_sp = _branch_probabilities(l_joint.ops, sigma)
        defect = max(abs(p - q) for p, q in zip(probs_s, probs_sp))
        records.append(
            InterventionRecord(
                label=iv.label,
                target=iv.target,
                probabilities_s=probs_s,
                probabilities_sprime=probs_sp,
                probability_defect=defect,
            )
        )

        if len(leaves) * k_joint.rank > _MAX_BRANCHES:
            raise ValueError(
                f"outcome tree exceeds {_MAX_BRANCHES} branches; "
                "trim the intervention list"
            )
        grown = []
        for seq, mat_s, mat_sp in leaves:
            for b, (op_s, op_sp) in enumerate(zip(k_joint.ops, l_joint.ops)):
                grown.append(
                    (
                        seq + (b,),
                        op_s @ mat_s @ dagger(op_s),
                        op_sp @ mat_sp @ dagger(op_sp),
                    )
                )
        leaves = grown

        rho = apply_kraus(k_joint.ops, rho)
        sigma = apply_kraus(l_joint.ops, sigma)

    branches = []
    for seq, mat_s, mat_sp in leaves:
        p_s = float(np.trace(mat_s).real)
        p_sp = float(np.trace(mat_sp).real)
        branches.append(
            BranchRecord(
                sequence=seq,
                probability_s=p_s,
                probability_sprime=p_sp,
                state_s=_renormalized(mat_s, p_s),
                state_sprime=_renormalized(mat_sp, p_sp),
            )
        )

    probability_defect = 0.0
    for rec in records:
        probability_defect = max(probability_defect, rec.probability_defect)
    for br in branches:
        probability_defect = max(
            probability_defect, abs(br.probability_s - br.probability_sprime)
        )

    final_s = DensityMatrix(rho, herm_tol=1e-8, trace_tol=1e-8, psd_tol=1e-8)
    final_sp = DensityMatrix(sigma, herm_tol=1e-8, trace_tol=1e-8, psd_tol=1e-8)
    state_defect = frobenius_distance(sigma, lam @ rho @ dagger(lam))
    covariance_defect = max(probability_defect, state_defect)

    if covariance_defect > cfg.tol:
        verdict = Verdict.INCOMPATIBLE
    elif representation_distance <= cfg.tol:
        verdict = Verdict.COVARIANT
    else:
        verdict = Verdict.NONCOVARIANT_COMPATIBLE

    return ScenarioResult(
        dim_a=cfg.dim_a,
        dim_b=cfg.dim_b,
        interventions=tuple(records),
        branches=tuple(branches),
        final_state_s=final_s,
        final_state_sprime=final_sp,
        probability_defect=probability_defect,
        state_defect=state_defect,
        covariance_defect=covariance_defect,
        representation_distance=representation_distance,
        tol=cfg.tol,
        verdict=verdict,
    )
