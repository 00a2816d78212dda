"""
An EPR pair measured in two Lorentz frames
==========================================

Runs a Bell state through a local Z measurement on side A and compares the
bookkeeping of two frames related by a product unitary. Outcome statistics
agree to machine precision. Swapping in a mixed (non-covariant) operator
set for the second frame changes the branch states on paper but not a
single observable number.
"""

import numpy as np

from covchan import (
    DensityMatrix,
    FrameTransform,
    Intervention,
    KrausSet,
    MixingUnitary,
    ScenarioConfig,
    Target,
    random_unitary,
    run_scenario,
)

P0 = np.diag([1.0, 0.0]).astype(complex)
P1 = np.diag([0.0, 1.0]).astype(complex)
HAD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)

bell = DensityMatrix.from_state_vector([1, 0, 0, 1])
frame = FrameTransform(np.kron(HAD, random_unitary(2, 51)))
z_meas = KrausSet((P0, P1))

cfg = ScenarioConfig(
    initial_state=bell,
    dim_a=2,
    dim_b=2,
    frame=frame,
    interventions=(Intervention("z on A", z_meas, Target.SUBSYSTEM_A),),
)
result = run_scenario(cfg)

rec = result.interventions[0]
print("branch probabilities, frame S: ", [f"{p:.3f}" for p in rec.probabilities_s])
print("branch probabilities, frame S':", [f"{p:.3f}" for p in rec.probabilities_sprime])
print(f"covariance defect: {result.covariance_defect:.3e}  ->  {result.verdict.name}")

for branch in result.branches:
    print(f"  outcome {branch.sequence}: p = {branch.probability_s:.3f}")

# Give frame S' a mixed representation of the same measurement channel.
# The operators now differ from the conjugated ones, yet every probability
# and both frames' final states are unchanged.
v = MixingUnitary(random_unitary(2, 52))
cfg = ScenarioConfig(
    initial_state=bell,
    dim_a=2,
    dim_b=2,
    frame=frame,
    interventions=(Intervention("z on A", z_meas, Target.SUBSYSTEM_A, mixing=v),),
)
mixed = run_scenario(cfg)

rec = mixed.interventions[0]
print("\nafter mixing the S' representation:")
print("branch probabilities, frame S':", [f"{p:.3f}" for p in rec.probabilities_sprime])
print(f"probability defect:      {mixed.probability_defect:.3e}")
print(f"representation distance: {mixed.representation_distance:.3f}")
print(f"verdict: {mixed.verdict.name}")
