"""
The unitary freedom of operator-sum representations
===================================================

For a rank-N set, mixing the operators by any N x N unitary V leaves the
channel untouched: L_A = sum_B V_AB K_B. That freedom generates infinitely
many frame-S' solutions that are compatible with the frame-S channel yet
not operator-by-operator covariant. The mixing unitary can be recovered
from the two sets as long as the operators are linearly independent.
"""

import numpy as np

from covchan import (
    FrameTransform,
    KrausSet,
    MixingUnitary,
    analyze,
    conjugate_kraus,
    extract_mixing,
    make_noncovariant_solution,
    mix_kraus,
    random_kraus_set,
    random_unitary,
)

d, n = 2, 3
k = random_kraus_set(d, n, seed=21)
lam = FrameTransform(random_unitary(d, 22))
v = MixingUnitary(random_unitary(n, 23))

lprime = make_noncovariant_solution(k, lam, v)
report = analyze(k, lprime, lam)
print(f"verdict:            {report.verdict.name}")
print(f"residual:           {report.residual:.3e}")
print(f"covariant distance: {report.covariant_distance:.3e}")

# round trip: recover V from the covariant set and the mixed set
covariant = conjugate_kraus(k, lam)
recovered = extract_mixing(covariant, lprime)
print(f"recovered V error:  {np.linalg.norm(recovered.mat - v.mat):.3e}")

# linearly dependent operators leave V underdetermined -> None, never a guess
s = 1.0 / np.sqrt(2.0)
degenerate = KrausSet((s * np.eye(2, dtype=complex), s * np.eye(2, dtype=complex)))
shuffled = mix_kraus(degenerate, MixingUnitary(random_unitary(2, 24)))
print(f"degenerate extraction: {extract_mixing(degenerate, shuffled)}")
