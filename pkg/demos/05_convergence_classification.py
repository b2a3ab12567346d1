"""
Sorting systems by how their random products die (or refuse to)
===============================================================

Monte Carlo estimates separate three behaviours: products that converge for
a fixed start, products that converge exponentially fast, and products that
converge no matter how the switching is chosen.  Word probes and a greedy
steering search supply deterministic counterweights to the sampling.
"""

import numpy as np

from mjlslab import (
    MJLS,
    MarkovChain,
    MatrixSet,
    consistent_convergence_probe,
    greedy_pointwise_search,
    pointwise_convergence_estimate,
    pointwise_equivalence_harness,
)


def rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [-s, c]])


# fair coin over two symbols
chain = MarkovChain(np.array([0.5, 0.5]), np.full((2, 2), 0.5))

# one contraction, one rotation: every random product eventually dies
family = MatrixSet.from_list([np.diag([0.5, 1.0]), rotation(np.pi / 2)])
m = MJLS(family, chain)

report = pointwise_convergence_estimate(m, [1.0, 0.0], trials=200, horizon=2000, seed=7)
print("contraction + quarter turn, start e1")
print(f"  converged {report.fraction_converged:.2f}, exponential {report.fraction_exponential:.2f}")

harness = pointwise_equivalence_harness(m, trials=200, horizon=2000, num_initials=20, seed=7)
print(f"  gate passed: {harness.gate_passed}")
print(f"  max |converged - exponential| over initials: {harness.max_discrepancy:.3f}")

# mixing in an expansion kills consistency for adversarial switching,
# yet a greedy controller can still steer any start to zero
push_pull = MatrixSet.from_list([np.diag([0.5, 2.0]), rotation(np.pi / 6)])
probe = consistent_convergence_probe(push_pull, max_len=10)
print("\nhalf/double + rotation")
print(f"  worst word value {probe.best_value:.6f} -> {probe.verdict}")

rng = np.random.default_rng(3)
x = rng.standard_normal(2)
x /= np.linalg.norm(x)
search = greedy_pointwise_search(push_pull, x, lookahead=13, max_steps=800, eps=1e-4)
print(f"  greedy steering: success={search.success} after {search.steps} steps")

# the shear never contracts, so nothing converges and the gate says so
shear = MatrixSet.from_list([np.array([[1.0, 0.0], [1.0, 1.0]])])
iid1 = MarkovChain(np.array([1.0]), np.array([[1.0]]))
gate = pointwise_equivalence_harness(
    MJLS(shear, iid1), trials=50, horizon=500, num_initials=5, seed=1
)
print("\nshear alone")
print(f"  gate passed: {gate.gate_passed} ({gate.gate.verdict})")
