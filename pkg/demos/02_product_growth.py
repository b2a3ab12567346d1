"""
Joint spectral radius bounds and product boundedness
====================================================

Three small families with very different growth behavior:

* a single shear, where the spectral radius says 1 but powers grow linearly,
* a nilpotent pair whose products vanish beyond every length-2 window,
* a pair of contractions with norms below 1.
"""

import numpy as np

from mjlslab import (
    MatrixSet,
    boundedness_probe,
    jsr_bounds,
    spectral_finiteness_probe,
    word_product,
)

shear = MatrixSet.from_list([np.array([[1.0, 0.0], [1.0, 1.0]])])

b = jsr_bounds(shear, depth=20)
print("shear: lower bound", b.lower, "upper bound", round(b.upper, 6))
# the lower bound is exact here (rho = 1 at every power) but the norm-based
# upper bound closes the gap only like n^(1/n)
probe = boundedness_probe(shear, max_depth=8)
print("shear norms per depth:", [round(v, 3) for v in probe.max_norm_per_depth])
print("shear verdict:", probe.verdict)

nilpotent = MatrixSet.from_list(
    [np.array([[0.0, 1.0], [0.0, 0.0]]), np.array([[0.0, 0.0], [1.0, 0.0]])]
)
b2 = jsr_bounds(nilpotent, depth=2)
print("\nnilpotent pair: lower", b2.lower, "upper", b2.upper,
      "at word", b2.lower_word)
print("word (1,2) product:\n", word_product(nilpotent, (1, 2)))

fin = spectral_finiteness_probe(nilpotent, max_len=2, jsr_depth=2)
print("finiteness evidence:", fin.finiteness_evidence, "gap:", fin.gap)

contractions = MatrixSet.from_list([0.9 * np.eye(2), np.diag([0.5, 0.8])])
p3 = boundedness_probe(contractions, max_depth=10, prune=True)
print("\ncontractions verdict:", p3.verdict)
print("prune note:", p3.prune_note)
