"""
Weights that reproduce the true class exactly
=============================================

With ``m`` linearly independent votes there is exactly one weighting whose
combined vote equals the one-hot target, and those weights sum to one. The
weights may be negative. With fewer independent votes the solver falls back
to the least-squares weighting.
"""

import numpy as np

from ensize import ideal_vector, solve_ideal_weights
from ensize.linalg import vote_loss

votes = np.array([[0.5, 0.5], [1.0, 0.0]])
w = solve_ideal_weights(votes, ideal_vector(1, 2))
print("votes:\n", votes)
print("weights for class 1:", w.weights, "sum:", w.total())
print("combined vote:", w.weights @ votes)

# surplus classifiers get weight zero
rng = np.random.default_rng(0)
votes = rng.dirichlet(np.ones(4), size=7)
w = solve_ideal_weights(votes, ideal_vector(3, 4))
print("\n7 classifiers, 4 classes:", np.round(w.weights, 4))
print("distance to target:", vote_loss(w, votes, ideal_vector(3, 4)))

# rank-deficient: two identical votes can only hit (0.5, 0.5)
votes = np.array([[0.5, 0.5], [0.5, 0.5]])
w = solve_ideal_weights(votes, ideal_vector(0, 2))
print("\nidentical votes ->", w.weights, "distance", vote_loss(w, votes, ideal_vector(0, 2)))
