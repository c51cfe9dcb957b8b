"""
Measuring dependence probabilities from votes
=============================================

Vote matrices are scanned row by row; each row added while the span has
dimension ``d`` is a trial for ``p_d``. Here the votes come from a generator
with known dependence rates, so the estimate can be checked.
"""

from ensize import PlantedVoteConfig, estimate_from_stream, min_ensemble_size, synthetic_vote_stream
from ensize.estimator import accumulate

planted = [0.6, 0.3, 0.45]
cfg = PlantedVoteConfig(planted, n=8, m=4, instances=20_000, seed=3)
state = accumulate(synthetic_vote_stream(cfg))
print("dependent counts:", state.dependent_counts.tolist())
print("total counts:    ", state.total_counts.tolist())

p_hat = estimate_from_stream(synthetic_vote_stream(cfg))
print("planted:  ", planted)
print("estimated:", [round(v, 4) for v in p_hat.tolist()])
print("recommended size at 0.999:", min_ensemble_size(4, p_hat, 0.999).n_min)
