"""
Accuracy against ensemble size on a random-RBF stream
=====================================================

Runs a test-then-train pass for several ensemble sizes, then estimates the
dependence profile from the largest ensemble's votes and turns it into a
recommended size. A smaller stream than the acceptance run keeps this quick;
the CSV written at the end is ready for plotting.
"""

from ensize import RbfConfig
from ensize.experiment import SweepConfig, run_sweep

cfg = SweepConfig(
    sizes=(2, 4, 8, 16, 32),
    dataset=RbfConfig(m=4, instances=10_000, seed=1),
    seed=1,
    output="accuracy_sweep.csv",
)
outcome = run_sweep(cfg)
for r in outcome.results:
    print(f"n={r.ensemble_size:3d}  accuracy={r.accuracy:.4f}")
print("estimated profile:", [round(v, 5) for v in outcome.profile.tolist()])
print("recommendation:", outcome.recommendation.to_dict())
print("wrote accuracy_sweep.csv")
