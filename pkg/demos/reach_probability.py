"""
How many votes until the span is full?
======================================

Each new classifier vote either stays inside the span of the votes seen so
far (probability ``p_d`` when that span has dimension ``d``) or adds a new
direction. This script tabulates the chance of collecting ``m`` independent
votes as the ensemble grows, and the smallest ensemble that reaches 0.999.
"""

from ensize import min_ensemble_size, reach_probability, reach_probability_bruteforce, simulate_chain
from ensize.independence import reach_curve

# two classes, every second vote is redundant on average
print("m=2, p=0.5")
for n in (2, 3, 5, 11):
    print(f"  n={n:3d}  P={reach_probability(n, 2, [0.5]):.6f}  (closed form {1 - 0.5 ** (n - 1):.6f})")

# the DP and the literal sum over exponent tuples agree
p = [0.3, 0.6]
print("\nm=3, p=(0.3, 0.6)")
for n in range(3, 7):
    print(f"  n={n}  dp={reach_probability(n, 3, p):.12f}  enumeration={reach_probability_bruteforce(n, 3, p):.12f}")

# a Monte Carlo run of the same chain
print("\nMonte Carlo, n=6, 200k trials:", simulate_chain(6, 3, p, 200_000, seed=1))

# the curve rises quickly and flattens; its increments shrink geometrically
reached, _ = reach_curve(40, 4, [0.4, 0.6, 0.8])
print("\nm=4, p=(0.4, 0.6, 0.8): increments of P(n)")
for n in (5, 10, 20, 40):
    print(f"  n={n:3d}  P={reached[n - 1]:.6f}  gain from n-1: {reached[n - 1] - reached[n - 2]:.2e}")

print("\nsmallest ensemble reaching 0.999:")
for m, prof in [(2, [0.5]), (4, [0.4, 0.6, 0.8]), (8, [0.1] * 6 + [0.5]), (3, [0.2, 1.0])]:
    rec = min_ensemble_size(m, prof, 0.999)
    print(f"  m={m} p={prof} -> {rec.to_dict()}")
