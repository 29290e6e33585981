"""
Categorical distributions
=========================

Count normalization, entropy, KL divergence and softmax as used by every
agent in the package.
"""

import numpy as np

from aifpong.prob import entropy, kl_divergence, normalize, sample, softmax

# counts become a distribution; zeros are floored so logs stay finite
p = normalize([3, 1, 0])
print("p =", p)
print("H(p) =", entropy(p), "<= ln 3 =", np.log(3))

q = normalize([1, 1, 1])
print("KL(p || uniform) =", kl_divergence(p, q))

# softmax over negative scores; infinite precision is a deterministic argmin
G = np.array([0.4, 0.1, 0.1])
print("softmax(-G) =", softmax(-G))
print("argmin one-hot =", softmax(-G, np.inf))

rng = np.random.default_rng(0)
draws = np.bincount([sample(p, rng) for _ in range(10_000)], minlength=3)
print("empirical frequencies =", draws / draws.sum())
