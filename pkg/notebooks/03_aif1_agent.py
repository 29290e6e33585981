"""
One-step active inference
=========================

AIF-1 learns transition counts and hit-conditioned preferences, and picks
actions by the one-step risk of its prediction.
"""

import numpy as np

from aifpong.aif1 import Aif1Agent
from aifpong.env import PongEnv

rng = np.random.default_rng(3)
env = PongEnv(np.random.default_rng(4))
agent = Aif1Agent()
obs = env.reset()
print("fresh model, G =", agent.efe(obs))

hits = []
for episode in range(30):
    obs = env.reset()
    done = False
    while not done:
        u = agent.act(obs, rng)
        obs, fb, done = env.step(u)
        agent.learn(obs, fb)
    hits.append(env.hits)

print("hits per rally, first 10 vs last 10:", np.mean(hits[:10]), np.mean(hits[10:]))
print("G after learning =", agent.efe(obs))
print("total transition entropy:", agent.model.b_entropy())
print("total preference entropy:", agent.model.c_entropy())
