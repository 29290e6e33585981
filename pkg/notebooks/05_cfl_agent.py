"""
Counterfactual learning
=======================

CFL-T keeps a state-action count table and the last T decisions. Every
step slightly suppresses remembered pairs; a hit lowers their risk and
turns the update into reinforcement for the moves that led to it.
"""

import numpy as np

from aifpong.cfl import CflAgent
from aifpong.env import PongEnv

rng = np.random.default_rng(7)
env = PongEnv(np.random.default_rng(8))

for memory in (1, 4, 16):
    agent = CflAgent(memory)
    te0 = agent.total_entropy()
    hits = []
    for episode in range(70):
        obs = env.reset()
        agent.start_episode(obs)
        done = False
        while not done:
            u = agent.act(obs, rng)
            obs, fb, done = env.step(u)
            agent.learn(obs, fb)
        agent.end_episode()
        hits.append(env.hits)
    gamma = agent.gamma_trace()
    print(f"{agent.name}: hits first 15 {np.mean(hits[:15]):.2f}, last 55 {np.mean(hits[15:]):.2f}; "
          f"NTE(CL) {agent.total_entropy() / te0:.3f}; mean risk {gamma[:500].mean():.3f} -> {gamma[-500:].mean():.3f}")
