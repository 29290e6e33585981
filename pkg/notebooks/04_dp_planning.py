"""
Planning with dynamic programming
=================================

DP-T evaluates the expected free energy of every action in every state
by a backward pass over T steps. On a toy ring it finds the shortest way
to a preferred state; on Pong it plans over all 2432 joint states.
"""

import time

import numpy as np

from aifpong.dpefe import DpefeAgent, plan_dense
from aifpong.env import PongEnv
from aifpong.prob import normalize

# ring of 4 states: action 0 steps forward, action 1 stays; state 3 is preferred
nxt = np.array([[1, 2, 3, 0], [0, 1, 2, 3]])
B = np.zeros((2, 4, 4))
for u in range(2):
    B[u, nxt[u], np.arange(4)] = 1.0
C = normalize(np.array([0.01, 0.01, 0.01, 1.0]))
table = plan_dense(B, C, horizon=3, precision=np.inf)
print("chosen action per state:", table.q_action[0].argmax(axis=0))
print("G at the root:\n", table.G[0].round(3))

rng = np.random.default_rng(5)
env = PongEnv(np.random.default_rng(6))
for T in (2, 5, 15):
    agent = DpefeAgent(T)
    start = time.perf_counter()
    agent.plan()
    print(f"DP-{T}: one full plan in {1000 * (time.perf_counter() - start):.1f} ms")

agent = DpefeAgent(5)
hits = []
for episode in range(10):
    obs = env.reset()
    done = False
    while not done:
        u = agent.act(obs, rng)
        obs, fb, done = env.step(u)
        agent.learn(obs, fb)
    hits.append(env.hits)
print("DP-5 hits per rally over 10 serves:", hits)
