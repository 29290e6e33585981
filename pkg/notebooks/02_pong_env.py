"""
The Pong grid
=============

A 38 x 8 court, a 3-cell paddle on the left wall and a ball that bounces
off the top, bottom and right walls. One serve lasts until the paddle
misses.
"""

import numpy as np

from aifpong.env import Action, Feedback, PongEnv

rng = np.random.default_rng(1)
env = PongEnv(rng)
obs = env.reset()
print("serve:", obs, "velocity", (env.state.vx, env.state.vy))

# a paddle that tracks the ball's row
done = False
while not done:
    move = Action.UP if obs.ball_y > obs.paddle_y else Action.DOWN if obs.ball_y < obs.paddle_y else Action.STAY
    obs, fb, done = env.step(move)
    if fb is Feedback.HIT:
        print("hit at step", env.steps)
    if env.steps >= 400:
        break
print("tracking paddle: hits =", env.hits, "steps =", env.steps, "capped =", env.capped)

# a random paddle misses quickly
env = PongEnv(np.random.default_rng(2))
lengths = []
for _ in range(50):
    env.reset()
    done = False
    while not done:
        _, _, done = env.step(Action(rng.integers(3)))
    lengths.append(env.hits)
print("random paddle: mean hits per rally =", np.mean(lengths))
