"""
Grid Pong on a 38 x 8 court with a paddle on the left wall.

The ball travels over 38 columns (``ball_x = 0`` is the paddle plane) and
8 rows; the paddle midpoint moves over the same 8 rows. There is no
opponent: the ball bounces off the back wall and returns after every hit.
"""

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

N_BALL_X = 38
N_BALL_Y = 8
N_PADDLE_Y = 8
DIMS = (N_BALL_X, N_BALL_Y, N_PADDLE_Y)


class Action(enum.IntEnum):
    UP = 0
    DOWN = 1
    STAY = 2


PADDLE_DELTA = {Action.UP: 1, Action.DOWN: -1, Action.STAY: 0}


class Feedback(enum.Enum):
    NONE = "none"
    HIT = "hit"
    MISS = "miss"


class Observation(NamedTuple):
    ball_x: int
    ball_y: int
    paddle_y: int


@dataclass
class EnvState:
    ball_x: int
    ball_y: int
    paddle_y: int
    vx: int
    vy: int

    @property
    def observation(self):
        return Observation(self.ball_x, self.ball_y, self.paddle_y)


def transition(state, action, hit_halfwidth=1):
    """
    Pure one-step dynamics.

    The paddle moves first, then the ball. Returns ``(next_state, feedback)``.
    """
    top_x, top_y = N_BALL_X - 1, N_BALL_Y - 1
    paddle = min(max(state.paddle_y + PADDLE_DELTA[Action(action)], 0), N_PADDLE_Y - 1)

    y, vy = state.ball_y + state.vy, state.vy
    if y < 0:
        y, vy = -y, -vy
    elif y > top_y:
        y, vy = 2 * top_y - y, -vy

    x, vx = state.ball_x + state.vx, state.vx
    feedback = Feedback.NONE
    if vx < 0 and x <= 0:
        if abs(y - paddle) <= hit_halfwidth:
            feedback, x, vx = Feedback.HIT, 1, 1
        else:
            feedback, x = Feedback.MISS, 0
    elif vx > 0 and x >= top_x:
        x, vx = top_x, -1
    return EnvState(x, y, paddle, vx, vy), feedback


class PongEnv:
    """
    Single-paddle Pong.

    Parameters
    ----------
    rng: ``numpy.random.Generator``
        Only used to draw serves.
    hit_halfwidth: int, default 1
        A hit needs ``|ball_y - paddle_y| <= hit_halfwidth`` when the ball
        reaches the paddle plane.
    max_steps: int, default 2000
        Rally cap; a capped episode ends without a miss.
    serve_vy: tuple of int, default (-1, 1)
        Vertical serve velocities drawn uniformly at each reset. Straight
        serves (0) are off by default: a paddle that never moves returns
        every straight ball it meets once, which makes rallies trivially long.
    """

    def __init__(self, rng, hit_halfwidth=1, max_steps=2000, serve_vy=(-1, 1),
                 initial_paddle_y=3):
        if not 0 <= hit_halfwidth < N_BALL_Y:
            raise ValueError("hit_halfwidth must be in [0, 7]")
        if max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        self.rng = rng
        self.hit_halfwidth = hit_halfwidth
        self.max_steps = max_steps
        self.serve_vy = tuple(int(v) for v in serve_vy)
        if not self.serve_vy or any(v not in (-1, 0, 1) for v in self.serve_vy):
            raise ValueError("serve_vy must be a non-empty subset of {-1, 0, 1}")
        self.paddle_y = initial_paddle_y
        self.state = None
        self.steps = 0
        self.hits = 0
        self.done = True
        self.capped = False

    def reset(self, rng=None):
        rng = self.rng if rng is None else rng
        if self.state is not None:
            self.paddle_y = self.state.paddle_y
        self.state = EnvState(
            ball_x=N_BALL_X - 1,
            ball_y=int(rng.integers(N_BALL_Y)),
            paddle_y=self.paddle_y,
            vx=-1,
            vy=self.serve_vy[int(rng.integers(len(self.serve_vy)))],
        )
        self.steps = 0
        self.hits = 0
        self.done = False
        self.capped = False
        return self.state.observation

    def step(self, action):
        """Advance one step. Returns ``(observation, feedback, done)``."""
        if self.done:
            raise RuntimeError("episode finished")
        self.state, feedback = transition(self.state, action, self.hit_halfwidth)
        self.steps += 1
        if feedback is Feedback.HIT:
            self.hits += 1
        self.capped = feedback is not Feedback.MISS and self.steps >= self.max_steps
        self.done = feedback is Feedback.MISS or self.capped
        return self.state.observation, feedback, self.done
