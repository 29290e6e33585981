"""
Counterfactual learning (CFL-T).

The agent keeps a state-action count mapping ``CL`` and samples actions
from ``softmax(precision * ln CL[:, s])``. The last ``T`` (state, action)
pairs are held in memory. Every step each remembered pair is pushed by
``t * (1 - 2 * risk)`` averaged over memory, where ``t`` is the step within
the episode and ``risk`` starts at 0.55 (a net suppression). When a hit
arrives, the risk of each remembered pair drops by ``1 / (T_goal - t')``,
flipping recent pairs to reinforcement.
"""

from collections import deque
from dataclasses import dataclass

import numpy as np

from .env import DIMS, Action, Feedback
from .model import joint_index
from .prob import EPS, entropy, sample, softmax

GAMMA_PRIOR = 0.55


@dataclass
class MemoryEntry:
    state: int
    action: int
    step: int  # episode step at which the state was observed
    gamma: float


class CflAgent:
    """
    Parameters
    ----------
    memory: int
        Memory horizon ``T``: number of past state-action pairs used per update.
    precision: float
        Action-selection precision on ``ln CL``.
    gamma_prior: float
        Initial risk of every remembered pair.
    init_count: float
        Uniform initial value of ``CL``.
    dims: tuple of int
        Modality sizes used to index joint states.
    """

    def __init__(self, memory, precision=1.0, gamma_prior=GAMMA_PRIOR, init_count=1.0,
                 dims=DIMS, n_actions=len(Action)):
        if memory < 1:
            raise ValueError("memory must be >= 1")
        if precision <= 0:
            raise ValueError("precision must be positive")
        self.memory = int(memory)
        self.precision = precision
        self.gamma_prior = gamma_prior
        self.dims = tuple(dims)
        self.n_states = int(np.prod(self.dims))
        self.counts = np.full((n_actions, self.n_states), float(init_count))
        self.buffer = deque(maxlen=self.memory)
        self.t = 0
        self.gamma_history = []

    @property
    def name(self):
        return f"CFL-{self.memory}"

    def action_distribution(self, obs):
        s = joint_index(*obs, dims=self.dims)
        return softmax(np.log(self.counts[:, s]), self.precision)

    def policy(self):
        """Action distribution of every state, shape ``(n_actions, n_states)``."""
        return softmax(np.log(self.counts), self.precision, axis=0)

    def total_entropy(self):
        return float(entropy(self.policy(), axis=0).sum())

    def start_episode(self, obs):
        self.t = 0
        self.buffer.clear()

    def act(self, obs, rng):
        u = sample(self.action_distribution(obs), rng)
        s = joint_index(*obs, dims=self.dims)
        self.buffer.append(MemoryEntry(s, u, self.t, self.gamma_prior))
        return Action(u)

    def learn(self, nxt, fb):
        if not self.buffer:
            raise RuntimeError("learn called before act")
        self.t += 1
        self.on_feedback(fb, self.t)

    def on_feedback(self, fb, t):
        """Retrospectively lower the risk of remembered pairs on a hit, then update."""
        if not self.buffer:
            raise RuntimeError("memory is empty")
        if fb is Feedback.HIT:
            for e in self.buffer:
                if e.step < t:
                    e.gamma = min(max(self.gamma_prior - 1.0 / (t - e.step), 0.0), 1.0)
        self.apply_update()
        self.gamma_history.append(self.mean_gamma())

    def apply_update(self):
        if not self.buffer:
            raise RuntimeError("memory is empty")
        scale = self.t / len(self.buffer)
        for e in self.buffer:
            self.counts[e.action, e.state] += scale * (1.0 - 2.0 * e.gamma)
        np.maximum(self.counts, EPS, out=self.counts)

    def mean_gamma(self):
        if not self.buffer:
            return self.gamma_prior
        return float(np.mean([e.gamma for e in self.buffer]))

    def gamma_trace(self):
        return np.asarray(self.gamma_history)

    def end_episode(self):
        self.buffer.clear()
        self.t = 0
