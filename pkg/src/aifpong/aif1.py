"""Classical active inference with one-step planning (AIF-1)."""

import numpy as np

from .env import Action
from .model import GenerativeModel
from .prob import kl_divergence, sample, softmax


class Aif1Agent:
    """
    Scores each action by the risk of its one-step prediction against the
    learned preferences and samples from ``softmax(-precision * G + log E)``.

    With an identity likelihood the ambiguity term of the expected free
    energy vanishes, so ``G`` is a sum of per-modality KL divergences.
    """

    name = "AIF-1"

    def __init__(self, model=None, precision=1.0, lr=1.0, eta=1.0):
        if precision <= 0:
            raise ValueError("precision must be positive")
        self.model = GenerativeModel() if model is None else model
        self.precision = precision
        self.lr = lr
        self.eta = eta
        self._last = None

    def efe_one_step(self, obs, u):
        m = self.model
        return float(sum(
            kl_divergence(m.predict_factor(k, u, obs[k]), m.preference(k))
            for k in range(len(m.dims))
        ))

    def efe(self, obs):
        return np.array([self.efe_one_step(obs, u) for u in range(self.model.n_actions)])

    def action_distribution(self, obs):
        G = self.efe(obs)
        # log E / precision keeps the prior additive and drops out at infinite precision
        return softmax(-G + np.log(self.model.E) / self.precision, self.precision)

    def start_episode(self, obs):
        pass

    def act(self, obs, rng):
        u = Action(sample(self.action_distribution(obs), rng))
        self._last = (obs, u)
        return u

    def learn(self, nxt, fb):
        if self._last is None:
            raise RuntimeError("learn called before act")
        prev, u = self._last
        self.model.update_b(prev, u, nxt, self.lr)
        self.model.update_c(nxt, fb, self.eta)
        self._last = None

    def end_episode(self):
        self._last = None
