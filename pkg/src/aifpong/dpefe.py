"""
Dynamic programming over expected free energy (DP-T).

The planner evaluates the risk of every action in every state at the
horizon and then walks backwards, adding the expected EFE of the next
action under the transition model and the next-step action distribution.
Two back ends share the recursion: a dense one for arbitrary small POMDPs
and a factorized one that exploits the per-modality transition model.
"""

from dataclasses import dataclass

import numpy as np

from .env import Action
from .model import GenerativeModel, joint_index
from .prob import kl_divergence, sample, softmax


@dataclass
class EfeTable:
    """
    Output of a backward pass.

    ``G[t, u, s]`` is the expected free energy of action ``u`` in joint
    state ``s`` at planning step ``t`` (``t = 0`` is now, ``t = T - 1`` the
    last action) and ``q_action[t, :, s]`` the matching action distribution.
    """

    G: np.ndarray
    q_action: np.ndarray

    @property
    def horizon(self):
        return self.G.shape[0]


def _backward(risk, expect_next, horizon, precision):
    T = int(horizon)
    if T < 1:
        raise ValueError("horizon must be >= 1")
    G = np.empty((T,) + risk.shape)
    Q = np.empty_like(G)
    G[-1] = risk
    Q[-1] = softmax(-G[-1], precision, axis=0)
    for t in range(T - 2, -1, -1):
        value = (Q[t + 1] * G[t + 1]).sum(axis=0)
        G[t] = risk + expect_next(value)
        Q[t] = softmax(-G[t], precision, axis=0)
    return EfeTable(G, Q)


def plan_dense(B, C, horizon, precision=1.0):
    """
    Backward recursion for a fully observed POMDP with identity likelihood.

    Parameters
    ----------
    B: ``numpy.ndarray``, shape ``(n_actions, n_states, n_states)``
        ``B[u, next, prev]``, columns normalized.
    C: ``numpy.ndarray``, shape ``(n_states,)``
        Preferred outcome distribution.
    horizon: int
    precision: float
        Action precision; ``numpy.inf`` gives argmin selection with ties
        to the lowest action index.
    """
    B = np.asarray(B, dtype=float)
    risk = kl_divergence(B, C[None, :, None], axis=1)
    return _backward(risk, lambda v: np.einsum("uij,i->uj", B, v), horizon, precision)


def plan_factorized(Bs, Cs, horizon, precision=1.0):
    """
    Backward recursion with a factorized transition model.

    ``Bs[m]`` has shape ``(n_actions, d_m, d_m)`` and ``Cs[m]`` shape
    ``(d_m,)``. The joint prediction is the product of factor predictions,
    so the joint risk is the sum of per-modality KL divergences and the
    expectation of next-step EFE is a sequence of per-axis contractions.
    States are flattened in C order, matching :func:`~aifpong.model.joint_index`.
    """
    dims = tuple(b.shape[1] for b in Bs)
    n = len(dims)
    n_actions = Bs[0].shape[0]
    risk = np.zeros((n_actions,) + dims)
    for m, (b, c) in enumerate(zip(Bs, Cs)):
        k = kl_divergence(b, c[None, :, None], axis=1)
        shape = [n_actions] + [1] * n
        shape[m + 1] = dims[m]
        risk = risk + k.reshape(shape)

    # contract one factor axis at a time; the last axis uses w @ B directly
    steps = []
    for m, b in enumerate(Bs):
        pre, post = int(np.prod(dims[:m])), int(np.prod(dims[m + 1:]))
        if post == 1:
            steps.append((b, (pre, dims[m]), False))
        else:
            steps.append((np.ascontiguousarray(b.transpose(0, 2, 1))[:, None],
                          (pre, dims[m], post), True))

    def expect_next(value):
        w = value.reshape(1, -1)
        for mat, shape, left in steps:
            w = w.reshape((w.shape[0],) + shape)
            w = np.matmul(mat, w) if left else np.matmul(w, mat)
        return w.reshape(n_actions, -1)

    return _backward(risk.reshape(n_actions, -1), expect_next, horizon, precision)


class DpefeAgent:
    """
    Active inference agent planning with DPEFE over horizon ``T``.

    ``replan_mode="every_step"`` replans before every action (receding
    horizon); ``"per_episode"`` plans once at the start of each episode.
    """

    def __init__(self, horizon, model=None, precision=1.0, lr=1.0, eta=1.0,
                 replan_mode="every_step"):
        if horizon < 1:
            raise ValueError("horizon must be >= 1")
        if replan_mode not in ("every_step", "per_episode"):
            raise ValueError(f"unknown replan_mode {replan_mode!r}")
        self.horizon = int(horizon)
        self.model = GenerativeModel() if model is None else model
        self.precision = precision
        self.lr = lr
        self.eta = eta
        self.replan_mode = replan_mode
        self.table = None
        self._last = None

    @property
    def name(self):
        return f"DP-{self.horizon}"

    def plan(self, obs=None):
        m = self.model
        Bs = [m.transition_probs(k) for k in range(len(m.dims))]
        Cs = [m.preference(k) for k in range(len(m.dims))]
        self.table = plan_factorized(Bs, Cs, self.horizon, self.precision)
        return self.table

    def start_episode(self, obs):
        if self.replan_mode == "per_episode":
            self.plan(obs)

    def action_distribution(self, obs):
        if self.replan_mode == "every_step":
            self.plan(obs)
        elif self.table is None:
            raise RuntimeError("no current plan: call start_episode first")
        return self.table.q_action[0][:, joint_index(*obs, dims=self.model.dims)]

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
        if self.replan_mode == "per_episode":
            self.table = None
