"""
Agent-side generative model for the Pong task.

The hidden state is the triple ``(ball_x, ball_y, paddle_y)`` and the
likelihood is the identity, so observations and states share one index
space. Transitions are factorized: one Dirichlet-count matrix per
modality and action, columns indexed by the previous factor value.
"""

import numpy as np

from .env import DIMS, Action, Feedback
from .prob import entropy, normalize

MODALITIES = ("ball_x", "ball_y", "paddle_y")


def joint_index(bx, by, py, dims=DIMS):
    """Flatten a factor triple into a joint state index (C order)."""
    for value, dim in zip((bx, by, py), dims):
        if not 0 <= value < dim:
            raise ValueError(f"factor {value} out of range [0, {dim})")
    return (bx * dims[1] + by) * dims[2] + py


def factorize(joint, dims=DIMS):
    """Inverse of :func:`joint_index`."""
    n = int(np.prod(dims))
    if not 0 <= joint < n:
        raise ValueError(f"joint index {joint} out of range [0, {n})")
    bx, rest = divmod(joint, dims[1] * dims[2])
    by, py = divmod(rest, dims[2])
    return bx, by, py


class GenerativeModel:
    """
    POMDP generative model with identity likelihood.

    Parameters
    ----------
    dims: tuple of int
        Size of each modality; defaults to the Pong geometry ``(38, 8, 8)``.
    n_actions: int
        Number of control states.
    b_init, c_init: float
        Initial (uniform) Dirichlet counts for transitions and preferences.

    Attributes
    ----------
    b_counts: list of ``numpy.ndarray``
        ``b_counts[m][u, next, prev]`` for modality ``m``.
    c_counts: list of ``numpy.ndarray``
        Preference counts per modality.
    D, E: ``numpy.ndarray``
        Fixed uniform priors over joint states and actions.
    """

    def __init__(self, dims=DIMS, n_actions=len(Action), b_init=1.0, c_init=1.0):
        self.dims = tuple(dims)
        self.n_actions = n_actions
        self.n_states = int(np.prod(self.dims))
        self.b_counts = [np.full((n_actions, d, d), float(b_init)) for d in self.dims]
        self.c_counts = [np.full(d, float(c_init)) for d in self.dims]
        self.D = np.full(self.n_states, 1.0 / self.n_states)
        self.E = np.full(n_actions, 1.0 / n_actions)

    def update_b(self, prev, u, nxt, lr=1.0):
        """Accumulate one observed factor transition per modality."""
        u = int(u)
        for m, counts in enumerate(self.b_counts):
            counts[u, nxt[m], prev[m]] += lr

    def update_c(self, obs, fb, eta=1.0):
        """Reinforce the preference for observations that coincide with a hit."""
        if fb is not Feedback.HIT:
            return
        for m, counts in enumerate(self.c_counts):
            counts[obs[m]] += eta

    def likelihood(self, m):
        """Identity observation mapping for modality ``m``."""
        return np.eye(self.dims[m])

    def transition_probs(self, m):
        """Column-normalized ``B`` for modality ``m``, shape ``(n_actions, d, d)``."""
        return normalize(self.b_counts[m], axis=1)

    def preference(self, m):
        return normalize(self.c_counts[m])

    def predict_factor(self, m, u, frm):
        return normalize(self.b_counts[m][int(u), :, frm])

    def predict_joint(self, u, state):
        """Joint next-state prediction as the outer product of factor predictions."""
        out = np.ones(1)
        for m, s in enumerate(state):
            out = np.multiply.outer(out, self.predict_factor(m, u, s))
        return out.reshape(-1)

    def b_entropy(self, m=None):
        """Total column entropy of ``B`` (one modality, or summed over all)."""
        mods = range(len(self.dims)) if m is None else [m]
        return float(sum(entropy(self.transition_probs(k), axis=1).sum() for k in mods))

    def c_entropy(self, m=None):
        mods = range(len(self.dims)) if m is None else [m]
        return float(sum(entropy(self.preference(k)) for k in mods))

    def ambiguity(self, qs):
        """Expected entropy of the likelihood under state beliefs ``qs`` (per modality)."""
        return float(sum(
            qs[m] @ entropy(self.likelihood(m), axis=0) for m in range(len(self.dims))
        ))

