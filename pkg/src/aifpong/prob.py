"""
Categorical probability kernels shared by every agent.

Distributions are plain 1-D ``numpy`` arrays. Count-backed parameters
(Dirichlet concentrations) are also arrays and are turned into
distributions with :func:`normalize`. All logarithms are natural.
"""

import numpy as np

EPS = 1e-16
TIE_TOL = 1e-12


def normalize(counts, axis=0):
    """
    Turn non-negative counts into a categorical distribution.

    Parameters
    ----------
    counts: array_like
        Concentration parameters. Entries below ``EPS`` are raised to ``EPS``.
    axis: int, default 0
        Axis along which the result sums to one (columns for matrices).

    Returns
    -------
    probs: ``numpy.ndarray``
    """
    counts = np.asarray(counts, dtype=float)
    if counts.size == 0 or counts.shape[axis] == 0:
        raise ValueError("empty support")
    counts = np.maximum(counts, EPS)
    return counts / counts.sum(axis=axis, keepdims=True)


def _xlogx(p):
    return p * np.log(np.where(p > 0, p, 1.0))


def entropy(p, axis=0):
    """Shannon entropy in nats, with ``0 log 0 = 0``. Reduces over ``axis``."""
    p = np.asarray(p, dtype=float)
    return -_xlogx(p).sum(axis=axis)


def kl_divergence(p, q, axis=0):
    """
    KL divergence ``D[p || q]`` in nats.

    ``q`` is floored at ``EPS`` wherever ``p`` has mass so the result is
    always finite.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape[axis] != q.shape[axis]:
        raise ValueError(
            f"mismatched supports: {p.shape[axis]} vs {q.shape[axis]}"
        )
    # the floor keeps log q finite, so p = 0 terms vanish
    return (_xlogx(p) - p * np.log(np.maximum(q, EPS))).sum(axis=axis)


def softmax(values, precision=1.0, axis=0):
    """
    Normalized exponential ``exp(precision * values)``.

    An infinite precision returns the one-hot vector at the argmax, ties
    going to the lowest index. Values within ``TIE_TOL`` (relative to the
    maximum) count as tied so that rounding noise cannot reorder them.
    """
    values = np.asarray(values, dtype=float)
    if np.isinf(precision):
        top = values.max(axis=axis, keepdims=True)
        winners = values >= top - TIE_TOL * np.maximum(1.0, np.abs(top))
        idx = np.argmax(winners, axis=axis)
        out = np.zeros_like(values)
        np.put_along_axis(out, np.expand_dims(idx, axis), 1.0, axis=axis)
        return out
    x = precision * values
    x = x - x.max(axis=axis, keepdims=True)
    e = np.exp(x)
    return e / e.sum(axis=axis, keepdims=True)


def sample(p, rng):
    """Draw one index from the categorical ``p`` using ``rng`` (a numpy Generator)."""
    cdf = np.cumsum(p)
    idx = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    return min(idx, len(cdf) - 1)
