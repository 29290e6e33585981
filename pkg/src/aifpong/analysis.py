"""
Game metrics, block comparisons, regression, and entropy traces.

Trials are stretched onto a 20 minute clock: every environment step gets
the same duration, so an episode's end time is proportional to the
cumulative number of steps. Performance is compared between the first
five minutes and the remaining fifteen.
"""

from dataclasses import dataclass, field, replace

import numpy as np
from scipy import stats

from .prob import entropy

TRIAL_LENGTH_S = 1200.0
BLOCK_SPLIT_S = 300.0
BIN_S = 60.0
LONG_RALLY = 3
METRICS = ("hits_per_rally", "pct_aces", "pct_long")


@dataclass(frozen=True)
class EpisodeRecord:
    episode_index: int
    hits: int
    steps: int
    end_time_s: float = None

    @property
    def is_ace(self):
        return self.hits == 0


@dataclass(frozen=True)
class BlockStats:
    n_episodes: int
    hits_per_rally: float
    pct_aces: float
    pct_long: float

    def metric(self, name):
        return getattr(self, name)


@dataclass
class TrialSummary:
    first: BlockStats = None
    last: BlockStats = None
    bins: list = field(default_factory=list)
    regression: dict = field(default_factory=dict)

    def improvement(self, metric="hits_per_rally"):
        if self.first is None or self.last is None:
            return None
        return self.last.metric(metric) - self.first.metric(metric)


def timestamp_episodes(records, trial_length_s=TRIAL_LENGTH_S):
    """Assign end times so that the whole trial spans ``trial_length_s``."""
    records = list(records)
    total = sum(r.steps for r in records)
    if not records or total <= 0:
        raise ValueError("empty trial")
    dt = trial_length_s / total
    out, cum = [], 0
    for r in records:
        cum += r.steps
        out.append(replace(r, end_time_s=cum * dt))
    # guard the last stamp against rounding
    out[-1] = replace(out[-1], end_time_s=float(trial_length_s))
    return out


def block_stats(hits, long_threshold=LONG_RALLY):
    """Metrics of a group of episodes, or ``None`` when the group is empty."""
    hits = np.asarray(hits)
    if hits.size == 0:
        return None
    return BlockStats(
        n_episodes=int(hits.size),
        hits_per_rally=float(hits.mean()),
        pct_aces=100.0 * float(np.mean(hits == 0)),
        pct_long=100.0 * float(np.mean(hits >= long_threshold)),
    )


def linear_regression(x, y):
    """
    Ordinary least squares fit ``y = slope * x + intercept``.

    Returns ``(slope, intercept, r)``; ``r`` is 0 when ``y`` is constant.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size != y.size:
        raise ValueError("x and y differ in length")
    if x.size < 2:
        raise ValueError("need at least two points")
    dx = x - x.mean()
    sxx = dx @ dx
    if sxx == 0:
        raise ValueError("constant x")
    dy = y - y.mean()
    sxy = dx @ dy
    slope = sxy / sxx
    syy = dy @ dy
    r = 0.0 if syy == 0 else sxy / np.sqrt(sxx * syy)
    return float(slope), float(y.mean() - slope * x.mean()), float(r)


def summarize(records, trial_length_s=TRIAL_LENGTH_S, split_s=BLOCK_SPLIT_S, bin_s=BIN_S,
              long_threshold=LONG_RALLY):
    """
    Block, per-minute and regression summary of one timestamped trial.

    Percentages are regressed on per-minute bins (x = bin midpoint in
    minutes); hits per rally is regressed per episode against its end time
    in minutes.
    """
    if any(r.end_time_s is None for r in records):
        raise ValueError("records are not timestamped")
    hits = np.array([r.hits for r in records])
    ends = np.array([r.end_time_s for r in records])
    first = ends <= split_s
    summary = TrialSummary(
        first=block_stats(hits[first], long_threshold),
        last=block_stats(hits[~first], long_threshold),
    )
    n_bins = int(np.ceil(trial_length_s / bin_s))
    idx = np.clip(np.ceil(ends / bin_s).astype(int) - 1, 0, n_bins - 1)
    summary.bins = [block_stats(hits[idx == b], long_threshold) for b in range(n_bins)]

    if len(records) >= 2 and np.ptp(ends) > 0:
        summary.regression["hits_per_rally"] = linear_regression(ends / 60.0, hits)
    filled = [(b, s) for b, s in enumerate(summary.bins) if s is not None]
    if len(filled) >= 2:
        mid = np.array([(b + 0.5) * bin_s / 60.0 for b, _ in filled])
        for name in ("pct_aces", "pct_long"):
            summary.regression[name] = linear_regression(mid, [s.metric(name) for _, s in filled])
    return summary


def total_entropy(param, axis=0):
    """
    Sum of Shannon entropies of the distributions making up a parameter.

    ``param`` is either an array whose distributions lie along ``axis`` or
    a list of such arrays.
    """
    if isinstance(param, (list, tuple)):
        return float(sum(total_entropy(p, axis) for p in param))
    return float(np.sum(entropy(np.asarray(param, dtype=float), axis=axis)))


def normalize_trace(te):
    """Scale a total-entropy series by its maximum (NTE)."""
    te = np.asarray(te, dtype=float)
    if te.size == 0:
        raise ValueError("empty trace")
    peak = np.max(np.abs(te))
    if peak == 0:
        return np.zeros_like(te)
    return te / peak


def paired_improvement_pvalue(first, last):
    """One-sided paired t-test p-value for ``last > first``; pairs with a missing block are dropped."""
    first = np.asarray(first, dtype=float)
    last = np.asarray(last, dtype=float)
    ok = ~(np.isnan(first) | np.isnan(last))
    if ok.sum() < 2:
        return float("nan")
    d = last[ok] - first[ok]
    if np.all(d == d[0]):
        return 0.0 if d[0] > 0 else 1.0
    return float(stats.ttest_rel(last[ok], first[ok], alternative="greater").pvalue)


def relative_improvement(first, last):
    """``(last - first) / first``; ``None`` when ``first`` is zero or missing."""
    if first is None or last is None or first == 0 or np.isnan(first) or np.isnan(last):
        return None
    return (last - first) / first


def trace_slope(steps, values, total_steps, trial_length_s=TRIAL_LENGTH_S, normalize=True):
    """Regression slope (per minute) of a sampled parameter trace over trial time."""
    steps = np.asarray(steps, dtype=float)
    values = np.asarray(values, dtype=float)
    if normalize:
        values = normalize_trace(values)
    minutes = steps * trial_length_s / total_steps / 60.0
    return linear_regression(minutes, values)[0]
