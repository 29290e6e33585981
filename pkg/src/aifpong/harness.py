"""
Experiment runner.

A run plays ``trials`` independent trials of ``episodes_per_trial`` serves
each. Trial ``i`` is seeded with ``base_seed + i`` and owns its own
environment, agent and generators, so trials can run in any order or in
parallel and still write identical files.
"""

import csv
import dataclasses
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .aif1 import Aif1Agent
from .analysis import (
    METRICS,
    EpisodeRecord,
    paired_improvement_pvalue,
    relative_improvement,
    summarize,
    timestamp_episodes,
    trace_slope,
)
from .cfl import GAMMA_PRIOR, CflAgent
from .dpefe import DpefeAgent
from .env import Action, PongEnv
from .model import MODALITIES, GenerativeModel

log = logging.getLogger(__name__)

AGENTS = ("aif1", "dp", "cfl", "random")
EPISODE_HEADER = ["trial", "episode", "hits", "steps", "end_time_s", "is_ace"]
TRACE_HEADER = ["trial", "step", "param", "value"]


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    agent: str = "cfl"
    memory: int = 4
    horizon: int = 5
    trials: int = 100
    episodes_per_trial: int = 70
    base_seed: int = 0
    hit_halfwidth: int = 1
    max_steps: int = 2000
    serve_vy: tuple = (-1, 1)
    precision: float = 1.0
    lr: float = 1.0
    eta: float = 1.0
    b_init: float = 1.0
    c_init: float = 1.0
    replan_mode: str = "every_step"
    gamma_prior: float = GAMMA_PRIOR
    cl_init: float = 1.0
    trace_interval: int = 25
    out_dir: str = None

    @property
    def group(self):
        return {
            "aif1": "AIF-1",
            "dp": f"DP-{self.horizon}",
            "cfl": f"CFL-{self.memory}",
            "random": "RANDOM",
        }[self.agent]

    def validate(self):
        bad = []
        if self.agent not in AGENTS:
            bad.append(f"agent: must be one of {', '.join(AGENTS)}")
        for name in ("memory", "horizon", "trials", "episodes_per_trial", "max_steps",
                     "trace_interval"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 1:
                bad.append(f"{name}: must be an integer >= 1")
        if not 0 <= self.hit_halfwidth <= 7:
            bad.append("hit_halfwidth: must be in [0, 7]")
        if not self.serve_vy or any(v not in (-1, 0, 1) for v in self.serve_vy):
            bad.append("serve_vy: must be a non-empty subset of {-1, 0, 1}")
        for name in ("precision", "lr", "eta", "b_init", "c_init", "cl_init"):
            if not getattr(self, name) > 0:
                bad.append(f"{name}: must be positive")
        if self.replan_mode not in ("every_step", "per_episode"):
            bad.append("replan_mode: must be every_step or per_episode")
        if bad:
            raise ConfigError("invalid config: " + "; ".join(bad))
        return self

    def to_dict(self):
        d = dataclasses.asdict(self)
        d["serve_vy"] = list(self.serve_vy)
        return d

    @classmethod
    def from_dict(cls, data):
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise ConfigError(f"unknown config fields: {', '.join(unknown)}")
        data = dict(data)
        if "serve_vy" in data:
            data["serve_vy"] = tuple(data["serve_vy"])
        return cls(**data)

    @classmethod
    def from_file(cls, path):
        with open(path) as f:
            return cls.from_dict(json.load(f))


PRESETS = {
    "AIF-1": dict(agent="aif1"),
    **{f"DP-{T}": dict(agent="dp", horizon=T) for T in (2, 5, 10, 15)},
    **{f"CFL-{T}": dict(agent="cfl", memory=T) for T in (1, 2, 3, 4, 16, 32)},
}


def preset(name, **overrides):
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    return ExperimentConfig(**{**PRESETS[name], **overrides}).validate()


class RandomAgent:
    """Uniform random paddle; the untrained baseline."""

    name = "RANDOM"

    def start_episode(self, obs):
        pass

    def act(self, obs, rng):
        return Action(int(rng.integers(len(Action))))

    def learn(self, nxt, fb):
        pass

    def end_episode(self):
        pass


def make_agent(config):
    c = config
    if c.agent == "cfl":
        return CflAgent(c.memory, precision=c.precision, gamma_prior=c.gamma_prior,
                        init_count=c.cl_init)
    if c.agent == "random":
        return RandomAgent()
    model = GenerativeModel(b_init=c.b_init, c_init=c.c_init)
    if c.agent == "aif1":
        return Aif1Agent(model, precision=c.precision, lr=c.lr, eta=c.eta)
    return DpefeAgent(c.horizon, model, precision=c.precision, lr=c.lr, eta=c.eta,
                      replan_mode=c.replan_mode)


@dataclass
class TrialResult:
    trial: int
    seed: int
    records: list
    traces: list = field(default_factory=list)  # (step, param, value)

    @property
    def total_steps(self):
        return sum(r.steps for r in self.records)

    def trace(self, param):
        rows = [(s, v) for s, p, v in self.traces if p == param]
        steps, values = zip(*rows) if rows else ((), ())
        return np.array(steps, dtype=float), np.array(values, dtype=float)


def _sample_params(agent, step, gamma_window):
    rows = []
    model = getattr(agent, "model", None)
    if model is not None:
        rows.append((step, "TE_B", model.b_entropy()))
        rows.extend((step, f"TE_B_{name}", model.b_entropy(m)) for m, name in enumerate(MODALITIES))
        rows.append((step, "TE_C", model.c_entropy()))
        rows.extend((step, f"TE_C_{name}", model.c_entropy(m)) for m, name in enumerate(MODALITIES))
    if isinstance(agent, CflAgent):
        rows.append((step, "TE_CL", agent.total_entropy()))
        gamma = float(np.mean(gamma_window)) if len(gamma_window) else agent.gamma_prior
        rows.append((step, "gamma", gamma))
    return rows


def run_trial(config, seed, trial=0):
    """
    Play one trial.

    The agent keeps learning across episodes. Parameter traces are sampled
    before the first step and then every ``trace_interval`` steps; the
    ``gamma`` trace is the mean of the per-step mean memory risk over the
    preceding interval.
    """
    config.validate()
    env_rng, agent_rng = (np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(2))
    env = PongEnv(env_rng, hit_halfwidth=config.hit_halfwidth, max_steps=config.max_steps,
                  serve_vy=config.serve_vy)
    agent = make_agent(config)
    records, traces = [], []
    step, mark = 0, 0
    traces.extend(_sample_params(agent, 0, []))
    for episode in range(config.episodes_per_trial):
        obs = env.reset()
        agent.start_episode(obs)
        done = False
        while not done:
            u = agent.act(obs, agent_rng)
            obs, fb, done = env.step(u)
            agent.learn(obs, fb)
            step += 1
            if step % config.trace_interval == 0:
                window = getattr(agent, "gamma_history", [])[mark:]
                traces.extend(_sample_params(agent, step, window))
                mark = step
        agent.end_episode()
        records.append(EpisodeRecord(episode, env.hits, env.steps))
    return TrialResult(trial, seed, timestamp_episodes(records), traces)


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_trial(result, out_dir):
    out_dir = Path(out_dir)
    ep_path = out_dir / f"trial_{result.trial:03d}_episodes.csv"
    tr_path = out_dir / f"trial_{result.trial:03d}_traces.csv"
    with open(ep_path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(EPISODE_HEADER)
        for r in result.records:
            w.writerow([_fmt(v) for v in (result.trial, r.episode_index, r.hits, r.steps,
                                           r.end_time_s, r.is_ace)])
    with open(tr_path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for step, param, value in result.traces:
            w.writerow([_fmt(v) for v in (result.trial, step, param, value)])
    return [ep_path.name, tr_path.name]


def read_trial(out_dir, trial):
    """Load a trial back from its CSV files."""
    out_dir = Path(out_dir)
    with open(out_dir / f"trial_{trial:03d}_episodes.csv") as f:
        rows = list(csv.DictReader(f))
    records = [EpisodeRecord(int(r["episode"]), int(r["hits"]), int(r["steps"]),
                             float(r["end_time_s"])) for r in rows]
    traces = []
    path = out_dir / f"trial_{trial:03d}_traces.csv"
    if path.exists():
        with open(path) as f:
            traces = [(int(r["step"]), r["param"], float(r["value"])) for r in csv.DictReader(f)]
    return TrialResult(trial, None, records, traces)


def _trial_job(args):
    config, seed, trial = args
    result = run_trial(config, seed, trial)
    files = write_trial(result, config.out_dir) if config.out_dir else []
    return trial, files


def n_workers(trials):
    env = os.environ.get("AIFPONG_THREADS")
    cap = int(env) if env else (os.cpu_count() or 1)
    return max(1, min(cap, trials))


def run_experiment(config, workers=None):
    """
    Run every trial, write per-trial CSVs, the summary and ``manifest.json``.

    Returns the manifest dictionary. Failed trials are listed under
    ``failed_trials`` rather than aborting the run.
    """
    config.validate()
    if config.out_dir is None:
        raise ConfigError("out_dir: required for run_experiment")
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    seeds = [config.base_seed + i for i in range(config.trials)]
    jobs = [(config, s, i) for i, s in enumerate(seeds)]
    workers = n_workers(config.trials) if workers is None else workers
    started = time.time()
    files, failed = [], []

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_trial_job, job) for job in jobs]
            outcomes = []
            for i, fut in enumerate(futures):
                try:
                    outcomes.append((i, fut.result()[1]))
                except Exception:
                    log.exception("trial %d failed", i)
                    failed.append(i)
    else:
        outcomes = []
        for i, job in enumerate(jobs):
            try:
                outcomes.append((i, _trial_job(job)[1]))
            except Exception:
                log.exception("trial %d failed", i)
                failed.append(i)
    for _, names in outcomes:
        files.extend(names)

    manifest = {
        "config": config.to_dict(),
        "group": config.group,
        "seeds": seeds,
        "version": __version__,
        "started": started,
        "elapsed_s": time.time() - started,
        "workers": workers,
        "files": sorted(files),
        "failed_trials": sorted(failed),
    }
    if len(failed) < config.trials:
        files.extend(emit_summary(manifest, out))
        manifest["files"] = sorted(files)
    with open(out / "manifest.json", "w") as f:
        json.dump(manifest, f, indent=2)
    return manifest


def _mean_sd(values):
    v = np.array([x for x in values if x is not None and not np.isnan(x)], dtype=float)
    if v.size == 0:
        return None, None
    return float(v.mean()), (float(v.std(ddof=1)) if v.size > 1 else None)


def trial_metrics(result):
    """Per-trial block metrics, regression slopes and parameter-trace slopes."""
    s = summarize(result.records)
    row = {}
    for m in METRICS:
        row[f"first_{m}"] = s.first.metric(m) if s.first else None
        row[f"last_{m}"] = s.last.metric(m) if s.last else None
        row[f"slope_{m}"] = s.regression[m][0] if m in s.regression else None
    total = result.total_steps
    for param in sorted({p for _, p, _ in result.traces}):
        steps, values = result.trace(param)
        if len(steps) >= 2:
            row[f"trace_slope_{param}"] = trace_slope(steps, values, total,
                                                       normalize=param != "gamma")
    return row


def _nan(values):
    return [np.nan if v is None else v for v in values]


def _p_improvement(metric, first, last):
    # fewer aces is better
    if metric == "pct_aces":
        return paired_improvement_pvalue(_nan(last), _nan(first))
    return paired_improvement_pvalue(_nan(first), _nan(last))


def aggregate(rows, group):
    """Across-trial means, sds, paired tests and relative improvements."""
    summary = {"group": group, "n_trials": len(rows), "metrics": {}, "trace_slopes": {}}
    for m in METRICS:
        first = [r[f"first_{m}"] for r in rows]
        last = [r[f"last_{m}"] for r in rows]
        f_mean, f_sd = _mean_sd(first)
        l_mean, l_sd = _mean_sd(last)
        s_mean, s_sd = _mean_sd([r[f"slope_{m}"] for r in rows])
        summary["metrics"][m] = {
            "first_mean": f_mean, "first_sd": f_sd,
            "last_mean": l_mean, "last_sd": l_sd,
            "relative_improvement": relative_improvement(f_mean, l_mean),
            "p_improvement": _p_improvement(m, first, last) if len(rows) > 1 else None,
            "slope_mean": s_mean, "slope_sd": s_sd,
        }
    params = sorted({k[len("trace_slope_"):] for r in rows for k in r if k.startswith("trace_slope_")})
    for p in params:
        vals = [r.get(f"trace_slope_{p}") for r in rows]
        mean, sd = _mean_sd(vals)
        vals = [v for v in vals if v is not None]
        summary["trace_slopes"][p] = {
            "mean": mean, "sd": sd,
            "frac_negative": float(np.mean([v < 0 for v in vals])) if vals else None,
        }
    return summary


def _cell(value):
    return "" if value is None else _fmt(value)


def emit_summary(manifest, out_dir):
    """Write ``summary.csv`` and ``summary.json`` for a completed run; returns file names."""
    out = Path(out_dir)
    n = len(manifest["seeds"])
    trials = [t for t in range(n) if t not in set(manifest.get("failed_trials", []))]
    rows = [trial_metrics(read_trial(out, t)) for t in trials]
    summary = aggregate(rows, manifest["group"])
    with open(out / "summary.json", "w") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
    with open(out / "summary.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        cols = ["first_mean", "first_sd", "last_mean", "last_sd", "relative_improvement",
                "p_improvement", "slope_mean", "slope_sd"]
        w.writerow(["group", "metric"] + cols)
        for m, stats_ in summary["metrics"].items():
            w.writerow([summary["group"], m] + [_cell(stats_[c]) for c in cols])
        for p, stats_ in summary["trace_slopes"].items():
            w.writerow([summary["group"], f"trace_slope_{p}", "", "", "", "", "", "",
                        _cell(stats_["mean"]), _cell(stats_["sd"])])
    return ["summary.csv", "summary.json"]


def summarize_dir(out_dir):
    """Recompute the summary of a finished run directory from its manifest."""
    with open(Path(out_dir) / "manifest.json") as f:
        manifest = json.load(f)
    emit_summary(manifest, out_dir)
    with open(Path(out_dir) / "summary.json") as f:
        return json.load(f)
