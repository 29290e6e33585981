"""
Acceptance suite. Each test records a one-line PASS/FAIL verdict printed
in the terminal summary. Group comparisons use 25 trials of 70 episodes.
"""

import filecmp
import time

import numpy as np
import pytest

from _oracles import best_policy, random_deterministic_pomdp
from aifpong.analysis import total_entropy
from aifpong.cfl import CflAgent
from aifpong.dpefe import plan_dense
from aifpong.harness import PRESETS, preset, run_experiment
from aifpong.prob import entropy, kl_divergence, normalize, softmax

pytestmark = pytest.mark.slow


def test_c1_dpefe_matches_enumeration(verdict):
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    matched = total = 0
    worst = 0.0
    for _ in range(200):
        B, C, nxt = random_deterministic_pomdp(rng, max_states=6, max_actions=3)
        T = int(rng.integers(1, 5))
        table = plan_dense(B, C, T, precision=np.inf)
        for s in range(B.shape[1]):
            first, _ = best_policy(nxt, C, s, T)
            dp_action = int(np.argmax(table.q_action[0][:, s]))
            matched += dp_action == first
            total += 1
            for u in range(B.shape[0]):
                # enumerated cost of the best policy that starts with u
                cost = _best_cost_from(nxt, C, s, T, u)
                worst = max(worst, abs(table.G[0][u, s] - cost))
    elapsed = time.perf_counter() - start
    ok = verdict(1, matched == total and worst < 1e-9 and elapsed < 60,
                 f"root action match {matched}/{total}, max |dG| {worst:.1e}, {elapsed:.1f}s")
    assert ok


def _best_cost_from(nxt, C, s, T, u):
    n = nxt.shape[1]
    step = kl_divergence(np.eye(n)[nxt[u, s]], C)
    if T == 1:
        return step
    return step + best_policy(nxt, C, int(nxt[u, s]), T - 1)[1]


def test_c2_cfl_learning_trend(group_runs, verdict):
    start = time.perf_counter()
    s4, _ = group_runs("CFL-4")
    s1, _ = group_runs("CFL-1")
    elapsed = time.perf_counter() - start
    m4, m1 = s4["metrics"]["hits_per_rally"], s1["metrics"]["hits_per_rally"]
    gain4 = m4["last_mean"] - m4["first_mean"]
    gain1 = m1["last_mean"] - m1["first_mean"]
    ok = verdict(2, m4["p_improvement"] < 0.05 and gain1 < gain4 and elapsed < 600,
                 f"CFL-4 {m4['first_mean']:.3f} -> {m4['last_mean']:.3f} "
                 f"(p={m4['p_improvement']:.1e}); gain CFL-1 {gain1:.3f} < CFL-4 {gain4:.3f}")
    assert ok


def test_c3_memory_horizon_ordering(group_runs, verdict):
    names = ["CFL-1", "CFL-2", "CFL-4", "CFL-16"]
    last = [group_runs(n)[0]["metrics"]["hits_per_rally"]["last_mean"] for n in names]
    inversions = sum(b < a for a, b in zip(last, last[1:]))
    ok = verdict(3, inversions <= 1,
                 "last-block hits " + ", ".join(f"{n}={v:.3f}" for n, v in zip(names, last))
                 + f"; {inversions} inversion(s)")
    assert ok


def test_c4_aif1_flat(group_runs, verdict):
    m = group_runs("AIF-1")[0]["metrics"]["hits_per_rally"]
    ok = verdict(4, m["p_improvement"] >= 0.05,
                 f"AIF-1 {m['first_mean']:.3f} -> {m['last_mean']:.3f} (p={m['p_improvement']:.3f})")
    assert ok


def test_c5_over_planning(group_runs, verdict):
    dp5 = group_runs("DP-5")[0]["metrics"]["hits_per_rally"]["last_mean"]
    dp15 = group_runs("DP-15")[0]["metrics"]["hits_per_rally"]["last_mean"]
    ok = verdict(5, dp15 <= dp5, f"last-block hits DP-15={dp15:.3f} vs DP-5={dp5:.3f}")
    assert ok


def test_c6_explainability_traces(group_runs, verdict):
    cfl = group_runs("CFL-4")[0]["trace_slopes"]
    dp5 = group_runs("DP-5")[0]["trace_slopes"]
    aif = group_runs("AIF-1")[0]["trace_slopes"]
    fracs = {
        "CFL-4 NTE(CL)": cfl["TE_CL"]["frac_negative"],
        "CFL-4 gamma": cfl["gamma"]["frac_negative"],
        "DP-5 NTE(B)": dp5["TE_B"]["frac_negative"],
        "AIF-1 NTE(B)": aif["TE_B"]["frac_negative"],
    }
    # recorded only: direction of the preference entropy
    c_dir = {k: v["TE_C"]["mean"] for k, v in (("DP-5", dp5), ("AIF-1", aif))}
    ok = verdict(6, all(f >= 0.8 for f in fracs.values()),
                 ", ".join(f"{k} {v:.0%} negative" for k, v in fracs.items())
                 + "; mean NTE(C) slope " + ", ".join(f"{k} {v:+.4f}" for k, v in c_dir.items()))
    assert ok


def test_c7_probability_kernels(verdict):
    rng = np.random.default_rng(7)
    n = 10_000
    start = time.perf_counter()
    k = rng.integers(2, 40, size=n)
    worst_norm = worst_kl = worst_cl = 0.0
    entropy_ok = True
    for i in range(n):
        counts = rng.gamma(0.5, size=k[i]) * 10.0 ** rng.uniform(-8, 8)
        p = normalize(counts)
        worst_norm = max(worst_norm, abs(p.sum() - 1))
        h = entropy(p)
        entropy_ok &= -1e-12 <= h <= np.log(k[i]) + 1e-12
        q = normalize(rng.gamma(0.5, size=k[i]) + 1e-300)
        worst_kl = min(worst_kl, kl_divergence(p, q))
        col = rng.gamma(1.0, size=3) * 10.0 ** rng.uniform(-10, 10, size=3)
        col = np.maximum(col, 1e-16)
        worst_cl = max(worst_cl, np.abs(softmax(np.log(col)) - col / col.sum()).max())
    elapsed = time.perf_counter() - start
    ok = verdict(7, worst_norm <= 1e-12 and worst_kl >= -1e-12 and worst_cl <= 1e-12
                 and entropy_ok,
                 f"{n} cases each: max |sum-1| {worst_norm:.1e}, min KL {worst_kl:.1e}, "
                 f"max softmax(ln) gap {worst_cl:.1e}, entropy bounds {'ok' if entropy_ok else 'violated'}, "
                 f"{elapsed:.1f}s")
    assert ok


def test_c8_sweep_determinism(tmp_path, verdict):
    differing = []
    compared = 0
    for name in PRESETS:
        dirs = []
        for rep in ("a", "b"):
            out = tmp_path / rep / name
            run_experiment(preset(name, trials=2, episodes_per_trial=3, out_dir=str(out)))
            dirs.append(out)
        for csv in sorted(p.name for p in dirs[0].glob("*.csv")):
            compared += 1
            if not filecmp.cmp(dirs[0] / csv, dirs[1] / csv, shallow=False):
                differing.append(f"{name}/{csv}")
    ok = verdict(8, not differing and compared > 0,
                 f"{compared} CSV files across {len(PRESETS)} presets, {len(differing)} differ")
    assert ok


def test_c9_fresh_cl_entropy(verdict):
    agent = CflAgent(4)
    te = total_entropy(agent.policy())
    expected = 2432 * np.log(3)
    ok = verdict(9, abs(te - expected) <= 1e-9 and abs(agent.total_entropy() - expected) <= 1e-9,
                 f"TE={te:.10f}, 2432 ln 3={expected:.10f}")
    assert ok
