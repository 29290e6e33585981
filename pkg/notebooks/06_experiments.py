"""
Running and summarizing experiments
===================================

The harness plays seeded trials, writes per-trial CSV files and a summary
comparing the first five minutes of each trial with the last fifteen.
The same runs are available from the command line:

    aifpong run --preset CFL-4 --trials 10 --out runs/CFL-4
    aifpong compare runs/CFL-4 runs/CFL-1
"""

import json
import tempfile
from pathlib import Path

from aifpong.analysis import summarize
from aifpong.cli import compare
from aifpong.harness import preset, run_experiment, run_trial

# one trial in memory
result = run_trial(preset("CFL-4"), seed=0)
s = summarize(result.records)
print("first block:", s.first)
print("last block:", s.last)
print("hits-per-rally slope per minute:", s.regression["hits_per_rally"][0])

# a small experiment on disk
out = Path(tempfile.mkdtemp())
dirs = []
for name in ("CFL-1", "CFL-4"):
    run_experiment(preset(name, trials=5, out_dir=str(out / name)))
    dirs.append(out / name)
compare(dirs)
summary = json.loads((out / "CFL-4" / "summary.json").read_text())
print("CFL-4 trace slopes:", json.dumps(summary["trace_slopes"], indent=1))
