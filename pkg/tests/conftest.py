import json

import pytest

from aifpong.harness import preset, read_trial, run_experiment, trial_metrics

ACCEPTANCE_TRIALS = 25
_verdicts = []


class GroupRuns:
    """Runs benchmark groups once per session and caches their summaries."""

    def __init__(self, root):
        self.root = root
        self.cache = {}

    def __call__(self, name, trials=ACCEPTANCE_TRIALS):
        key = (name, trials)
        if key not in self.cache:
            out = self.root / f"{name}_{trials}"
            manifest = run_experiment(preset(name, trials=trials, out_dir=str(out)))
            assert not manifest["failed_trials"]
            summary = json.loads((out / "summary.json").read_text())
            rows = [trial_metrics(read_trial(out, t)) for t in range(trials)]
            self.cache[key] = (summary, rows)
        return self.cache[key]


@pytest.fixture(scope="session")
def group_runs(tmp_path_factory):
    return GroupRuns(tmp_path_factory.mktemp("groups"))


@pytest.fixture
def verdict(request):
    """Record a one-line acceptance verdict printed at the end of the session."""

    def record(number, passed, detail):
        _verdicts.append((number, bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(_verdicts):
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")
