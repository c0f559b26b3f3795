import os
from collections import defaultdict

import hypothesis
import numpy as np
import pytest

hypothesis.settings.register_profile("default", max_examples=100, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_criteria = {}
_outcomes = defaultdict(list)
_notes = []


@pytest.fixture
def rng():
    return np.random.default_rng(20180)


@pytest.fixture
def acceptance_note():
    """Append a line to the acceptance summary printed at the end of the run."""
    return _notes.append


def pytest_runtest_logreport(report):
    marker = _criteria.get(report.nodeid)
    if marker is None:
        return
    if report.when == "call" or report.failed:
        _outcomes[marker].append(report.outcome)


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            _criteria[item.nodeid] = (m.args[0], m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for (number, text), outcomes in sorted(_outcomes.items()):
        ok = all(o == "passed" for o in outcomes)
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {text}")
    if _notes:
        terminalreporter.write_line("")
        for line in _notes:
            terminalreporter.write_line(line)
