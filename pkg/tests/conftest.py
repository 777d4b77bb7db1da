"""Acceptance reporting: one PASS/FAIL/SKIP line per numbered criterion.

Tests opt in with ``@pytest.mark.criterion(n, "title")``. Several tests may
share a number; the criterion fails if any of them fails and is skipped only
if all of them were skipped. Substitute checks on synthetic graphs use keys
such as ``"8-proxy"`` so they are reported next to, never instead of, the
criterion they stand in for.
"""

from collections import defaultdict

import pytest

_results = defaultdict(list)
_titles = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    # setup failures/skips never reach the call phase
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        number, title = marker.args
        _titles[number] = title
        reason = ""
        if rep.skipped and isinstance(rep.longrepr, tuple):
            reason = rep.longrepr[2].removeprefix("Skipped: ")
        _results[number].append((item.name, rep.outcome, reason, rep.duration))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_results, key=lambda k: (int(str(k).split("-")[0]), str(k))):
        runs = _results[number]
        outcomes = [o for _, o, _, _ in runs]
        if "failed" in outcomes:
            status = "FAIL"
        elif "passed" in outcomes:
            status = "PASS"
        else:
            status = "SKIP"
        seconds = sum(d for _, _, _, d in runs)
        counts = ", ".join(f"{outcomes.count(o)} {o}" for o in ("passed", "failed", "skipped") if o in outcomes)
        tr.write_line(f"criterion {number!s:<8} {status:<4} {_titles[number]} [{counts}; {seconds:.2f}s]")
        for name, outcome, reason, _ in runs:
            if outcome != "passed":
                tr.write_line(f"    {outcome}: {name}" + (f" ({reason})" if reason else ""))
