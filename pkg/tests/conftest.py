"""Acceptance bookkeeping: one PASS/FAIL line per criterion after the run."""

import pytest

_criteria: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n, text): test is a check of acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    # a failing setup (fixture) counts against the criterion as well
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        n, text = mark.args
        _criteria.setdefault(n, [text, []])[1].append((item.name, rep.passed))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_criteria):
        text, checks = _criteria[n]
        passed = sum(ok for _, ok in checks)
        verdict = "PASS" if passed == len(checks) else "FAIL"
        tr.write_line(f"{verdict} criterion {n}: {text} ({passed}/{len(checks)} checks)")
        for name, ok in checks:
            if not ok:
                tr.write_line(f"     failed check: {name}")
