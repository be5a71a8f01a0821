"""Prints one PASS/FAIL line per acceptance criterion at the end of the run."""

import re

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)")


def pytest_terminal_summary(terminalreporter):
    rows = {}
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            m = _CRITERION.search(getattr(rep, "nodeid", ""))
            if not m or rep.when != "call":
                continue
            props = dict(rep.user_properties)
            rows[int(m.group(1))] = (outcome, props.get("title", ""), props.get("detail", ""))
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(rows):
        outcome, title, detail = rows[n]
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {n}: {mark}  {title}  [{detail}]")
