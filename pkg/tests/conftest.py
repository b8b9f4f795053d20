from __future__ import annotations

from collections import OrderedDict

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=100, deadline=None)
settings.load_profile("default")

_criteria: "OrderedDict[str, dict]" = OrderedDict()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(key, title): acceptance criterion the test belongs to")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            key, title = mark.args
            entry = _criteria.setdefault(key, {"title": title, "passed": 0, "failed": []})
            item.user_properties.append(("criterion", key))


def pytest_runtest_logreport(report):
    key = dict(report.user_properties).get("criterion")
    if key is None:
        return
    entry = _criteria[key]
    if report.when == "call" and report.passed:
        entry["passed"] += 1
    elif report.failed:
        entry["failed"].append(report.nodeid.split("::", 1)[-1])


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for key in sorted(_criteria, key=lambda k: int(k)):
        e = _criteria[key]
        status = "FAIL" if e["failed"] else ("PASS" if e["passed"] else "NOT RUN")
        line = f"criterion {key} [{status}] {e['title']} ({e['passed']} checks passed, {len(e['failed'])} failed)"
        tr.write_line(line)
        for name in e["failed"]:
            tr.write_line(f"    failed: {name}")


@pytest.fixture(scope="session")
def reference():
    from causalabs.scenarios import build_reference_models, chain_abstraction

    models = build_reference_models()
    return models, chain_abstraction()


@pytest.fixture(scope="session")
def health():
    from causalabs.scenarios import build_health_scenario

    return build_health_scenario()


@pytest.fixture(scope="session")
def lungcancer():
    from causalabs.scenarios import build_lungcancer_scenario

    return build_lungcancer_scenario()
