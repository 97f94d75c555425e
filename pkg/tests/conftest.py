import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))


def pytest_addoption(parser):
    parser.addoption("--run-slow", action="store_true", help="run full-scale benchmarks")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow") or os.environ.get("SPMOR_LONG") == "1":
        return
    skip = pytest.mark.skip(reason="full-scale run; use --run-slow or SPMOR_LONG=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def ex1d():
    from spmor.benchmarks import example_1d

    return example_1d()


ACCEPTANCE = []


@pytest.fixture
def criterion():
    """Record one acceptance line: ``criterion(name, ok, detail)``."""

    def record(name, ok, detail=""):
        ACCEPTANCE.append((name, bool(ok), detail))
        return bool(ok)

    return record


def pytest_terminal_summary(terminalreporter):
    gated = [r.nodeid for r in terminalreporter.stats.get("skipped", []) if "test_acceptance" in r.nodeid]
    if not ACCEPTANCE and not gated:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
    for nodeid in gated:
        terminalreporter.write_line(f"SKIP  {nodeid.split('::')[-1]}  (gated: --run-slow or SPMOR_LONG=1)")
