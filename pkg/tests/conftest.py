from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hecke_dominance.catalog import builtin_catalog, expand  # noqa: E402

X_ACCEPT = 10**4

# criterion number -> (passed, description); filled by test_acceptance.py
ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def tables():
    """Every catalog form expanded (and audited) to n = 10^4, keyed by label."""
    return {spec.label: expand(spec, X_ACCEPT) for spec in builtin_catalog()}


@pytest.fixture(scope="session")
def delta(tables):
    return tables["1.12.delta"]


@pytest.fixture(scope="session")
def wt16(tables):
    return tables["1.16.delta_e4"]


@pytest.fixture(scope="session")
def ell11(tables):
    return tables["11.2.eta"]


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path_factory, monkeypatch):
    monkeypatch.setenv("HECKE_DOMINANCE_CACHE", str(tmp_path_factory.getbasetemp() / "cache"))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_RESULTS):
        ok, desc = ACCEPTANCE_RESULTS[num]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {num:>2}: {desc}")
