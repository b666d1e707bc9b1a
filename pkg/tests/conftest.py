from __future__ import annotations

import pytest
from hypothesis import settings

from almostnormal.cli import Context
from almostnormal.config import bundled_config_text, parse_config

# no deadline since some examples build coset actions of S4; derandomized for reproducible runs
settings.register_profile("default", deadline=None, derandomize=True)
settings.load_profile("default")

# filled by tests/test_acceptance.py, printed once at the end of the session
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])


def bundled_context(name: str, **overrides) -> Context:
    return Context(parse_config(bundled_config_text(name), overrides))


@pytest.fixture(scope="session")
def dihedral_ctx() -> Context:
    return bundled_context("dihedral")


@pytest.fixture(scope="session")
def zxa5_ctx() -> Context:
    return bundled_context("zxa5")
