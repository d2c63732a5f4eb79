from __future__ import annotations

import pytest

import support


@pytest.fixture(params=support.INSTANCE_NAMES)
def name(request) -> str:
    return request.param


@pytest.fixture(scope="session")
def evena():
    return support.instance("evena")


def pytest_terminal_summary(terminalreporter) -> None:
    if not support.ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(support.ACCEPTANCE):
        ok, detail = support.ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
