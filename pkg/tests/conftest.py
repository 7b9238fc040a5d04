from __future__ import annotations

import shutil

import pytest

from octocut import cutfamily, datafiles


@pytest.fixture(scope="session")
def symbolic_cut():
    return cutfamily.symbolic_cut()


@pytest.fixture(scope="session")
def plain_reference():
    return cutfamily.reference_system("plain")


@pytest.fixture(scope="session")
def c3_reference():
    return cutfamily.reference_system("c3")


@pytest.fixture
def data_copy(tmp_path):
    """A writable copy of the bundled data directory."""
    target = tmp_path / "data"
    shutil.copytree(datafiles.DATA_DIR, target)
    return target


def pytest_terminal_summary(terminalreporter):
    import acceptance_log

    if not acceptance_log.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(acceptance_log.LINES):
        terminalreporter.write_line(acceptance_log.LINES[k])
