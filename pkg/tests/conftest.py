import pytest

from hlrs import _backend

import acceptance_log


@pytest.fixture(params=_backend.available())
def backend(request):
    """Run the test once per available kernel backend."""
    previous = _backend.name
    _backend.set_backend(request.param)
    yield request.param
    _backend.set_backend(previous)


@pytest.fixture(scope="session")
def mixing_laws():
    from hlrs import leroy

    return {beta: leroy.build_mixing_law(beta, use_cache=False) for beta in (0.3, 0.5, 0.6, 0.7, 0.9)}


def pytest_report_header(config):
    return f"hlrs kernel backends: {', '.join(_backend.available())} (default {_backend.name})"


def pytest_terminal_summary(terminalreporter):
    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(acceptance_log.LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
