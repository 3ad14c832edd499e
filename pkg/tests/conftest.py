import pytest

from msk import kernels

BACKENDS = ["python"] + (["cython"] if kernels.compiled is not None else [])

# filled by test_acceptance; echoed in the terminal summary
ACCEPTANCE_LINES = {}


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Run a test once per available kernel backend."""
    mod = kernels.python if request.param == "python" else kernels.compiled
    monkeypatch.setattr(kernels, "backend", mod)
    return request.param


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
