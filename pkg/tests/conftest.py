import sys
from pathlib import Path

import pytest

from boolnet import kernels

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    """Run the test once per available dynamics backend."""
    previous = kernels.use_backend(request.param)
    yield request.param
    kernels.use_backend(previous)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for fn in mod.CRITERIA:
        if fn.key in results:
            terminalreporter.write_line(mod.format_line(fn.key, *results[fn.key]))
