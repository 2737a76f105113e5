import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

ROOT = pathlib.Path(__file__).resolve().parent.parent
DEMO = ROOT / "demo"

_RESULTS = {}


class Recorder:
    def __init__(self, sink):
        self.sink = sink

    def __call__(self, number, title, ok, detail=""):
        self.sink[number] = (title, ok, detail)


@pytest.fixture
def record():
    return Recorder(_RESULTS)


@pytest.fixture
def w0():
    from eventua import load_world

    return load_world((DEMO / "w0.world").read_text())


@pytest.fixture
def w1():
    from eventua import load_world

    return load_world((DEMO / "w1.world").read_text())


@pytest.fixture
def demo_world():
    from eventua import load_world

    return load_world((DEMO / "demo.world").read_text())


def format_result(number, title, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title}"
    return line + (f" ({detail})" if detail else "")


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        terminalreporter.write_line(format_result(number, *_RESULTS[number]))
