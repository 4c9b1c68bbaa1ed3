import json
import sys
from pathlib import Path

import pytest

from kgcode.codec import clear_cache
from kgcode.core import geometric
from kgcode.piclass import EnumeratedClass

FIXTURES = Path(__file__).parent / "fixtures"
sys.path.insert(0, str(Path(__file__).parent))

# filled by the acceptance tests, printed at the end of the session
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def golden_schedule():
    return geometric(2)


@pytest.fixture
def golden_class():
    return EnumeratedClass.load(FIXTURES / "golden_class.tsv")


@pytest.fixture
def golden_lines():
    return (FIXTURES / "golden_trace.jsonl").read_text(encoding="utf-8").splitlines()


@pytest.fixture
def fault_fixtures():
    return json.loads((FIXTURES / "faults.json").read_text(encoding="utf-8"))


@pytest.fixture(autouse=True)
def _fresh_codec_cache():
    clear_cache()
    yield
    clear_cache()
