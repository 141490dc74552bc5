from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

DATA = Path(__file__).parent / "data"

_criteria: dict[str, str] = {}


@pytest.fixture(scope="session")
def mutag_dir() -> Path:
    return DATA / "MUTAG"


@pytest.fixture
def record():
    """Store a one-line verdict for an acceptance criterion."""

    def _record(key: str, ok: bool | None, detail: str) -> bool | None:
        verdict = {True: "PASS", False: "FAIL", None: "SKIP"}[ok]
        _criteria[key] = f"{key}: {verdict} - {detail}"
        print(_criteria[key])
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_criteria, key=lambda k: int(k.split()[1].rstrip("ab"))):
        terminalreporter.write_line(_criteria[key])
