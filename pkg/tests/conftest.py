import pathlib

import pytest

from rrkit import Device, PopulationModel, SupportSpec

REPO_ROOT = pathlib.Path(__file__).resolve().parent.parent
SURVEY_DIR = REPO_ROOT / "surveys"

ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = []


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line per acceptance criterion for the run summary."""
    lines = request.config.stash[ACCEPTANCE_KEY]

    def report(num: int, ok: bool, detail: str) -> None:
        line = f"{'PASS' if ok else 'FAIL'} criterion {num}: {detail}"
        lines.append(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash[ACCEPTANCE_KEY]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture
def support2():
    return SupportSpec(values=(0.0, 1.0), stigma=(True, True))


@pytest.fixture
def support3():
    return SupportSpec(values=(0.0, 1.0, 2.0), stigma=(True, True, True))


@pytest.fixture
def pop2():
    return PopulationModel(pi=(0.3, 0.7))


@pytest.fixture
def pop3():
    return PopulationModel(pi=(0.5, 0.3, 0.2))


@pytest.fixture
def device_half2():
    return Device(p=0.5, m=2)


@pytest.fixture
def device_half3():
    return Device(p=0.5, m=3)


@pytest.fixture
def survey_all_stig_m4():
    return SURVEY_DIR / "all_stigmatizing_m4.json"


@pytest.fixture
def survey_one_nonstig_m3():
    return SURVEY_DIR / "one_nonstigmatizing_m3.json"
