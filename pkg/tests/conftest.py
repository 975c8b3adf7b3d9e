import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from untrans.annotate import annotate_corpus  # noqa: E402
from untrans.features import FeatureConfig, Resources  # noqa: E402
from untrans.model import TrainConfig, train  # noqa: E402
from untrans.features import gold_examples  # noqa: E402
from untrans.sample_data import planted_dataset, snowpack_pronunciations, snowpack_talk  # noqa: E402


@pytest.fixture
def snowpack():
    return snowpack_talk()


@pytest.fixture
def annotated_snowpack(snowpack):
    talk, dictionary, human = snowpack
    return annotate_corpus([talk], dictionary, human)


@pytest.fixture(scope="session")
def planted():
    return planted_dataset()


@pytest.fixture(scope="session")
def planted_model(planted):
    talks, resources = planted
    cfg = FeatureConfig()
    ex = [(v, y) for v, y, _ in gold_examples(talks[:4], "B", cfg, resources)]
    return train(ex, TrainConfig(C=1.0)), cfg, resources


@pytest.fixture
def snowpack_resources(snowpack):
    _, dictionary, _ = snowpack
    from untrans.corpus import FrequencyTable

    freq = FrequencyTable({"california": 10 ** 7, "percent": 10 ** 8, "decline": 10 ** 6,
                           "sierra": 10 ** 5, "snowpack": 10 ** 2, "the": 10 ** 9})
    return Resources(freq, dictionary, snowpack_pronunciations())


# one pass/fail line per acceptance criterion

_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _ACCEPTANCE[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _ACCEPTANCE.items():
        verdict = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}.get(outcome, outcome.upper())
        terminalreporter.write_line(f"{verdict:5} {name}")
