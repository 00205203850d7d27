from importlib import resources
from pathlib import Path

import pytest

from complaint_anomaly import corpus, ingest
from complaint_anomaly.classify import Dataset
from complaint_anomaly.lexicon import load_lexicon
from complaint_anomaly.quantify import compute_quantities

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def sample_csv():
    return resources.files("complaint_anomaly").joinpath("data/sample_complaints.csv")


@pytest.fixture(scope="session")
def mini_lexicon():
    return load_lexicon(FIXTURES / "mini_lexicon.txt")


@pytest.fixture(scope="session")
def vader():
    return load_lexicon()


@pytest.fixture(scope="session")
def sample_records(sample_csv):
    parsed = ingest.read_complaints(sample_csv)
    return ingest.select_records(parsed.complaints, ingest.load_cpi())


@pytest.fixture(scope="session")
def sample_cleaned(sample_records):
    return corpus.clean_records(sample_records)


@pytest.fixture(scope="session")
def sample_dataset(sample_records, sample_cleaned):
    return Dataset.from_cleaned(sample_cleaned, {r.id: r.merit for r in sample_records})


@pytest.fixture(scope="session")
def sample_quantities(sample_records, sample_cleaned, vader):
    amounts = {r.id: r.adjusted_amount for r in sample_records}
    return compute_quantities(sample_cleaned, amounts, vader)


ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line for an acceptance criterion."""
    results = request.config.stash.setdefault(ACCEPTANCE, {})

    def record(number, title, ok, detail=""):
        results[number] = (title, bool(ok), detail)
        assert ok, f"criterion {number} ({title}) failed: {detail}"

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(ACCEPTANCE, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, ok, detail = results[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {number}. {title}: {detail}")
