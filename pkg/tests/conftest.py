import numpy as np
import pytest

from seedlex.synthetic import SyntheticWorldConfig, generate_world


@pytest.fixture
def write(tmp_path):
    """Write text to a fresh file under tmp_path and return its path."""
    counter = iter(range(10_000))

    def _write(text, name=None):
        path = tmp_path / (name or f"f{next(counter)}.txt")
        path.write_text(text, encoding="utf-8")
        return path

    return _write


@pytest.fixture(scope="session")
def small_world():
    return generate_world(SyntheticWorldConfig(vocab_size=1000, dim=20, dict_train=300, dict_test=100, seed=3))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# Acceptance criteria outcomes, reported after the run as one line each.
_CRITERIA = {}


class _Criterion:
    def __init__(self, number, title):
        self.number, self.title = number, title

    def __enter__(self):
        _CRITERIA.setdefault(self.number, [self.title, True])
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is not None:
            _CRITERIA[self.number][1] = False
        return False


@pytest.fixture
def criterion():
    """``with criterion(3, "title"):`` marks criterion 3 failed if the block raises."""
    return _Criterion


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA, key=lambda n: (int(str(n).rstrip("abcd")), str(n))):
        title, ok = _CRITERIA[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {number}: {title}")
