import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_instance(rng, n_lo=2, n_hi=12):
    n = int(rng.integers(n_lo, n_hi + 1))
    q = rng.normal(size=n)
    t = float(rng.uniform(1.0 / n, 1.0))
    return q, t


_ACCEPTANCE = {}


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line per acceptance criterion.

    The test calls ``acceptance(passed, detail)`` before asserting; a test that
    errors out first is reported as FAIL.
    """
    label = request.node.name
    state = {}

    def record(passed, detail):
        state["line"] = ("PASS" if passed else "FAIL", detail)

    yield record
    _ACCEPTANCE[label] = state.get("line", ("FAIL", "did not finish"))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_ACCEPTANCE):
        verdict, detail = _ACCEPTANCE[label]
        terminalreporter.write_line(f"{verdict}  {label}: {detail}")
