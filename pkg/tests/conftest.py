import numpy as np
import pytest

from qhypo.model import Hypothesis, two_level_pair


def random_hermitian(rng, d, scale=1.0):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return scale * (a + a.conj().T) / 2


def random_matrix(rng, d, scale=1.0):
    return scale * (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))


def random_state(rng, d):
    psi = rng.normal(size=d) + 1j * rng.normal(size=d)
    return psi / np.linalg.norm(psi)


def random_hypothesis(rng, d, n_channels=1, label="random"):
    return Hypothesis(
        label,
        random_hermitian(rng, d),
        tuple(random_matrix(rng, d, 0.5) for _ in range(n_channels)),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def driven_pair():
    """Undriven vs Rabi frequency 4 kappa, shared decay kappa = 1, start in |g>."""
    return two_level_pair(0.0, 4.0)


# acceptance criteria: collect outcomes of tests marked ``acceptance(n)`` and
# print one PASS/FAIL line per criterion at the end of the run

_criteria: dict[int, list[tuple[str, bool, str]]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
        _criteria.setdefault(marker.args[0], []).append((item.name, report.passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        runs = _criteria[n]
        status = "PASS" if all(ok for _, ok, _ in runs) else "FAIL"
        details = " | ".join(f"{name}: {'ok' if ok else 'FAILED'}{' (' + d + ')' if d else ''}" for name, ok, d in runs)
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {details}")
