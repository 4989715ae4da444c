import numpy as np
import pytest

from wgddi import ChainConfig, Emitter, validate_chain

# Prints one PASS/FAIL line per acceptance criterion at the end of the run.
_acceptance = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or report.when != "call":
        return
    number, title = marker.args
    ok = report.passed and _acceptance.get(number, (True,))[0]
    _acceptance[number] = (ok, title)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        ok, title = _acceptance[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {number:>2}. {title}")


def chain(gammas, losses, gaps_nm, y=17.0, override=None, enabled=True):
    """Chain along +x with the given guided/loss rates and gaps."""
    xs = np.concatenate([[0.0], np.cumsum(gaps_nm)])
    emitters = [Emitter((x, y, 0.0), g, l) for x, g, l in zip(xs, gammas, losses)]
    return validate_chain(
        ChainConfig(emitters=emitters, ddi_override=override, ddi_enabled=enabled)
    )


def gap_for_phase(kl, lambda_guided=211.8):
    return kl * lambda_guided / (2 * np.pi)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)
