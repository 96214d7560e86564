from __future__ import annotations

import cmath

import numpy as np
import pytest

ACCEPTANCE_RESULTS: list[tuple[str, str, str]] = []


def explicit_to_probability(f):
    """eps(alpha) = sum_n f(n) omega^(n alpha), by a plain double loop."""
    f = np.asarray(f, dtype=complex)
    d = f.shape[-1]
    w = cmath.exp(2j * cmath.pi / d)
    out = np.zeros_like(f)
    for a in range(2):
        for b in range(2):
            for alpha in range(d):
                out[a, b, alpha] = sum(f[a, b, n] * w ** (n * alpha) for n in range(d))
    return out


def random_table(rng, d, *, real_probability=False):
    """Random (2, 2, d) table; with real_probability, a real eps with zero-sum blocks."""
    if real_probability:
        eps = rng.normal(size=(2, 2, d))
        eps -= eps.mean(axis=-1, keepdims=True)
        return eps.astype(complex)
    return rng.normal(size=(2, 2, d)) + 1j * rng.normal(size=(2, 2, d))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(criterion): acceptance criterion number and title")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or report.when != "call":
        return
    status = "PASS" if report.passed else "FAIL"
    ACCEPTANCE_RESULTS.append((str(marker.args[0]), item.name, status))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, name, status in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"[{status}] criterion {criterion}: {name}")
