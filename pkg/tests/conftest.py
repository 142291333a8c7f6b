from fractions import Fraction

import numpy as np
import pytest

from cohtrans import CoherenceVector

_ACCEPTANCE = {}


def mu_state(values, scale=None):
    """CoherenceVector from squared amplitudes divided by ``scale`` (default: their sum)."""
    mu = np.asarray(values, dtype=float)
    mu = mu / (mu.sum() if scale is None else scale)
    return CoherenceVector.from_mu(mu)


def exact_probabilities(src_mu, tgt_mu, transpositions):
    """Fraction solve of sum_i p_i c_ij^2 = psi_j^2; None if singular."""
    src = [Fraction(v) for v in src_mu]
    tgt = [Fraction(v) for v in tgt_mu]
    d = len(src)
    rows = [list(tgt)]
    for x, y in transpositions:
        r = list(tgt)
        r[x - 1], r[y - 1] = r[y - 1], r[x - 1]
        rows.append(r)
    a = [[rows[i][j] for i in range(d)] + [src[j]] for j in range(d)]
    for c in range(d):
        piv = next((r for r in range(c, d) if a[r][c] != 0), None)
        if piv is None:
            return None
        a[c], a[piv] = a[piv], a[c]
        for r in range(d):
            if r != c and a[r][c] != 0:
                f = a[r][c] / a[c][c]
                a[r] = [u - f * v for u, v in zip(a[r], a[c])]
    return [a[i][d] / a[i][i] for i in range(d)]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def worked_d6():
    return mu_state([11, 11, 8, 8, 8, 7], 53), mu_state([12, 12, 10, 9, 6, 4], 53)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    failed = rep.failed or (rep.when == "call" and rep.skipped)
    prev = _ACCEPTANCE.get(number, (title, True))
    _ACCEPTANCE[number] = (title, prev[1] and not failed)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, ok = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")
