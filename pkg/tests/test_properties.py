import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from cohtrans import (
    CoherenceVector,
    NoFeasibleSP,
    build_kraus,
    canonicalize,
    channel_error,
    find_feasible_sp,
    majorizes,
    verify_completeness,
    verify_incoherent,
)

weights = st.lists(st.floats(0.05, 1.0), min_size=2, max_size=6)


def _vec(ws):
    mu = np.sort(np.asarray(ws))[::-1]
    return CoherenceVector.from_mu(mu / mu.sum())


@given(weights)
def test_majorization_reflexive(ws):
    v = _vec(ws)
    assert majorizes(v, v).holds


@given(weights)
def test_uniform_is_majorized_by_everything(ws):
    v = _vec(ws)
    flat = _vec([1.0] * len(ws))
    assert majorizes(v, flat).holds


@given(st.integers(2, 6).flatmap(lambda d: st.tuples(*[st.lists(st.floats(0.05, 1.0), min_size=d, max_size=d)] * 3)))
def test_majorization_transitive(triple):
    a, b, c = (_vec(ws) for ws in triple)
    if majorizes(a, b).holds and majorizes(b, c).holds:
        assert majorizes(a, c).holds


@given(weights, st.randoms(use_true_random=False))
def test_canonicalize_ignores_order(ws, rnd):
    amps = np.sqrt(np.asarray(ws) / np.sum(ws))
    shuffled = list(amps)
    rnd.shuffle(shuffled)
    np.testing.assert_allclose(canonicalize(shuffled).amps, canonicalize(amps).amps, atol=1e-15)


@settings(max_examples=60, deadline=None)
@given(weights, st.floats(0.05, 0.95))
def test_synthesis_is_complete_and_exact(ws, t):
    # a convex pull toward |1> keeps the pair majorizing
    src = _vec(ws)
    peak = np.zeros(src.dim)
    peak[0] = 1.0
    tgt = CoherenceVector.from_mu((1 - t) * src.mu + t * peak)
    try:
        sol = find_feasible_sp(src, tgt)
    except NoFeasibleSP:
        assume(False)
    ch = build_kraus(sol.sp, sol.probabilities, sol.cmat, src)
    assert np.all(sol.probabilities >= 0)
    assert verify_completeness(ch) <= 1e-9
    assert channel_error(ch, src, tgt) <= 1e-9
    assert verify_incoherent(ch)
