"""Random state pairs for randomized verification suites."""

from __future__ import annotations

import numpy as np

from .config import DEFAULT_TOL
from .core import CoherenceVector, majorizes
from .permutations import sign_pattern

__all__ = [
    "random_mu",
    "random_majorizing_pair",
    "random_nonmajorizing_pair",
    "random_pair_with_pattern",
]

# keeps sampled amplitudes and gaps away from the tolerance floor
_MIN_ENTRY = 1e-4
_MIN_GAP = 1e-6


def _rng(rng):
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


def _acceptable(mu):
    return mu.min() > _MIN_ENTRY and (mu.size < 2 or np.min(-np.diff(mu)) > _MIN_GAP)


def random_mu(d, rng=None):
    """Descending coherence vector drawn from a flat Dirichlet."""
    rng = _rng(rng)
    while True:
        mu = np.sort(rng.dirichlet(np.ones(d)))[::-1]
        if _acceptable(mu):
            return mu


def random_majorizing_pair(d, rng=None, tol=DEFAULT_TOL):
    """(source, target) with mu(source) majorized by mu(target).

    The source is the target mixed with a random doubly stochastic matrix
    (a convex combination of permutations), which guarantees majorization.
    """
    rng = _rng(rng)
    while True:
        tgt = random_mu(d, rng)
        if d == 1:
            return CoherenceVector.from_mu(tgt, tol), CoherenceVector.from_mu(tgt, tol)
        weights = rng.dirichlet(np.ones(rng.integers(1, d + 1)))
        mixed = sum(w * tgt[rng.permutation(d)] for w in weights)
        t = rng.uniform()
        src = np.sort((1 - t) * tgt + t * mixed)[::-1]
        src /= src.sum()
        if not _acceptable(src):
            continue
        source = CoherenceVector.from_mu(src, tol)
        target = CoherenceVector.from_mu(tgt, tol)
        if majorizes(target, source, tol).holds:
            return source, target


def random_nonmajorizing_pair(d, rng=None, tol=DEFAULT_TOL):
    """(source, target) such that target does not majorize source (d >= 2)."""
    if d < 2:
        raise ValueError("every pair majorizes in d = 1")
    rng = _rng(rng)
    while True:
        source = CoherenceVector.from_mu(random_mu(d, rng), tol)
        target = CoherenceVector.from_mu(random_mu(d, rng), tol)
        report = majorizes(target, source, tol)
        if not report.holds and min(report.margins) < -1e-6:
            return source, target


def random_pair_with_pattern(pattern, rng=None, predicate=None, max_tries=200_000, tol=DEFAULT_TOL):
    """Majorizing pair whose level relations match ``pattern`` strictly.

    The source is the target shifted down on LE levels and up on GE levels by
    random amounts; ``predicate(source, target)`` can restrict the sample
    further (for example to one subcase region).  Raises RuntimeError after
    ``max_tries`` rejected draws.
    """
    rng = _rng(rng)
    d = pattern.d
    sign = np.array([1.0 if r.value == "GE" else -1.0 for r in pattern.relations])
    up, down = sign > 0, sign < 0
    for _ in range(max_tries):
        tgt = random_mu(d, rng)
        shift = rng.exponential(size=d) * rng.uniform(0.02, 0.6) * tgt
        shift[up] *= shift[down].sum() / shift[up].sum()
        src = tgt + sign * shift
        if not _acceptable(src) or np.min(shift) < 1e-5:
            continue
        source = CoherenceVector.from_mu(src / src.sum(), tol)
        target = CoherenceVector.from_mu(tgt, tol)
        if not majorizes(target, source, tol).holds:
            continue
        if sign_pattern(source, target, tol) != pattern:
            continue
        if predicate is None or predicate(source, target):
            return source, target
    raise RuntimeError(f"no pair with pattern {pattern} after {max_tries} draws")
