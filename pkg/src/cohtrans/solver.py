"""Probability systems for candidate permutation sets.

For a set {I, U_2, ..., U_d} each row of the coefficient matrix is the target
amplitude vector with the member's swap applied.  Completeness of the Kraus
family reduces to the linear system

    sum_i p_i * c[i, j]**2 = psi_j**2        (j = 1..d)

with p_i >= 0.  Feasibility is decided numerically by solving it.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.optimize import nnls

from .config import DEFAULT_TOL
from .core import majorizes
from .errors import (
    DegenerateGamma,
    DimensionMismatch,
    DimensionTooLarge,
    Infeasible,
    NoCandidateError,
    NoFeasibleSP,
    SingularSystem,
)
from .permutations import (
    PermutationSet,
    Transposition,
    build_table,
    enumerate_sps,
    sign_pattern,
)

__all__ = [
    "Solution",
    "alpha",
    "beta",
    "gamma",
    "coefficient_matrix",
    "solve_probabilities",
    "closed_form_probability",
    "find_feasible_sp",
    "feasible_sps",
    "brute_force_oracle",
    "BRUTE_FORCE_MAX_DIM",
]

BRUTE_FORCE_MAX_DIM = 7


def _levels(levels):
    if isinstance(levels, int):
        return [levels]
    return list(levels)


def alpha(source, target, levels):
    """Sum over ``levels`` (1-based) of phi^2 - psi^2."""
    idx = [k - 1 for k in _levels(levels)]
    return float(np.sum(target.mu[idx]) - np.sum(source.mu[idx]))


def beta(source, target, levels):
    """Sum over ``levels`` (1-based) of psi^2 - phi^2."""
    return -alpha(source, target, levels)


def gamma(target, x, y):
    """phi_x^2 - phi_y^2."""
    return float(target.mu[x - 1] - target.mu[y - 1])


def coefficient_matrix(sp, target):
    """d x d matrix whose row i is the target amplitudes permuted by member i."""
    if sp.d != target.dim:
        raise DimensionMismatch(f"set is for d={sp.d}, target has d={target.dim}")
    phi = np.asarray(target.amps, dtype=float)
    cmat = np.tile(phi, (sp.d, 1))
    for i, t in enumerate(sp.transpositions, start=1):
        cmat[i, [t.x - 1, t.y - 1]] = phi[[t.y - 1, t.x - 1]]
    return cmat


def solve_probabilities(cmat, source, tol=DEFAULT_TOL):
    """Nonnegative p with (cmat**2).T @ p == mu(source), or raise Infeasible.

    A full-rank system is solved exactly; a negative component beyond
    ``tol.prob`` raises ``Infeasible("negative")``.  A rank-deficient system
    (ties in the target amplitudes make rows coincide) is solved by
    nonnegative least squares and accepted when the residual is within
    ``tol.res``; otherwise SingularSystem is raised.  Entries within
    ``tol.prob`` of zero are set to zero and the vector renormalised.
    """
    cmat = np.asarray(cmat, dtype=float)
    d = cmat.shape[0]
    if cmat.shape != (d, d) or source.dim != d:
        raise DimensionMismatch(f"matrix {cmat.shape} vs source d={source.dim}")
    a = (cmat**2).T
    b = np.asarray(source.mu, dtype=float)
    p, _, rank, _ = np.linalg.lstsq(a, b, rcond=None)
    if rank < d:
        p, _ = nnls(a, b)
        res = float(np.max(np.abs(a @ p - b)))
        if res > tol.res:
            raise SingularSystem(f"rank {rank} < {d}, residual {res:.3e}")
    else:
        res = float(np.max(np.abs(a @ p - b)))
        if res > tol.res:
            raise Infeasible("residual", f"residual {res:.3e}")
        if np.min(p) < -tol.prob:
            raise Infeasible("negative", f"min probability {np.min(p):.3e}")
    # rounding noise around zero (e.g. source == target) is snapped away
    p = np.where(np.abs(p) <= tol.prob, 0.0, p)
    total = float(np.sum(p))
    if abs(total - 1.0) > tol.norm:
        raise Infeasible("residual", f"probabilities sum to {total!r}")
    return p / total


_KINDS = ("column_unique", "row_unique", "adjacent_alpha", "adjacent_beta")


def closed_form_probability(t, kind, source, target, tol=DEFAULT_TOL):
    """Closed-form probability of a mandatory transposition.

    column_unique (v, m): alpha_v / gamma_vm
    row_unique (h, k): beta_k / gamma_hk
    adjacent_alpha (u, u+1): alpha_u / gamma_u(u+1)
    adjacent_beta (u, u+1): beta_(u+1) / gamma_u(u+1)
    """
    x, y = Transposition(*t)
    if kind not in _KINDS:
        raise ValueError(f"kind must be one of {_KINDS}")
    if kind.startswith("adjacent") and y != x + 1:
        raise ValueError(f"{kind} needs an adjacent transposition, got {(x, y)}")
    g = gamma(target, x, y)
    if g <= tol.amp**2:
        raise DegenerateGamma(f"gamma_{x}{y} = {g!r}")
    if kind in ("column_unique", "adjacent_alpha"):
        return alpha(source, target, x) / g
    return beta(source, target, y) / g


@dataclass(frozen=True)
class Solution:
    sp: PermutationSet
    cmat: np.ndarray
    probabilities: np.ndarray


def _attempt(sp, source, target, tol):
    cmat = coefficient_matrix(sp, target)
    return Solution(sp, cmat, solve_probabilities(cmat, source, tol))


def feasible_sps(source, target, tol=DEFAULT_TOL):
    """Every usable set that solves for this pair, as Solutions in order."""
    table = build_table(sign_pattern(source, target, tol))
    out = []
    for sp in enumerate_sps(table):
        try:
            out.append(_attempt(sp, source, target, tol))
        except Infeasible:
            continue
    return out


def find_feasible_sp(source, target, tol=DEFAULT_TOL):
    """First usable set (lexicographic order) with a physical solution.

    Raises MajorizationError when the pair is not majorizing and NoFeasibleSP
    carrying every attempted set and its failure reason otherwise.
    """
    table = build_table(sign_pattern(source, target, tol))
    attempts = []
    try:
        for sp in enumerate_sps(table):
            try:
                return _attempt(sp, source, target, tol)
            except Infeasible as exc:
                attempts.append((sp, exc.reason))
    except NoCandidateError as exc:
        raise NoFeasibleSP(str(exc), attempts) from exc
    raise NoFeasibleSP(
        f"none of {len(attempts)} non-crossing sets is feasible (d={source.dim})", attempts
    )


def brute_force_oracle(source, target, tol=DEFAULT_TOL, max_dim=BRUTE_FORCE_MAX_DIM):
    """Solve every (d-1)-subset of candidate transpositions; keep feasible ones.

    No mandatory or non-crossing filtering is applied.  For a majorizing pair
    the candidates are the table entries; otherwise there is no table and
    every transposition of d levels is a candidate.
    """
    if source.dim != target.dim:
        raise DimensionMismatch(f"d={source.dim} vs d={target.dim}")
    d = source.dim
    if d > max_dim:
        raise DimensionTooLarge(f"brute force limited to d <= {max_dim}, got {d}")
    if majorizes(target, source, tol).holds:
        candidates = build_table(sign_pattern(source, target, tol)).entries
    else:
        candidates = [Transposition(x, y) for x in range(1, d + 1) for y in range(x + 1, d + 1)]
    found = []
    for combo in combinations(candidates, d - 1):
        sp = PermutationSet(d, combo)
        try:
            sol = _attempt(sp, source, target, tol)
        except Infeasible:
            continue
        found.append((sp, sol.probabilities))
    return found
