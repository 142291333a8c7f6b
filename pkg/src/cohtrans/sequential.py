"""Multi-step transformations through intermediate states.

Each step picks up to d' - 1 levels that are not yet equal to the target,
sets them to their target values and lets one further level (the balance
level) absorb the norm difference.  The d'-level block formed by those
levels is transformed with a single-step solution and embedded back into
the full space, acting as sqrt(p_i) * identity outside the block.  The last
step transforms whatever is left (at most d' levels) exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .config import DEFAULT_TOL
from .core import CoherenceVector, majorizes
from .errors import (
    BlockMismatch,
    DimensionMismatch,
    MajorizationError,
    NegativeRadicand,
    NoFeasibleSP,
    NoIntermediateFound,
)
from .kraus import IncoherentChannel, KrausOperator, apply_channel, build_kraus
from .solver import find_feasible_sp

__all__ = [
    "IntermediateState",
    "PlanStep",
    "TransformPlan",
    "balance_coefficient",
    "candidate_intermediates",
    "propose_intermediate",
    "embed_subspace_channel",
    "plan_sequence",
    "execute_plan",
    "max_steps",
]


def max_steps(d, d_prime):
    """Upper bound on the number of steps for block size d'."""
    if d <= 1:
        return 0
    return (d + d_prime - 3) // (d_prime - 1)


@dataclass(frozen=True)
class IntermediateState:
    state: CoherenceVector
    fixed_levels: frozenset  # 1-based levels equal to the target
    balance_level: int | None  # None when the state is the target itself
    repaired: bool = False


@dataclass(frozen=True, eq=False)
class PlanStep:
    target: IntermediateState
    channel: IncoherentChannel  # embedded, acts on all d levels
    block: tuple  # 1-based levels the step acts on
    block_norm: float
    sub_channel: IncoherentChannel  # acts on the normalised block


@dataclass(frozen=True, eq=False)
class TransformPlan:
    source: CoherenceVector
    target: CoherenceVector
    d_prime: int
    steps: tuple = field(default=())
    fallback: bool = False  # the intermediate search failed at some step

    @property
    def step_count(self):
        return len(self.steps)

    @property
    def repaired(self):
        return any(s.target.repaired for s in self.steps)


def _mu(vec):
    return np.asarray(vec.mu if isinstance(vec, CoherenceVector) else vec, dtype=float)


def balance_coefficient(source, target, block, balance_level=None, tol=DEFAULT_TOL):
    """Amplitude that keeps the norm when the rest of ``block`` takes target values.

    ``block`` lists 1-based levels; the balance level defaults to the
    smallest one and keeps its source value plus the surplus
    sum_j (psi_j^2 - phi_j^2) over the other block levels.
    """
    block = sorted(block)
    b = block[0] if balance_level is None else balance_level
    if b not in block:
        raise BlockMismatch(f"balance level {b} not in block {block}")
    src, tgt = _mu(source), _mu(target)
    others = [k - 1 for k in block if k != b]
    rad = src[b - 1] + float(np.sum(src[others]) - np.sum(tgt[others]))
    if rad < -tol.maj:
        raise NegativeRadicand(f"balance radicand {rad!r} for block {block}")
    return float(np.sqrt(max(rad, 0.0)))


def _unfixed(current, target, tol):
    diff = np.abs(current.mu - target.mu)
    return [k + 1 for k in range(current.dim) if diff[k] > tol.maj]


def _candidate(current, target, fixed_new, balance, tol):
    """Intermediate with ``fixed_new`` set to target and ``balance`` balancing."""
    mu = np.array(current.mu)
    idx = [k - 1 for k in fixed_new]
    rad = mu[balance - 1] + float(np.sum(mu[idx]) - np.sum(target.mu[idx]))
    if rad <= tol.amp**2:
        return None
    mu[idx] = target.mu[idx]
    mu[balance - 1] = rad
    if np.any(np.diff(mu) > tol.maj):
        return None
    cand = CoherenceVector(np.sqrt(mu / mu.sum()), tol=tol)
    if majorizes(cand, current, tol).holds and majorizes(target, cand, tol).holds:
        return cand
    return None


def _selections(unfixed, d_prime):
    """(levels to fix, balance levels to try, is_default) in search order.

    The default fixes the d'-1 highest unfixed levels with the balance just
    above them.  Repairs then fix the ``lead`` highest-amplitude unfixed
    levels plus the d'-1-lead lowest ones, for lead = d'-1 down to 1, trying
    every remaining level as balance from the bottom up.  Last come the
    default levels with the other balance positions.
    """
    m = d_prime - 1
    trailing = unfixed[-m:]
    rest = [k for k in unfixed if k not in trailing]
    yield trailing, rest[-1:], True
    for lead in range(m, 0, -1):
        chosen = unfixed[:lead] + unfixed[len(unfixed) - (m - lead):]
        yield chosen, [k for k in unfixed if k not in chosen][::-1], False
    yield trailing, rest[-2::-1], False


def candidate_intermediates(current, target, d_prime=5, tol=DEFAULT_TOL):
    """Yield every valid intermediate the search visits, in search order.

    When at most d' levels remain unfixed the only candidate is the target.
    """
    unfixed = _unfixed(current, target, tol)
    if not unfixed:
        return
    if len(unfixed) <= d_prime:
        yield IntermediateState(target, frozenset(range(1, target.dim + 1)), None)
        return
    already = frozenset(k for k in range(1, target.dim + 1) if k not in unfixed)
    for fixed_new, balances, default in _selections(unfixed, d_prime):
        for b in balances:
            cand = _candidate(current, target, fixed_new, b, tol)
            if cand is not None:
                yield IntermediateState(cand, already | frozenset(fixed_new), b, repaired=not default)


def propose_intermediate(current, target, d_prime=5, tol=DEFAULT_TOL):
    """Next intermediate state, sandwiched between ``current`` and ``target``.

    Raises NoIntermediateFound when the search yields nothing.
    """
    if not majorizes(target, current, tol).holds:
        raise MajorizationError("target does not majorize the current state")
    for cand in candidate_intermediates(current, target, d_prime, tol):
        return cand
    raise NoIntermediateFound(f"no intermediate state found for d'={d_prime} (d={current.dim})")


def embed_subspace_channel(subchannel, dim, levels):
    """Lift a channel on the block ``levels`` (1-based, ascending) to ``dim`` levels.

    Operator i acts as sqrt(p_i) times the identity outside the block.
    """
    levels = tuple(int(k) for k in levels)
    if len(levels) != subchannel.dim:
        raise BlockMismatch(f"block has {len(levels)} levels, channel acts on {subchannel.dim}")
    if list(levels) != sorted(set(levels)) or levels[0] < 1 or levels[-1] > dim:
        raise BlockMismatch(f"block levels {levels} must be distinct, ascending and within 1..{dim}")
    inside = [k - 1 for k in levels]
    ops = []
    for sub, p in zip(subchannel.kraus, subchannel.probabilities):
        rows = np.arange(dim)
        values = np.full(dim, np.sqrt(p))
        rows[inside] = [inside[r] for r in sub.rows]
        values[inside] = sub.values
        ops.append(KrausOperator(rows, values))
    return IncoherentChannel(tuple(ops), subchannel.probabilities, subchannel.sp)


def _block_step(current, nxt, tol):
    block = tuple(int(k) + 1 for k in np.flatnonzero(np.abs(current.mu - nxt.state.mu) > tol.maj))
    if len(block) < 2:
        raise BlockMismatch(f"step changes {len(block)} level(s); norms of the two states differ")
    idx = [k - 1 for k in block]
    norm = float(np.sqrt(np.sum(current.mu[idx])))
    sub_src = CoherenceVector(current.amps[idx] / norm, tol=tol)
    sub_tgt = CoherenceVector(nxt.state.amps[idx] / np.sqrt(np.sum(nxt.state.mu[idx])), tol=tol)
    sol = find_feasible_sp(sub_src, sub_tgt, tol)
    sub = build_kraus(sol.sp, sol.probabilities, sol.cmat, sub_src, tol)
    return PlanStep(nxt, embed_subspace_channel(sub, current.dim, block), block, norm, sub)


def plan_sequence(source, target, d_prime=5, tol=DEFAULT_TOL):
    """Cascade of d'-level steps taking ``source`` to ``target``.

    Intermediates are taken in search order; one whose block has no
    feasible permutation set is skipped.  If nothing usable is left at some
    step, the remaining unfixed levels are transformed in one final step and
    the plan is flagged ``fallback``.
    """
    if source.dim != target.dim:
        raise DimensionMismatch(f"d={source.dim} vs d={target.dim}")
    d = source.dim
    if not 2 <= d_prime or (d >= 2 and d_prime > d):
        raise ValueError(f"block size must satisfy 2 <= d' <= d, got d'={d_prime}, d={d}")
    if not majorizes(target, source, tol).holds:
        raise MajorizationError("target does not majorize source")
    steps = []
    current = source
    fallback = False
    while _unfixed(current, target, tol):
        step = None
        first = True
        # a valid intermediate whose block has no feasible set is skipped
        for cand in candidate_intermediates(current, target, d_prime, tol):
            if not first and not cand.repaired:
                cand = replace(cand, repaired=True)
            first = False
            try:
                step = _block_step(current, cand, tol)
                break
            except NoFeasibleSP:
                continue
        if step is None:
            fallback = True
            nxt = IntermediateState(target, frozenset(range(1, d + 1)), None, repaired=True)
            step = _block_step(current, nxt, tol)
        steps.append(step)
        current = step.target.state
    return TransformPlan(source, target, d_prime, tuple(steps), fallback)


def execute_plan(plan, rho):
    rho = np.asarray(rho)
    if rho.shape != (plan.source.dim, plan.source.dim):
        raise DimensionMismatch(f"plan acts on d={plan.source.dim}, state has shape {rho.shape}")
    for step in plan.steps:
        rho = apply_channel(step.channel, rho)
    return rho
