"""Incoherent Kraus operators, channel checks and the bipartite LOCC plan.

Each Kraus operator is a generalized permutation matrix: member i of the
permutation set composed with the diagonal sqrt(p_i) * c[i, j] / psi_j.  It
is stored column-wise as (row index, value) so incoherence holds by
construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL
from .core import pure_density
from .errors import DimensionMismatch, DimensionTooLarge, ZeroAmplitudeError

__all__ = [
    "KrausOperator",
    "IncoherentChannel",
    "LoccPlan",
    "LoccOutcome",
    "LoccReport",
    "build_kraus",
    "verify_completeness",
    "apply_channel",
    "channel_error",
    "verify_incoherent",
    "build_locc_plan",
    "simulate_locc",
    "LOCC_MAX_DIM",
]

LOCC_MAX_DIM = 16


@dataclass(frozen=True, eq=False)
class KrausOperator:
    """Monomial matrix: column j holds ``values[j]`` at row ``rows[j]`` (0-based)."""

    rows: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        rows = np.array(self.rows, dtype=int)
        values = np.array(self.values, dtype=float)
        if rows.shape != values.shape or rows.ndim != 1:
            raise ValueError("rows and values must be 1-d arrays of equal length")
        d = rows.size
        if np.any((rows < 0) | (rows >= d)):
            raise ValueError("row index out of range")
        live = rows[values != 0]
        if np.unique(live).size != live.size:
            raise ValueError("two nonzero columns map to the same row")
        rows.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "values", values)

    @property
    def dim(self):
        return int(self.rows.size)

    def to_dense(self):
        out = np.zeros((self.dim, self.dim))
        out[self.rows, np.arange(self.dim)] = self.values
        return out

    def triples(self):
        """Nonzero entries as 1-based ``[row, col, value]``."""
        return [
            [int(r) + 1, j + 1, float(v)]
            for j, (r, v) in enumerate(zip(self.rows, self.values))
            if v != 0
        ]

    @classmethod
    def from_triples(cls, dim, triples):
        rows = np.arange(dim)
        values = np.zeros(dim)
        seen = set()
        for r, c, v in triples:
            if c in seen:
                raise ValueError(f"column {c} has more than one entry")
            seen.add(c)
            rows[c - 1] = r - 1
            values[c - 1] = v
        return cls(rows, values)


@dataclass(frozen=True, eq=False)
class IncoherentChannel:
    kraus: tuple
    probabilities: np.ndarray
    sp: object = None  # PermutationSet the operators were built from, if any

    @property
    def dim(self):
        return self.kraus[0].dim


def build_kraus(sp, probabilities, cmat, source, tol=DEFAULT_TOL):
    """Kraus family realising source -> target for a solved permutation set.

    Operator i has column-j value sqrt(p_i) * cmat[i, j] / psi_j placed at the
    row member i sends j to.  Zero-probability operators are kept, so the
    family always has d members.
    """
    psi = np.asarray(source.amps, dtype=float)
    if np.any(psi <= tol.amp):
        raise ZeroAmplitudeError("source amplitudes must be strictly positive")
    d = sp.d
    if len(probabilities) != d or np.shape(cmat) != (d, d) or source.dim != d:
        raise DimensionMismatch("permutation set, probabilities, matrix and source disagree in size")
    ops = []
    for i in range(d):
        rows = np.array([sp.image(i, j + 1) - 1 for j in range(d)])
        values = np.sqrt(probabilities[i]) * np.asarray(cmat[i]) / psi
        ops.append(KrausOperator(rows, values))
    probs = np.array(probabilities, dtype=float)
    probs.setflags(write=False)
    return IncoherentChannel(tuple(ops), probs, sp)


def _dense_ops(channel_or_ops):
    ops = channel_or_ops.kraus if isinstance(channel_or_ops, IncoherentChannel) else channel_or_ops
    return [op.to_dense() if isinstance(op, KrausOperator) else np.asarray(op) for op in ops]


def verify_completeness(channel):
    """Max-norm of sum_i K_i^dag K_i - I."""
    ops = _dense_ops(channel)
    total = sum(k.conj().T @ k for k in ops)
    return float(np.max(np.abs(total - np.eye(total.shape[0]))))


def apply_channel(channel, rho):
    rho = np.asarray(rho)
    if rho.shape != (channel.dim, channel.dim):
        raise DimensionMismatch(f"channel acts on d={channel.dim}, state has shape {rho.shape}")
    out = np.zeros_like(rho, dtype=np.result_type(rho, float))
    for k in _dense_ops(channel):
        out += k @ rho @ k.conj().T
    return out


def channel_error(channel, source, target):
    """Max-norm distance between the channel output on rho_source and rho_target."""
    return float(np.max(np.abs(apply_channel(channel, pure_density(source)) - pure_density(target))))


def verify_incoherent(channel_or_ops):
    """True iff every operator has at most one nonzero entry per column.

    Accepts an IncoherentChannel or any iterable of KrausOperator / dense
    arrays.  The test is structural and exact.
    """
    for k in _dense_ops(channel_or_ops):
        if np.any(np.count_nonzero(k, axis=0) > 1):
            return False
    return True


@dataclass(frozen=True, eq=False)
class LoccPlan:
    """d-outcome diagonal measurement on one party plus local corrections.

    ``measurement[i]`` holds the diagonal of M^i; ``corrections[i]`` is the
    permutation applied to both parties after outcome i (None = identity).
    """

    measurement: np.ndarray
    corrections: tuple
    probabilities: np.ndarray

    @property
    def dim(self):
        return int(self.measurement.shape[1])

    def completeness(self):
        return float(np.max(np.abs(np.sum(self.measurement**2, axis=0) - 1.0)))

    def correction_matrix(self, i):
        d = self.dim
        u = np.zeros((d, d))
        t = self.corrections[i]
        for j in range(1, d + 1):
            u[(j if t is None else t.apply(j)) - 1, j - 1] = 1.0
        return u


def build_locc_plan(sp, probabilities, cmat, source, tol=DEFAULT_TOL):
    """Measurement operators are the diagonal factors of the Kraus family."""
    psi = np.asarray(source.amps, dtype=float)
    if np.any(psi <= tol.amp):
        raise ZeroAmplitudeError("Schmidt coefficients must be strictly positive")
    probs = np.array(probabilities, dtype=float)
    meas = np.sqrt(probs)[:, None] * np.asarray(cmat, dtype=float) / psi[None, :]
    return LoccPlan(meas, tuple(sp.members), probs)


@dataclass(frozen=True)
class LoccOutcome:
    index: int
    probability: float
    overlap: float


@dataclass(frozen=True)
class LoccReport:
    outcomes: tuple
    total_probability: float
    max_probability_error: float

    @property
    def min_overlap(self):
        relevant = [o.overlap for o in self.outcomes if o.probability > 0]
        return min(relevant) if relevant else float("nan")


def simulate_locc(plan, source, target, max_dim=LOCC_MAX_DIM):
    """Run the plan on sum_j psi_j |jj> in the full d^2-dimensional space.

    Outcomes with zero probability are reported with overlap 1 since no
    post-measurement state exists.
    """
    d = plan.dim
    if d > max_dim:
        raise DimensionTooLarge(f"LOCC simulation limited to d <= {max_dim}, got {d}")
    if source.dim != d or target.dim != d:
        raise DimensionMismatch("plan and states disagree in dimension")
    eye = np.eye(d)
    basis = [np.kron(eye[j], eye[j]) for j in range(d)]
    psi_ab = sum(a * v for a, v in zip(source.amps, basis))
    phi_ab = sum(a * v for a, v in zip(target.amps, basis))
    outcomes = []
    for i in range(d):
        post = np.kron(np.diag(plan.measurement[i]), eye) @ psi_ab
        prob = float(post @ post)
        if prob <= 0.0:
            outcomes.append(LoccOutcome(i, 0.0, 1.0))
            continue
        u = plan.correction_matrix(i)
        fixed = np.kron(u, u) @ (post / np.sqrt(prob))
        outcomes.append(LoccOutcome(i, prob, float(abs(phi_ab @ fixed))))
    total = sum(o.probability for o in outcomes)
    err = max(abs(o.probability - p) for o, p in zip(outcomes, plan.probabilities))
    return LoccReport(tuple(outcomes), float(total), float(err))
