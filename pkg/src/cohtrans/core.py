"""Pure coherent states in canonical form and the majorization test.

A pure state sum_i psi_i |i> is reduced to its canonical form by discarding
phases (diagonal unitaries are incoherent) and sorting the magnitudes in
descending order.  All downstream modules work in that sorted basis; the
sorting permutation is kept so results can be mapped back to caller labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import DimensionMismatch, NormError, OrderError, ZeroAmplitudeError

__all__ = [
    "CoherenceVector",
    "MajorizationReport",
    "canonicalize",
    "majorizes",
    "pure_density",
    "check_density",
]


def _frozen(values):
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class CoherenceVector:
    """Descending, strictly positive, unit-norm amplitude vector.

    ``order[k]`` is the caller's (0-based) basis index that ended up at
    canonical position ``k``; it is the identity for vectors built directly.
    """

    amps: np.ndarray
    order: tuple = field(default=())
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        amps = _frozen(self.amps)
        if amps.ndim != 1 or amps.size == 0:
            raise ValueError("amplitudes must be a nonempty 1-d sequence")
        if np.any(amps <= self.tol.amp):
            raise ZeroAmplitudeError(f"amplitudes must exceed {self.tol.amp}: {amps.tolist()}")
        if np.any(np.diff(amps) > self.tol.maj):
            raise OrderError(f"amplitudes not descending: {amps.tolist()}")
        norm = float(np.sum(amps**2))
        if abs(norm - 1.0) > self.tol.norm:
            raise NormError(f"squared amplitudes sum to {norm!r}")
        order = tuple(self.order) if self.order else tuple(range(amps.size))
        if sorted(order) != list(range(amps.size)):
            raise ValueError(f"order must be a permutation of 0..{amps.size - 1}")
        object.__setattr__(self, "amps", amps)
        object.__setattr__(self, "order", order)

    @classmethod
    def from_mu(cls, mu, tol=DEFAULT_TOL):
        mu = np.asarray(mu, dtype=float)
        if np.any(mu < 0):
            raise ZeroAmplitudeError("coherence vector entries must be positive")
        return cls(np.sqrt(mu), tol=tol)

    @property
    def dim(self):
        return int(self.amps.size)

    @property
    def mu(self):
        """Coherence vector: squared amplitudes, descending, summing to one."""
        mu = self.amps**2
        mu.setflags(write=False)
        return mu

    def to_caller_basis(self):
        """Amplitudes placed back at the caller's original positions."""
        out = np.empty(self.dim)
        out[list(self.order)] = self.amps
        return out

    def __eq__(self, other):
        if not isinstance(other, CoherenceVector):
            return NotImplemented
        return self.dim == other.dim and bool(np.all(self.amps == other.amps))

    def __hash__(self):
        return hash(self.amps.tobytes())

    def isclose(self, other, atol=None):
        atol = self.tol.maj if atol is None else atol
        return self.dim == other.dim and bool(np.max(np.abs(self.mu - other.mu)) <= atol)


def canonicalize(raw, tol=DEFAULT_TOL):
    """Strip phases from ``raw`` and sort magnitudes in descending order.

    Raises NormError when sum |raw_i|^2 deviates from one by more than
    ``tol.norm`` and ZeroAmplitudeError when any |raw_i| <= ``tol.amp``.
    """
    mags = np.abs(np.asarray(raw, dtype=complex))
    if mags.ndim != 1 or mags.size == 0:
        raise ValueError("need a nonempty 1-d amplitude list")
    norm = float(np.sum(mags**2))
    if abs(norm - 1.0) > tol.norm:
        raise NormError(f"squared magnitudes sum to {norm!r}, expected 1")
    if np.any(mags <= tol.amp):
        bad = [i for i, m in enumerate(mags) if m <= tol.amp]
        raise ZeroAmplitudeError(f"zero amplitude at position(s) {bad}; reduce the dimension first")
    # stable sort keeps equal amplitudes in caller order
    order = np.argsort(-mags, kind="stable")
    return CoherenceVector(mags[order], order=tuple(int(i) for i in order), tol=tol)


@dataclass(frozen=True)
class MajorizationReport:
    holds: bool
    first_violation: int | None = None  # 1-based k of the first failing partial sum
    margins: tuple = ()  # target minus source partial sums, k = 1..d-1

    def __bool__(self):
        return self.holds


def majorizes(target, source, tol=DEFAULT_TOL):
    """Check mu(source) is majorized by mu(target).

    Equal dimensions are required; zero padding is not performed.
    """
    if target.dim != source.dim:
        raise DimensionMismatch(f"source has d={source.dim}, target has d={target.dim}")
    margins = np.cumsum(target.mu)[:-1] - np.cumsum(source.mu)[:-1]
    failing = np.flatnonzero(margins < -tol.maj)
    first = int(failing[0]) + 1 if failing.size else None
    return MajorizationReport(first is None, first, tuple(float(m) for m in margins))


def pure_density(state):
    """Rank-one projector |psi><psi| in the canonical basis."""
    return np.outer(state.amps, state.amps)


def check_density(rho, tol=DEFAULT_TOL):
    """Raise ValueError unless ``rho`` is a valid density matrix."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > tol.psd:
        raise ValueError("density matrix is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > tol.norm:
        raise ValueError(f"density matrix has trace {tr!r}")
    if np.min(np.linalg.eigvalsh(rho)) < -tol.psd:
        raise ValueError("density matrix is not positive semidefinite")
    return rho
