"""Tables of candidate transpositions and non-crossing permutation sets.

Levels are labelled 1..d in the canonical (descending) basis.  For a pair
(source, target) every level is classified LE (psi_k <= phi_k) or GE
(psi_k >= phi_k).  Candidate transpositions |x> <-> |y> pair an LE level x
with a GE level y > x.  A permutation set (SP) is the identity plus d-1 of
those transpositions; usable sets contain every mandatory transposition and
no two members whose level intervals strictly interleave.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, NamedTuple

from .config import DEFAULT_TOL
from .core import majorizes
from .errors import DimensionMismatch, MajorizationError, NoCandidateError

__all__ = [
    "Relation",
    "LE",
    "GE",
    "Transposition",
    "CasePattern",
    "PermutationTable",
    "PermutationSet",
    "sign_pattern",
    "build_table",
    "crossing",
    "mandatory_permutations",
    "enumerate_sps",
    "all_patterns",
]


class Relation(str, Enum):
    LE = "LE"
    GE = "GE"


LE = Relation.LE
GE = Relation.GE


class Transposition(NamedTuple):
    """Swap of levels x and y (1-based, x < y)."""

    x: int
    y: int

    def check(self, d):
        if not 1 <= self.x < self.y <= d:
            raise ValueError(f"invalid transposition {tuple(self)} for d={d}")
        return self

    def apply(self, level):
        """Image of a 1-based level under the swap."""
        if level == self.x:
            return self.y
        if level == self.y:
            return self.x
        return level

    def __str__(self):
        return f"|{self.x}><->|{self.y}>"


@dataclass(frozen=True)
class CasePattern:
    relations: tuple

    def __post_init__(self):
        rel = tuple(Relation(r) for r in self.relations)
        if not rel:
            raise ValueError("empty pattern")
        if len(rel) > 1 and (rel[0] is not LE or rel[-1] is not GE):
            raise ValueError("a majorizing pair always has LE at level 1 and GE at level d")
        object.__setattr__(self, "relations", rel)

    @property
    def d(self):
        return len(self.relations)

    def levels(self, relation):
        return tuple(k + 1 for k, r in enumerate(self.relations) if r is relation)

    def __str__(self):
        return ",".join(r.value for r in self.relations)


@dataclass(frozen=True)
class PermutationTable:
    d: int
    columns: tuple  # LE levels
    rows: tuple  # GE levels
    entries: tuple  # sorted Transpositions

    @property
    def zeta(self):
        return len(self.entries)

    def column(self, x):
        return [t for t in self.entries if t.x == x]

    def row(self, y):
        return [t for t in self.entries if t.y == y]


@dataclass(frozen=True)
class PermutationSet:
    """Identity (implicit, member 0) followed by d-1 sorted transpositions."""

    d: int
    transpositions: tuple

    def __post_init__(self):
        ts = tuple(sorted(Transposition(*t).check(self.d) for t in self.transpositions))
        if len(ts) != self.d - 1:
            raise ValueError(f"a permutation set for d={self.d} needs {self.d - 1} transpositions, got {len(ts)}")
        if len(set(ts)) != len(ts):
            raise ValueError("repeated transposition in permutation set")
        object.__setattr__(self, "transpositions", ts)

    @property
    def members(self):
        """``[None, t_1, ..., t_{d-1}]``; ``None`` stands for the identity."""
        return [None, *self.transpositions]

    def index(self, t):
        """Member index (0 = identity) of transposition ``t``."""
        return 1 + self.transpositions.index(Transposition(*t))

    def image(self, i, level):
        """Image of a 1-based level under member ``i``."""
        return level if i == 0 else self.transpositions[i - 1].apply(level)

    def is_noncrossing(self):
        ts = self.transpositions
        return not any(crossing(a, b) for k, a in enumerate(ts) for b in ts[k + 1 :])

    def as_pairs(self):
        return [[t.x, t.y] for t in self.transpositions]

    def __str__(self):
        return "{I, " + ", ".join(map(str, self.transpositions)) + "}" if self.transpositions else "{I}"


def sign_pattern(source, target, tol=DEFAULT_TOL):
    """Classify each level as LE or GE; ties within ``tol.maj`` count as LE.

    The first and last levels are forced to LE and GE, as majorization
    implies.  Raises MajorizationError when target does not majorize source.
    """
    if source.dim != target.dim:
        raise DimensionMismatch(f"d={source.dim} vs d={target.dim}")
    report = majorizes(target, source, tol)
    if not report.holds:
        raise MajorizationError(f"majorization fails at k={report.first_violation}")
    d = source.dim
    rel = [LE if s <= t + tol.maj else GE for s, t in zip(source.mu, target.mu)]
    if d > 1:
        rel[0], rel[-1] = LE, GE
    return CasePattern(tuple(rel))


def build_table(pattern):
    cols = pattern.levels(LE)
    rows = pattern.levels(GE)
    entries = tuple(sorted(Transposition(x, y) for x in cols for y in rows if y > x))
    return PermutationTable(pattern.d, cols, rows, entries)


def crossing(a, b):
    """True iff the two level intervals strictly interleave.

    Shared endpoints and nested intervals do not cross.
    """
    return a.x < b.x < a.y < b.y or b.x < a.x < b.y < a.y


def mandatory_permutations(table):
    """Transpositions every usable set must contain, sorted.

    Union of: the only entry of a column, the only entry of a row, every
    adjacent swap (u, u+1), and (1, d).
    """
    found = set()
    for x in table.columns:
        col = table.column(x)
        if len(col) == 1:
            found.add(col[0])
    for y in table.rows:
        row = table.row(y)
        if len(row) == 1:
            found.add(row[0])
    found.update(t for t in table.entries if t.y == t.x + 1)
    if table.d > 1:
        found.add(Transposition(1, table.d))
    return sorted(found)


def enumerate_sps(table, require_mandatory=True, noncrossing=True) -> Iterator[PermutationSet]:
    """Yield usable permutation sets in lexicographic order.

    Sets are generated as sorted combinations of ``table.entries`` so the
    stream is ordered by transposition list; crossing is pruned while the
    combination is built.  Raises NoCandidateError if nothing is produced.
    The two flags exist for diagnostics and for the brute-force oracle.
    """
    d = table.d
    k = d - 1
    entries = list(table.entries)
    forced = set(mandatory_permutations(table)) if require_mandatory else set()
    if not forced.issubset(entries):
        raise NoCandidateError(f"mandatory transpositions {sorted(forced - set(entries))} missing from table")
    if noncrossing:
        # anything crossing a forced member can never be used
        entries = [t for t in entries if t in forced or not any(crossing(t, f) for f in forced)]
    n = len(entries)
    produced = False

    def extend(start, chosen):
        if len(chosen) == k:
            yield PermutationSet(d, tuple(chosen))
            return
        for i in range(start, n):
            if n - i < k - len(chosen):
                return
            t = entries[i]
            if not noncrossing or not any(crossing(t, c) for c in chosen):
                chosen.append(t)
                yield from extend(i + 1, chosen)
                chosen.pop()
            if t in forced:
                # skipping a forced entry means it would never be included
                return

    for sp in extend(0, []):
        produced = True
        yield sp
    if not produced:
        raise NoCandidateError(f"no usable permutation set among {table.zeta} table entries (d={d})")


def all_patterns(d):
    """Every pattern with LE at level 1 and GE at level d (2**(d-2) of them)."""
    if d < 2:
        raise ValueError("patterns need d >= 2")
    for bits in range(2 ** (d - 2)):
        middle = [GE if bits >> (d - 3 - i) & 1 else LE for i in range(d - 2)]
        yield CasePattern((LE, *middle, GE))
