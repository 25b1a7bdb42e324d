"""Observation patterns: which rows of which columns were observed.

Rows and columns are 1-based everywhere a caller can see them.  A pattern is
written as a grid with one line per row and one character per column, ``x``
for an observed entry and ``.`` for a missing one::

    x..
    xx.
    xxx
    .xx
    ..x

or as JSON, ``{"d": 5, "r": 2, "columns": [[1, 2, 3], [2, 3, 4], [3, 4, 5]]}``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import BoundsError, MaskFormatError, UndersizedSetError

OBSERVED = "x"
MISSING = "."


@dataclass(frozen=True)
class ObservationSet:
    """Sorted row indices at which one column is observed."""

    indices: tuple[int, ...]
    ambient_dim: int

    def __post_init__(self):
        idx = tuple(sorted(int(j) for j in self.indices))
        if self.ambient_dim < 1:
            raise ValueError(f"ambient_dim must be positive, got {self.ambient_dim}")
        if not idx:
            raise ValueError("an observation set needs at least one row")
        if len(set(idx)) != len(idx):
            raise ValueError(f"duplicate row indices in {idx}")
        if idx[0] < 1 or idx[-1] > self.ambient_dim:
            raise BoundsError(f"rows {idx} outside 1..{self.ambient_dim}")
        object.__setattr__(self, "indices", idx)

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, j) -> bool:
        return j in self.indices

    @property
    def bits(self) -> int:
        """Row set as an integer bitmask (bit ``j-1`` set for row ``j``)."""
        out = 0
        for j in self.indices:
            out |= 1 << (j - 1)
        return out


@dataclass(frozen=True)
class ObservationPattern:
    """Ordered observation sets of ``N`` columns in ``R^d`` for rank ``r``."""

    sets: tuple[ObservationSet, ...]
    ambient_dim: int
    rank: int

    def __post_init__(self):
        object.__setattr__(self, "sets", tuple(self.sets))
        if self.rank < 1:
            raise ValueError(f"rank must be at least 1, got {self.rank}")
        if self.rank >= self.ambient_dim:
            raise ValueError(f"rank {self.rank} must be below ambient dimension {self.ambient_dim}")
        for i, s in enumerate(self.sets, start=1):
            if s.ambient_dim != self.ambient_dim:
                raise ValueError(f"column {i} has ambient_dim {s.ambient_dim}, expected {self.ambient_dim}")

    @classmethod
    def from_columns(cls, columns: Iterable[Iterable[int]], d: int, r: int) -> "ObservationPattern":
        return cls(tuple(ObservationSet(tuple(c), d) for c in columns), d, r)

    @property
    def n_columns(self) -> int:
        return len(self.sets)

    def __len__(self) -> int:
        return len(self.sets)

    def column(self, i: int) -> ObservationSet:
        """The observation set of 1-based column ``i``."""
        if not 1 <= i <= len(self.sets):
            raise BoundsError(f"column {i} outside 1..{len(self.sets)}")
        return self.sets[i - 1]

    def columns(self) -> list[tuple[int, ...]]:
        return [s.indices for s in self.sets]

    def bitmasks(self) -> list[int]:
        return [s.bits for s in self.sets]

    def check_selection(self, selection: Iterable[int]) -> tuple[int, ...]:
        """Normalize a column selection to a sorted tuple, validating bounds."""
        sel = tuple(sorted(set(int(i) for i in selection)))
        for i in sel:
            if not 1 <= i <= len(self.sets):
                raise BoundsError(f"column {i} outside 1..{len(self.sets)}")
        return sel

    def subpattern(self, selection: Iterable[int]) -> "ObservationPattern":
        sel = self.check_selection(selection)
        return ObservationPattern(tuple(self.sets[i - 1] for i in sel), self.ambient_dim, self.rank)


@dataclass(frozen=True)
class SubsetStats:
    """Counts for a selection of columns: ``n`` columns touching ``m`` rows."""

    n: int
    m: int
    column_ids: tuple[int, ...]
    row_ids: tuple[int, ...]


def subset_stats(pattern: ObservationPattern, selection: Iterable[int]) -> SubsetStats:
    sel = pattern.check_selection(selection)
    rows: set[int] = set()
    for i in sel:
        rows.update(pattern.sets[i - 1].indices)
    return SubsetStats(n=len(sel), m=len(rows), column_ids=sel, row_ids=tuple(sorted(rows)))


# --- text and JSON forms -------------------------------------------------


def parse_pattern(text: str, rank: int) -> ObservationPattern:
    """Parse a grid document into a pattern.

    Rows are separated by newlines (a ``/`` also works, for one-line
    grids).  Blank lines and surrounding whitespace are ignored.
    """
    lines = [ln.strip() for ln in text.replace("/", "\n").splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise MaskFormatError("empty grid")
    width = len(lines[0])
    for k, ln in enumerate(lines, start=1):
        if len(ln) != width:
            raise MaskFormatError(f"ragged grid: row {k} has {len(ln)} cells, expected {width}")
        bad = set(ln) - {OBSERVED, MISSING}
        if bad:
            raise MaskFormatError(f"row {k}: unknown character(s) {''.join(sorted(bad))!r}")
    d = len(lines)
    columns = []
    for i in range(width):
        col = tuple(j + 1 for j in range(d) if lines[j][i] == OBSERVED)
        if not col:
            raise MaskFormatError(f"column {i + 1} has no observed entries")
        columns.append(col)
    return ObservationPattern.from_columns(columns, d, rank)


def render_pattern(pattern: ObservationPattern) -> str:
    d = pattern.ambient_dim
    lines = []
    for j in range(1, d + 1):
        lines.append("".join(OBSERVED if j in s else MISSING for s in pattern.sets))
    return "\n".join(lines) + "\n"


def pattern_to_dict(pattern: ObservationPattern) -> dict:
    return {"d": pattern.ambient_dim, "r": pattern.rank, "columns": [list(s.indices) for s in pattern.sets]}


def pattern_from_dict(doc: dict, rank: int | None = None) -> ObservationPattern:
    try:
        d = int(doc["d"])
        r = int(doc["r"]) if rank is None else rank
        columns = doc["columns"]
    except (KeyError, TypeError, ValueError) as exc:
        raise MaskFormatError(f"bad mask JSON: {exc}") from exc
    if rank is not None and "r" in doc and int(doc["r"]) != rank:
        raise MaskFormatError(f"mask JSON declares r={doc['r']} but rank {rank} was requested")
    if not columns:
        raise MaskFormatError("mask JSON has no columns")
    try:
        return ObservationPattern.from_columns(columns, d, r)
    except (BoundsError, TypeError) as exc:
        raise MaskFormatError(f"bad mask JSON: {exc}") from exc


def load_pattern(text: str, rank: int | None = None) -> ObservationPattern:
    """Parse either mask form, telling them apart by a leading ``{``."""
    if text.lstrip().startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MaskFormatError(f"bad mask JSON: {exc}") from exc
        return pattern_from_dict(doc, rank)
    if rank is None:
        raise MaskFormatError("grid masks need an explicit rank")
    return parse_pattern(text, rank)


# --- assumptions -----------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    kind: str  # "A4-undersized", "A4-oversized" or "A5"
    columns: tuple[int, ...] = ()
    rows: tuple[int, ...] = ()


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def describe(self) -> str:
        if self.passed:
            return "all assumptions hold"
        parts = []
        for v in self.violations:
            if v.columns:
                parts.append(f"{v.kind}: columns {list(v.columns)}")
            else:
                parts.append(f"{v.kind}: rows {list(v.rows)} never observed")
        return "; ".join(parts)


def validate_assumptions(pattern: ObservationPattern) -> ValidationReport:
    """Check that every set has exactly ``r+1`` rows and that every row is observed."""
    r = pattern.rank
    under = tuple(i for i, s in enumerate(pattern.sets, 1) if len(s) <= r)
    over = tuple(i for i, s in enumerate(pattern.sets, 1) if len(s) > r + 1)
    seen: set[int] = set()
    for s in pattern.sets:
        seen.update(s.indices)
    unseen = tuple(j for j in range(1, pattern.ambient_dim + 1) if j not in seen)
    out = []
    if under:
        out.append(Violation("A4-undersized", columns=under))
    if over:
        out.append(Violation("A4-oversized", columns=over))
    if unseen:
        out.append(Violation("A5", rows=unseen))
    return ValidationReport(tuple(out))


def split_oversized(obs: ObservationSet, rank: int) -> ObservationPattern:
    """Replace one large observation set by ``|ω|-r+1`` sets of size ``r+1``.

    The sets are cyclic windows of width ``r+1`` over the sorted indices,
    starting at positions ``0..|ω|-r``; only the last one wraps.  Every
    proper sub-collection touches at least ``n+r`` rows, so the windows
    jointly pin down the same restriction as the original set.
    """
    k = len(obs)
    if k <= rank:
        raise UndersizedSetError(f"set of size {k} needs at least {rank + 1} rows for rank {rank}")
    idx = obs.indices
    if k == rank + 1:
        windows = [idx]
    else:
        windows = [tuple(idx[(s + t) % k] for t in range(rank + 1)) for s in range(k - rank + 1)]
    return ObservationPattern(tuple(ObservationSet(w, obs.ambient_dim) for w in windows), obs.ambient_dim, rank)


@dataclass(frozen=True)
class Normalized:
    """A pattern rewritten to satisfy the size assumption, with provenance."""

    pattern: ObservationPattern
    origin: tuple[int, ...]  # origin[i-1] = input column that produced column i
    dropped: tuple[int, ...] = ()


def normalize_sizes(pattern: ObservationPattern, split: bool = False, drop: bool = False) -> Normalized:
    """Split oversized and/or drop undersized columns.

    Without the matching flag, an offending column raises.
    """
    r = pattern.rank
    sets: list[ObservationSet] = []
    origin: list[int] = []
    dropped: list[int] = []
    for i, s in enumerate(pattern.sets, 1):
        if len(s) <= r:
            if not drop:
                raise UndersizedSetError(f"column {i} has {len(s)} observed rows; rank {r} needs {r + 1}")
            dropped.append(i)
        elif len(s) > r + 1:
            if not split:
                raise MaskFormatError(f"column {i} has {len(s)} observed rows; rank {r} expects {r + 1}")
            parts = split_oversized(s, r).sets
            sets.extend(parts)
            origin.extend([i] * len(parts))
        else:
            sets.append(s)
            origin.append(i)
    if not sets:
        raise UndersizedSetError("no usable columns remain")
    return Normalized(ObservationPattern(tuple(sets), pattern.ambient_dim, r), tuple(origin), tuple(dropped))


def columns_of(pattern: ObservationPattern, selection: Sequence[int] | None) -> tuple[int, ...]:
    if selection is None:
        return tuple(range(1, len(pattern) + 1))
    return pattern.check_selection(selection)
