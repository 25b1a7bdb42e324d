"""Combinatorial certificates for observation patterns.

A family of columns is *independent* when every nonempty subfamily of ``n``
columns touches at least ``n + r`` distinct rows.  Independence is a
matroid on the columns, so ranks come from greedy augmentation.  On top of
it sit two certificates:

* ``UNIQUE``: an independent family of ``d - r`` columns.  Exactly one
  ``r``-dimensional subspace fits the pattern.
* ``ALL_OF_A_KIND``: a family of ``d - r + 1`` columns whose proper
  subfamilies are all independent.  Any fitting ``r``-dimensional subspace
  is then one of the true subspaces, and every column lies in it.

Two engines answer independence queries: exhaustive subset enumeration
(``"brute"``) and the matching test of :mod:`fitcert.tanner`
(``"matching"``).  ``"auto"`` enumerates while the subset count stays under
the cap and matches beyond it; ``"both"`` runs the two and insists they agree.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from . import tanner
from .errors import AssumptionError, BoundsError, CapacityError, EngineDisagreement
from .mask import ObservationPattern, columns_of

DEFAULT_CAP = 2**20
ENGINES = ("auto", "brute", "matching", "both")


# --- engines -----------------------------------------------------------------


def _popcount(bits: int) -> int:
    return bits.bit_count()


def _brute_violation(masks: Sequence[int], r: int, d: int, cap: int) -> tuple[int, ...] | None:
    """Least-cardinality, lexicographically first violating subfamily."""
    n = len(masks)
    if n == 0:
        return None
    if 2**n - 1 > cap:
        raise CapacityError(
            f"enumerating {n} columns needs {2**n - 1} subsets, over the cap of {cap}; "
            "use the matching engine or raise the cap",
            cap,
        )
    if d <= 64:
        unions = np.zeros(1, dtype=np.uint64)
        for b in masks:
            unions = np.concatenate([unions, unions | np.uint64(b)])
        m = np.bitwise_count(unions).astype(np.int64)
        sizes = np.bitwise_count(np.arange(2**n, dtype=np.uint64)).astype(np.int64)
        bad = np.flatnonzero((m < sizes + r) & (sizes > 0))
        if bad.size == 0:
            return None
        smallest = sizes[bad].min()
        cands = [tuple(k for k in range(n) if (int(s) >> k) & 1) for s in bad[sizes[bad] == smallest]]
        return min(cands)
    for size in range(1, n + 1):
        for combo in combinations(range(n), size):
            u = 0
            for k in combo:
                u |= masks[k]
            if _popcount(u) < size + r:
                return combo
    return None


def _pick_engine(engine: str, n: int, cap: int) -> str:
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}; choose from {ENGINES}")
    if engine == "auto":
        return "brute" if 2**n - 1 <= cap else "matching"
    return engine


def _violation(masks: Sequence[int], r: int, d: int, engine: str, cap: int) -> tuple[int, ...] | None:
    eng = _pick_engine(engine, len(masks), cap)
    if eng == "brute":
        return _brute_violation(masks, r, d, cap)
    if eng == "matching":
        return tanner.find_violation(masks, r)
    brute = _brute_violation(masks, r, d, cap)
    match = tanner.find_violation(masks, r)
    if (brute is None) != (match is None):
        raise EngineDisagreement(f"brute force says {brute}, matching says {match} for masks {list(masks)}")
    return brute


def _require_sizes(pattern: ObservationPattern) -> None:
    r = pattern.rank
    bad = [i for i, s in enumerate(pattern.sets, 1) if len(s) != r + 1]
    if bad:
        raise AssumptionError(
            f"columns {bad} do not have exactly r+1={r + 1} observed rows; split or drop them first"
        )


# --- results -------------------------------------------------------------------


@dataclass(frozen=True)
class TraceEntry:
    subset: tuple[int, ...]
    n: int
    m: int

    def to_dict(self) -> dict:
        return {"subset": list(self.subset), "n": self.n, "m": self.m}


def _entry(pattern: ObservationPattern, cols: Iterable[int]) -> TraceEntry:
    cols = tuple(sorted(cols))
    u = 0
    for i in cols:
        u |= pattern.sets[i - 1].bits
    return TraceEntry(cols, len(cols), _popcount(u))


@dataclass(frozen=True)
class IndependenceVerdict:
    independent: bool
    violating_subset: tuple[int, ...] | None = None

    def __bool__(self) -> bool:
        return self.independent


@dataclass(frozen=True)
class BasisWitness:
    """``basis_columns`` is a basis of column ``target``."""

    target: int
    basis_columns: tuple[int, ...]

    @property
    def trivial(self) -> bool:
        return self.basis_columns == (self.target,)


class CertificateKind(str, enum.Enum):
    UNIQUE = "UNIQUE"
    ALL_OF_A_KIND = "ALL_OF_A_KIND"
    INDETERMINATE = "INDETERMINATE"


@dataclass(frozen=True)
class Certificate:
    kind: CertificateKind
    witness: tuple[int, ...]
    d: int
    r: int
    trace: tuple[TraceEntry, ...] = field(default_factory=tuple)

    @property
    def violations(self) -> list[TraceEntry]:
        """Trace entries that failed the count, i.e. ``m < n + r``."""
        return [t for t in self.trace if t.m < t.n + self.r]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "witness": list(self.witness),
            "r": self.r,
            "d": self.d,
            "trace": [t.to_dict() for t in self.trace],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, doc: dict) -> "Certificate":
        return cls(
            kind=CertificateKind(doc["kind"]),
            witness=tuple(int(i) for i in doc["witness"]),
            d=int(doc["d"]),
            r=int(doc["r"]),
            trace=tuple(TraceEntry(tuple(int(i) for i in t["subset"]), int(t["n"]), int(t["m"])) for t in doc["trace"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        return cls.from_dict(json.loads(text))


# --- independence and rank ------------------------------------------------------


def find_violation(
    pattern: ObservationPattern,
    selection: Iterable[int] | None = None,
    engine: str = "auto",
    cap: int = DEFAULT_CAP,
) -> tuple[int, ...] | None:
    """Column ids of a subfamily with ``m < n + r``, or ``None``."""
    _require_sizes(pattern)
    sel = columns_of(pattern, selection)
    masks = [pattern.sets[i - 1].bits for i in sel]
    hit = _violation(masks, pattern.rank, pattern.ambient_dim, engine, cap)
    return None if hit is None else tuple(sel[k] for k in hit)


def is_independent(
    pattern: ObservationPattern,
    selection: Iterable[int] | None = None,
    engine: str = "auto",
    cap: int = DEFAULT_CAP,
) -> IndependenceVerdict:
    hit = find_violation(pattern, selection, engine, cap)
    return IndependenceVerdict(hit is None, hit)


class _Searcher:
    """Independence queries over one pattern, memoized by column set."""

    def __init__(self, pattern: ObservationPattern, engine: str, cap: int):
        _require_sizes(pattern)
        self.pattern = pattern
        self.engine = engine
        self.cap = cap
        self.bits = [0] + pattern.bitmasks()
        self._memo: dict[tuple[int, ...], tuple[int, ...] | None] = {}

    def violation(self, cols: Sequence[int]) -> tuple[int, ...] | None:
        key = tuple(sorted(cols))
        if key not in self._memo:
            hit = _violation([self.bits[i] for i in key], self.pattern.rank, self.pattern.ambient_dim, self.engine, self.cap)
            self._memo[key] = None if hit is None else tuple(key[k] for k in hit)
        return self._memo[key]

    def independent(self, cols: Sequence[int]) -> bool:
        return self.violation(cols) is None

    def greedy(self, sel: Sequence[int], trace: list[TraceEntry] | None = None) -> list[int]:
        basis: list[int] = []
        for i in sel:
            hit = self.violation(basis + [i])
            if hit is None:
                basis.append(i)
                if trace is not None:
                    trace.append(_entry(self.pattern, basis))
            elif trace is not None:
                trace.append(_entry(self.pattern, hit))
        return basis

    def is_circuit(self, cols: Sequence[int]) -> bool:
        cols = sorted(cols)
        if self.independent(cols):
            return False
        return all(self.independent([c for c in cols if c != x]) for x in cols)

    def circuits_through(self, target: int, pool: Sequence[int], size: int | None = None):
        """Yield sorted ``Ω`` with ``Ω ∪ {target}`` a circuit, in search order.

        Sizes ascend (or only ``size``); within a size, ``Ω`` comes out in
        lexicographic order.  Partial families that are already dependent
        together with the target are pruned, since every proper part of a
        circuit is independent.
        """
        pool = sorted(pool)
        sizes = [size] if size is not None else range(1, len(pool) + 1)
        budget = [self.cap]

        def dfs(start: int, chosen: list[int], k: int):
            if len(chosen) == k:
                if self.is_circuit(chosen + [target]):
                    yield tuple(chosen)
                return
            for pos in range(start, len(pool) - (k - len(chosen)) + 1):
                budget[0] -= 1
                if budget[0] < 0:
                    raise CapacityError(f"basis search exceeded the cap of {self.cap} nodes", self.cap)
                nxt = chosen + [pool[pos]]
                if len(nxt) < k and not self.independent(nxt + [target]):
                    continue
                yield from dfs(pos + 1, nxt, k)

        for k in sizes:
            if k < 1 or k > len(pool):
                continue
            yield from dfs(0, [], k)


def matroid_rank(
    pattern: ObservationPattern,
    selection: Iterable[int] | None = None,
    engine: str = "auto",
    cap: int = DEFAULT_CAP,
) -> int:
    """Size of a largest independent subfamily of ``selection``."""
    sel = columns_of(pattern, selection)
    return len(_Searcher(pattern, engine, cap).greedy(sel))


def greedy_basis(
    pattern: ObservationPattern,
    selection: Iterable[int] | None = None,
    engine: str = "auto",
    cap: int = DEFAULT_CAP,
) -> tuple[int, ...]:
    """Maximal independent subfamily picked in ascending column order."""
    sel = columns_of(pattern, selection)
    return tuple(_Searcher(pattern, engine, cap).greedy(sel))


def is_redundant(
    pattern: ObservationPattern,
    target: int,
    selection: Iterable[int],
    engine: str = "auto",
    cap: int = DEFAULT_CAP,
) -> bool:
    """Whether adding ``target`` to ``selection`` leaves the rank unchanged."""
    pattern.column(target)
    sel = columns_of(pattern, selection)
    if target in sel:
        raise ValueError(f"target column {target} must not be part of the selection")
    s = _Searcher(pattern, engine, cap)
    return len(s.greedy(list(sel) + [target])) == len(s.greedy(sel))


def find_basis_of(
    pattern: ObservationPattern,
    target: int,
    selection: Iterable[int] | None = None,
    size: int | None = None,
    engine: str = "auto",
    cap: int = DEFAULT_CAP,
) -> BasisWitness | None:
    """Smallest basis of ``target`` inside ``selection``, or ``None``.

    ``selection`` defaults to every other column.  Candidates are searched
    by increasing cardinality and then lexicographically, so the answer is
    deterministic.  Passing ``size`` restricts the search to that cardinality.
    """
    pattern.column(target)
    sel = columns_of(pattern, selection) if selection is not None else tuple(
        i for i in range(1, len(pattern) + 1) if i != target
    )
    if target in sel:
        raise ValueError(f"target column {target} must not be part of the selection")
    s = _Searcher(pattern, engine, cap)
    if len(s.greedy(list(sel) + [target])) == len(s.greedy(sel)):
        for basis in s.circuits_through(target, sel, size):
            return BasisWitness(target, basis)
    return None


def enumerate_bases(
    pattern: ObservationPattern,
    target: int,
    selection: Iterable[int] | None = None,
    include_trivial: bool = True,
    engine: str = "auto",
    cap: int = DEFAULT_CAP,
) -> list[BasisWitness]:
    """Every basis of ``target`` inside ``selection`` (default: all other columns)."""
    pattern.column(target)
    sel = columns_of(pattern, selection) if selection is not None else tuple(
        i for i in range(1, len(pattern) + 1) if i != target
    )
    sel = tuple(i for i in sel if i != target)
    s = _Searcher(pattern, engine, cap)
    out = [BasisWitness(target, (target,))] if include_trivial else []
    out.extend(BasisWitness(target, b) for b in s.circuits_through(target, sel))
    return out


# --- certificates ----------------------------------------------------------------


def certify_uniqueness(pattern: ObservationPattern, engine: str = "auto", cap: int = DEFAULT_CAP) -> Certificate:
    """Look for ``d - r`` independent columns by greedy augmentation."""
    d, r = pattern.ambient_dim, pattern.rank
    s = _Searcher(pattern, engine, cap)
    trace: list[TraceEntry] = []
    basis = s.greedy(range(1, len(pattern) + 1), trace)
    kind = CertificateKind.UNIQUE if len(basis) == d - r else CertificateKind.INDETERMINATE
    return Certificate(kind, tuple(basis), d, r, tuple(trace))


def certify_all_of_a_kind(pattern: ObservationPattern, engine: str = "auto", cap: int = DEFAULT_CAP) -> Certificate:
    """Look for ``d - r + 1`` columns whose proper subfamilies are independent.

    Such a family is a circuit of size ``d - r + 1``; each of its members
    has the rest as a basis.  Targets are tried in ascending order and only
    later columns are offered as partners, so the first hit is the
    lexicographically first witness.  Without one, the uniqueness
    certificate is returned instead.
    """
    d, r = pattern.ambient_dim, pattern.rank
    N = len(pattern)
    s = _Searcher(pattern, engine, cap)
    trace: list[TraceEntry] = []
    if N >= d - r + 1:
        everything = list(range(1, N + 1))
        full_rank = len(s.greedy(everything))
        if full_rank == d - r:
            for t in everything:
                others = [i for i in everything if i != t]
                # a column outside every circuit is a coloop and drops the rank
                if len(s.greedy(others)) < full_rank:
                    continue
                pool = [i for i in others if i > t]
                for basis in s.circuits_through(t, pool, d - r):
                    witness = tuple(sorted(basis + (t,)))
                    trace.append(_entry(pattern, witness))
                    for part in combinations(witness, d - r):
                        trace.append(_entry(pattern, part))
                    return Certificate(CertificateKind.ALL_OF_A_KIND, witness, d, r, tuple(trace))
    fallback = certify_uniqueness(pattern, engine, cap)
    return Certificate(fallback.kind, fallback.witness, d, r, tuple(trace) + fallback.trace)


def check_certificate(pattern: ObservationPattern, cert: Certificate) -> bool:
    """Re-derive a certificate's claim by direct subset counting."""
    d, r = pattern.ambient_dim, pattern.rank
    if (cert.d, cert.r) != (d, r):
        return False
    try:
        w = pattern.check_selection(cert.witness)
    except BoundsError:
        return False
    if len(w) != len(cert.witness):
        return False
    if cert.kind is CertificateKind.UNIQUE:
        return len(w) == d - r and find_violation(pattern, w, engine="brute") is None
    if cert.kind is CertificateKind.ALL_OF_A_KIND:
        if len(w) != d - r + 1:
            return False
        return all(find_violation(pattern, part, engine="brute") is None for part in combinations(w, d - r))
    return matroid_rank(pattern) < d - r
