"""Naive ground truth.

Independence here is decided by listing every nonempty subfamily and
counting rows with Python sets.  Nothing in this module calls into the
certifier, except ``compare_engines``, whose whole purpose is to hold the
certifier's two engines against this reference.
"""
from __future__ import annotations

import dataclasses
import json
from concurrent.futures import ProcessPoolExecutor
from itertools import combinations
from typing import Iterable

import numpy as np

from .errors import CapacityError
from .geometry import assemble_A, kernel_dimension, numeric_rank
from .mask import ObservationPattern, ObservationSet
from .synth import AssignmentMode, GenSpec, MaskProperty, random_arrangement, random_mask, rng_for, STREAM_MASK

COLUMN_CAP = 20
TRIAL_DIM_CAP = 12


def _selection(pattern: ObservationPattern, selection: Iterable[int] | None) -> list[int]:
    sel = list(range(1, len(pattern) + 1)) if selection is None else sorted(set(selection))
    if len(sel) > COLUMN_CAP:
        raise CapacityError(f"{len(sel)} columns exceed the brute-force cap of {COLUMN_CAP}", COLUMN_CAP)
    for i in sel:
        pattern.column(i)
    return sel


def _rows(pattern: ObservationPattern, cols: Iterable[int]) -> set[int]:
    out: set[int] = set()
    for i in cols:
        out.update(pattern.sets[i - 1].indices)
    return out


def brute_force_independent(pattern: ObservationPattern, selection: Iterable[int] | None = None) -> bool:
    """True iff every nonempty subfamily touches at least ``n + r`` rows."""
    sel = _selection(pattern, selection)
    r = pattern.rank
    for n in range(1, len(sel) + 1):
        for sub in combinations(sel, n):
            if len(_rows(pattern, sub)) < n + r:
                return False
    return True


def brute_force_rank(pattern: ObservationPattern, selection: Iterable[int] | None = None) -> int:
    """Largest independent subfamily, by trying sizes from the top down."""
    sel = _selection(pattern, selection)
    for n in range(len(sel), 0, -1):
        for sub in combinations(sel, n):
            if brute_force_independent(pattern, sub):
                return n
    return 0


def brute_force_all_of_a_kind(pattern: ObservationPattern) -> tuple[int, ...] | None:
    """First ``d-r+1`` columns whose proper subfamilies all count ``m >= n + r``."""
    sel = _selection(pattern, None)
    d, r = pattern.ambient_dim, pattern.rank
    for cand in combinations(sel, d - r + 1):
        if all(brute_force_independent(pattern, part) for part in combinations(cand, d - r)):
            return cand
    return None


# --- numeric agreement -----------------------------------------------------------


def _uniform_mask(spec: GenSpec) -> ObservationPattern:
    rng = rng_for(spec.seed, STREAM_MASK)
    sets = tuple(
        ObservationSet(tuple(int(j) + 1 for j in rng.choice(spec.d, size=spec.r + 1, replace=False)), spec.d)
        for _ in range(spec.N)
    )
    return ObservationPattern(sets, spec.d, spec.r)


def _one_trial(args: tuple[GenSpec, int, ObservationPattern | None]) -> dict:
    spec, t, fixed = args
    if fixed is not None:
        pattern = fixed
    elif spec.mask_property is MaskProperty.EXPLICIT:
        pattern = _uniform_mask(spec)
    else:
        pattern = random_mask(spec)
    arrangement = random_arrangement(spec)
    A = assemble_A(arrangement, pattern).matrix
    rank_A = numeric_rank(A) if A.shape[0] else 0
    kdim = kernel_dimension(A, d=spec.d)
    ell = brute_force_rank(pattern)
    row = {
        "trial": t,
        "seed": spec.seed,
        "d": spec.d,
        "r": spec.r,
        "N": spec.N,
        "mode": spec.assignment_mode.value,
        "columns": [list(s.indices) for s in pattern.sets],
        "ell": ell,
        "numeric_rank": rank_A,
        "kernel_dim": kdim,
    }
    if spec.assignment_mode is AssignmentMode.ALL_SAME:
        row["claim"] = "rank_matches"
        row["agree"] = rank_A == ell and kdim == spec.d - ell
    elif brute_force_all_of_a_kind(pattern) is not None:
        row["claim"] = "no_fit"
        row["agree"] = kdim < spec.r
    else:
        row["claim"] = "none"
        row["agree"] = None
    return row


def agreement_trial(
    spec: GenSpec, trials: int, workers: int = 1, pattern: ObservationPattern | None = None
) -> list[dict]:
    """One report row per trial, with trial ``t`` seeded by ``spec.seed + t``.

    With ALL_SAME data the brute-force rank must equal the numeric rank of
    the constraint matrix.  With MIXED data on an all-of-a-kind mask the
    kernel must be too small to hold an ``r``-dimensional subspace.  Other
    MIXED trials carry no claim (``agree`` is ``None``).
    """
    if spec.d > TRIAL_DIM_CAP or spec.N > TRIAL_DIM_CAP:
        raise CapacityError(f"agreement trials need d, N <= {TRIAL_DIM_CAP}", TRIAL_DIM_CAP)
    jobs = [(dataclasses.replace(spec, seed=(spec.seed + t) % 2**64), t, pattern) for t in range(trials)]
    if workers > 1 and trials > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_one_trial, jobs))
    return [_one_trial(j) for j in jobs]


def summarize(report: list[dict]) -> dict:
    checked = [r for r in report if r["agree"] is not None]
    failed = [r for r in checked if not r["agree"]]
    return {
        "trials": len(report),
        "checked": len(checked),
        "agreed": len(checked) - len(failed),
        "disagreeing_seeds": [r["seed"] for r in failed],
    }


def report_lines(report: list[dict]) -> str:
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in report)


# --- engine cross-check -----------------------------------------------------------


def compare_engines(pattern: ObservationPattern) -> list[dict]:
    """Independence of every prefix of columns under both engines and this module.

    Returns the rows where any of the three disagrees, or where a reported
    violator does not actually violate the count.
    """
    from .certifier import find_violation

    out = []
    for k in range(1, len(pattern) + 1):
        prefix = list(range(1, k + 1))
        truth = brute_force_independent(pattern, prefix)
        verdicts = {}
        for engine in ("brute", "matching"):
            hit = find_violation(pattern, prefix, engine=engine)
            genuine = hit is None or len(_rows(pattern, hit)) < len(hit) + pattern.rank
            verdicts[engine] = (hit is None, genuine)
        if any(v != (truth, True) for v in verdicts.values()):
            out.append({"prefix": prefix, "oracle": truth, **{e: v[0] for e, v in verdicts.items()}})
    return out
