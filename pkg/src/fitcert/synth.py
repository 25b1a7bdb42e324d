"""Seeded generation of arrangements, data and masks.

Randomness comes from numpy's PCG64 bit generator.  Each kind of draw uses
its own stream, ``SeedSequence(seed, spawn_key=(stream,))``, so changing the
number of columns never perturbs the bases and vice versa.  Normal variates
use ``Generator.standard_normal``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .certifier import CertificateKind, certify_all_of_a_kind
from .errors import GenerationError, ShapeError
from .geometry import Arrangement, SubspaceBasis, is_degenerate
from .mask import ObservationPattern, ObservationSet

ARRANGEMENT_RETRIES = 16
MASK_ATTEMPTS = 10**4

STREAM_BASES = 0
STREAM_COEFFS = 1
STREAM_MASK = 2


class MaskProperty(str, enum.Enum):
    SATISFIES_T1 = "SATISFIES_T1"
    SATISFIES_T2_ONLY = "SATISFIES_T2_ONLY"
    FAILS_BOTH = "FAILS_BOTH"
    EXPLICIT = "EXPLICIT"


class AssignmentMode(str, enum.Enum):
    ALL_SAME = "ALL_SAME"
    MIXED = "MIXED"


@dataclass(frozen=True)
class GenSpec:
    d: int
    r: int
    K: int = 1
    N: int = 1
    seed: int = 0
    mask_property: MaskProperty = MaskProperty.SATISFIES_T1
    assignment_mode: AssignmentMode = AssignmentMode.ALL_SAME

    def __post_init__(self):
        object.__setattr__(self, "mask_property", MaskProperty(self.mask_property))
        object.__setattr__(self, "assignment_mode", AssignmentMode(self.assignment_mode))
        for name in ("d", "r", "K", "N"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be a positive integer")
        if self.r >= self.d:
            raise ValueError(f"r={self.r} must be below d={self.d}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "r": self.r,
            "K": self.K,
            "N": self.N,
            "seed": self.seed,
            "mask_property": self.mask_property.value,
            "assignment_mode": self.assignment_mode.value,
        }


def rng_for(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream,))))


def assignment_for(mode: AssignmentMode | str, N: int, K: int) -> tuple[int, ...]:
    """ALL_SAME puts every column in subspace 1; MIXED cycles 1..K."""
    if AssignmentMode(mode) is AssignmentMode.ALL_SAME:
        return (1,) * N
    return tuple(i % K + 1 for i in range(N))


def random_arrangement(spec: GenSpec) -> Arrangement:
    """``K`` Gaussian ``d x r`` bases, each redrawn while degenerate."""
    rng = rng_for(spec.seed, STREAM_BASES)
    bases = []
    for _ in range(spec.K):
        for _attempt in range(ARRANGEMENT_RETRIES):
            U = rng.standard_normal((spec.d, spec.r))
            try:
                basis = SubspaceBasis(U)
            except ShapeError:
                continue
            if not is_degenerate(basis):
                bases.append(basis)
                break
        else:
            raise GenerationError(f"no non-degenerate basis after {ARRANGEMENT_RETRIES} draws")
    return Arrangement(tuple(bases), assignment_for(spec.assignment_mode, spec.N, spec.K))


def sample_columns(
    arrangement: Arrangement, N: int, mode: AssignmentMode | str, seed: int
) -> tuple[np.ndarray, tuple[int, ...]]:
    """Data matrix whose column ``i`` is ``U_{k_i} g_i`` with Gaussian ``g_i``."""
    K = len(arrangement.bases)
    assignment = assignment_for(mode, N, K)
    rng = rng_for(seed, STREAM_COEFFS)
    G = rng.standard_normal((arrangement.r, N))
    X = np.empty((arrangement.d, N))
    for i, k in enumerate(assignment):
        X[:, i] = arrangement.bases[k - 1].matrix @ G[:, i]
    return X, assignment


def _kind_wanted(prop: MaskProperty) -> CertificateKind:
    return {
        MaskProperty.SATISFIES_T1: CertificateKind.ALL_OF_A_KIND,
        MaskProperty.SATISFIES_T2_ONLY: CertificateKind.UNIQUE,
        MaskProperty.FAILS_BOTH: CertificateKind.INDETERMINATE,
    }[prop]


def random_mask(spec: GenSpec) -> ObservationPattern:
    """Rejection-sample ``(r+1)``-subsets per column until the pattern has the requested property.

    The all-of-a-kind certifier falls back to uniqueness, so its verdict
    separates the three properties exactly.
    """
    prop = spec.mask_property
    if prop is MaskProperty.EXPLICIT:
        raise ValueError("EXPLICIT masks are supplied by the caller, not sampled")
    d, r, N = spec.d, spec.r, spec.N
    if prop is MaskProperty.SATISFIES_T1 and N < d - r + 1:
        raise GenerationError(f"an all-of-a-kind mask needs N >= {d - r + 1}, got {N}")
    if prop is MaskProperty.SATISFIES_T2_ONLY and N < d - r:
        raise GenerationError(f"a uniqueness mask needs N >= {d - r}, got {N}")
    want = _kind_wanted(prop)
    rng = rng_for(spec.seed, STREAM_MASK)
    for _ in range(MASK_ATTEMPTS):
        sets = tuple(
            ObservationSet(tuple(int(j) + 1 for j in rng.choice(d, size=r + 1, replace=False)), d) for _ in range(N)
        )
        pattern = ObservationPattern(sets, d, r)
        if certify_all_of_a_kind(pattern).kind is want:
            return pattern
    raise GenerationError(f"no {prop.value} mask in {MASK_ATTEMPTS} attempts; try a larger N")


@dataclass(frozen=True, eq=False)
class Instance:
    """Everything one seeded generation produces."""

    spec: GenSpec
    arrangement: Arrangement
    data: np.ndarray
    pattern: ObservationPattern

    @property
    def masked_data(self) -> np.ndarray:
        out = np.full_like(self.data, np.nan)
        for i, obs in enumerate(self.pattern.sets):
            idx = [j - 1 for j in obs]
            out[idx, i] = self.data[idx, i]
        return out


def generate(spec: GenSpec, pattern: ObservationPattern | None = None) -> Instance:
    """Arrangement, data and mask for ``spec``; ``pattern`` is required for EXPLICIT masks."""
    if spec.mask_property is MaskProperty.EXPLICIT:
        if pattern is None:
            raise ValueError("EXPLICIT generation needs a pattern")
        if (pattern.ambient_dim, pattern.rank, len(pattern)) != (spec.d, spec.r, spec.N):
            raise ShapeError("supplied pattern does not match d, r, N")
    else:
        pattern = random_mask(spec)
    arrangement = random_arrangement(spec)
    X, _ = sample_columns(arrangement, spec.N, spec.assignment_mode, spec.seed)
    return Instance(spec, arrangement, X, pattern)
