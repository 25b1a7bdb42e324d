"""Numeric side: bases, restrictions, direction rows and the constraint matrix.

For a non-degenerate basis ``U`` of an ``r``-dimensional subspace and an
observation set ``ω`` of ``r+1`` rows, the restriction ``U_ω`` spans a
hyperplane of ``R^{r+1}``.  Its normal, padded with zeros to length ``d``,
is the direction row of ``ω``.  Stacking one row per column gives the
constraint matrix ``A``; every ``r``-dimensional subspace that fits the
pattern lies in ``ker A``.
"""
from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np
from scipy.linalg import null_space, orth, subspace_angles

from .errors import DegeneracyError, ShapeError
from .mask import ObservationPattern, ObservationSet

TAU_RANK = 1e-9
TAU_FIT = 1e-8
DEGENERACY_SUBSET_CAP = 10**6


def _frozen(a) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """A ``d x r`` matrix whose columns span one subspace."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.ndim == 1:
            m = _frozen(m.reshape(-1, 1))
        if m.ndim != 2 or m.shape[1] < 1 or m.shape[0] < m.shape[1]:
            raise ShapeError(f"basis must be d x r with r <= d, got shape {m.shape}")
        if numeric_rank(m) != m.shape[1]:
            raise ShapeError("basis columns are linearly dependent")
        object.__setattr__(self, "matrix", m)

    @property
    def d(self) -> int:
        return self.matrix.shape[0]

    @property
    def r(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True, eq=False)
class Arrangement:
    """``K`` bases and a 1-based assignment of each column to one of them."""

    bases: tuple[SubspaceBasis, ...]
    assignment: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "bases", tuple(self.bases))
        object.__setattr__(self, "assignment", tuple(int(k) for k in self.assignment))
        if not self.bases:
            raise ShapeError("an arrangement needs at least one basis")
        shapes = {(b.d, b.r) for b in self.bases}
        if len(shapes) != 1:
            raise ShapeError(f"bases disagree on shape: {sorted(shapes)}")
        K = len(self.bases)
        bad = [k for k in self.assignment if not 1 <= k <= K]
        if bad:
            raise ShapeError(f"assignment entries {bad} outside 1..{K}")

    @property
    def d(self) -> int:
        return self.bases[0].d

    @property
    def r(self) -> int:
        return self.bases[0].r

    def basis_of(self, i: int) -> SubspaceBasis:
        """Basis of the subspace that 1-based column ``i`` lives in."""
        return self.bases[self.assignment[i - 1] - 1]


@dataclass(frozen=True, eq=False)
class DirectionRow:
    row: np.ndarray
    support: ObservationSet


@dataclass(frozen=True, eq=False)
class ConstraintMatrix:
    rows: tuple[DirectionRow, ...]
    d: int

    @property
    def matrix(self) -> np.ndarray:
        if not self.rows:
            return np.zeros((0, self.d))
        return np.vstack([dr.row for dr in self.rows])

    def __len__(self) -> int:
        return len(self.rows)


# --- linear algebra helpers ---------------------------------------------------


def singular_values(M) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return np.zeros(0)
    return np.linalg.svd(M, compute_uv=False)


def numeric_rank(M, tol: float = TAU_RANK) -> int:
    """Singular values above ``tol * sigma_max``."""
    s = singular_values(M)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def kernel_dimension(A: ConstraintMatrix | np.ndarray, tol: float = TAU_RANK, d: int | None = None) -> int:
    if isinstance(A, ConstraintMatrix):
        return A.d - numeric_rank(A.matrix, tol)
    M = np.asarray(A, dtype=float)
    if d is None:
        d = M.shape[1]
    return d - numeric_rank(M, tol)


def kernel_basis(A: ConstraintMatrix | np.ndarray, tol: float = TAU_RANK) -> np.ndarray:
    """Orthonormal basis of ``ker A`` (``d x dim``), by the same threshold as the rank."""
    M = A.matrix if isinstance(A, ConstraintMatrix) else np.asarray(A, dtype=float)
    if M.shape[0] == 0:
        return np.eye(M.shape[1])
    s = singular_values(M)
    rcond = tol if s[0] > 0 else None
    return null_space(M, rcond=rcond)


def subspace_distance(P, Q) -> float:
    """Sine of the largest principal angle between two column spans."""
    P, Q = np.asarray(P, dtype=float), np.asarray(Q, dtype=float)
    if P.shape[1] != Q.shape[1]:
        return 1.0
    if P.shape[1] == 0:
        return 0.0
    return float(np.sin(np.max(subspace_angles(P, Q))))


# --- operations ----------------------------------------------------------------


def is_degenerate(basis: SubspaceBasis, tol: float = TAU_RANK, rng: np.random.Generator | None = None) -> bool:
    """Whether some ``r x r`` row block of the basis is rank deficient.

    Blocks are judged against the scale of the whole basis, so an all-zero
    block counts as deficient.  With more than ``DEGENERACY_SUBSET_CAP``
    blocks a random sample of that size is checked instead, with a warning.
    """
    U = basis.matrix
    d, r = U.shape
    k = min(r, d)
    scale = singular_values(U)[0]
    if scale == 0.0:
        return True
    total = math.comb(d, k)
    if total <= DEGENERACY_SUBSET_CAP:
        blocks = combinations(range(d), k)
    else:
        warnings.warn(f"{total} row blocks to check; sampling {DEGENERACY_SUBSET_CAP}", RuntimeWarning)
        rng = rng or np.random.default_rng(0)
        blocks = (tuple(sorted(rng.choice(d, size=k, replace=False))) for _ in range(DEGENERACY_SUBSET_CAP))
    for rows in blocks:
        s = singular_values(U[list(rows)])
        if s[-1] <= tol * scale:
            return True
    return False


def restrict(basis: SubspaceBasis | np.ndarray, obs: ObservationSet | Sequence[int]) -> np.ndarray:
    """Rows of the basis at the observed (1-based) indices, ascending."""
    U = basis.matrix if isinstance(basis, SubspaceBasis) else np.asarray(basis, dtype=float)
    idx = [j - 1 for j in sorted(obs)]
    return U[idx]


def direction_row(
    basis: SubspaceBasis, obs: ObservationSet, pivot: int | None = None, tol: float = TAU_RANK
) -> DirectionRow:
    """Normal of the restricted subspace, scaled to 1 at ``pivot`` (default: last row)."""
    U = basis.matrix
    r = U.shape[1]
    if len(obs) != r + 1:
        raise ShapeError(f"observation set has {len(obs)} rows; rank {r} needs {r + 1}")
    if obs.ambient_dim != U.shape[0]:
        raise ShapeError(f"observation set lives in R^{obs.ambient_dim}, basis in R^{U.shape[0]}")
    if pivot is None:
        pivot = obs.indices[-1]
    if pivot not in obs:
        raise ValueError(f"pivot {pivot} not in {obs.indices}")
    rest = [j for j in obs.indices if j != pivot]
    block = U[[j - 1 for j in rest]]
    s = singular_values(block)
    scale = singular_values(U)[0]
    if s[-1] <= tol * scale:
        raise DegeneracyError(f"rows {rest} of the basis are singular; the subspace is degenerate")
    coeffs = np.linalg.solve(block.T, U[pivot - 1])
    row = np.zeros(U.shape[0])
    row[pivot - 1] = 1.0
    row[[j - 1 for j in rest]] = -coeffs
    return DirectionRow(_frozen(row), obs)


def assemble_A(arrangement: Arrangement, pattern: ObservationPattern, tol: float = TAU_RANK) -> ConstraintMatrix:
    if len(arrangement.assignment) != len(pattern):
        raise ShapeError(f"{len(arrangement.assignment)} assignments for {len(pattern)} columns")
    if arrangement.d != pattern.ambient_dim or arrangement.r != pattern.rank:
        raise ShapeError(
            f"arrangement is d={arrangement.d}, r={arrangement.r}; pattern is d={pattern.ambient_dim}, r={pattern.rank}"
        )
    rows = []
    for i, obs in enumerate(pattern.sets, 1):
        try:
            rows.append(direction_row(arrangement.basis_of(i), obs, tol=tol))
        except DegeneracyError as exc:
            raise DegeneracyError(f"column {i}: {exc}", column=i) from exc
    return ConstraintMatrix(tuple(rows), pattern.ambient_dim)


def fits(basis_S: SubspaceBasis | np.ndarray, vector, obs: ObservationSet | Sequence[int], tol: float = TAU_FIT) -> bool:
    """Whether the observed part of ``vector`` lies in the restricted span."""
    Uo = restrict(basis_S, obs)
    x = np.asarray(vector, dtype=float)[[j - 1 for j in sorted(obs)]]
    coef, *_ = np.linalg.lstsq(Uo, x, rcond=None)
    resid = np.linalg.norm(x - Uo @ coef)
    return bool(resid <= tol * max(1.0, np.linalg.norm(x)))


def _span(M: np.ndarray, tol: float) -> np.ndarray:
    s = singular_values(M)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((M.shape[0], 0))
    return orth(M, rcond=tol)


def same_span(P: np.ndarray, Q: np.ndarray, tol: float = TAU_FIT) -> bool:
    """Mutual containment of two column spans, by projection residuals."""
    Po, Qo = _span(P, TAU_RANK), _span(Q, TAU_RANK)
    if Po.shape[1] != Qo.shape[1]:
        return False
    if Po.shape[1] == 0:
        return True
    r1 = np.linalg.norm(Qo - Po @ (Po.T @ Qo))
    r2 = np.linalg.norm(Po - Qo @ (Qo.T @ Po))
    return bool(max(r1, r2) <= tol)


def fits_pattern(
    basis_S: SubspaceBasis | np.ndarray, arrangement: Arrangement, pattern: ObservationPattern, tol: float = TAU_FIT
) -> bool:
    """Whether ``S`` restricted to each column's rows equals that column's true restriction."""
    U = basis_S.matrix if isinstance(basis_S, SubspaceBasis) else np.asarray(basis_S, dtype=float)
    if U.ndim == 1:
        U = U.reshape(-1, 1)
    if U.shape[0] != pattern.ambient_dim or len(arrangement.assignment) != len(pattern):
        raise ShapeError("subspace, arrangement and pattern disagree on dimensions")
    for i, obs in enumerate(pattern.sets, 1):
        if not same_span(restrict(U, obs), restrict(arrangement.basis_of(i), obs), tol):
            return False
    return True


# --- matrix files ----------------------------------------------------------------

MISSING_TOKEN = "."


def read_matrix_csv(text: str) -> np.ndarray:
    """Parse CSV into floats; the token ``.`` becomes NaN."""
    rows = [row for row in csv.reader(io.StringIO(text)) if row and any(c.strip() for c in row)]
    if not rows:
        raise ShapeError("empty matrix file")
    width = len(rows[0])
    out = np.empty((len(rows), width))
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ShapeError(f"row {i + 1} has {len(row)} entries, expected {width}")
        for j, cell in enumerate(row):
            cell = cell.strip()
            try:
                out[i, j] = np.nan if cell == MISSING_TOKEN else float(cell)
            except ValueError as exc:
                raise ShapeError(f"row {i + 1}, column {j + 1}: cannot read {cell!r}") from exc
    return out


def write_matrix_csv(M: np.ndarray) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in np.asarray(M, dtype=float):
        w.writerow([MISSING_TOKEN if np.isnan(v) else repr(float(v)) for v in row])
    return buf.getvalue()


def read_matrix_json(text: str) -> np.ndarray:
    doc = json.loads(text)
    if not isinstance(doc, list) or not doc:
        raise ShapeError("matrix JSON must be a non-empty array of rows")
    width = len(doc[0])
    if any(len(row) != width for row in doc):
        raise ShapeError("ragged matrix JSON")
    return np.array([[np.nan if v is None else float(v) for v in row] for row in doc], dtype=float)


def write_matrix_json(M: np.ndarray) -> str:
    return json.dumps([[None if np.isnan(v) else float(v) for v in row] for row in np.asarray(M, dtype=float)])


def read_matrix(text: str) -> np.ndarray:
    """Either matrix form, telling them apart by a leading ``[``."""
    if text.lstrip().startswith("["):
        return read_matrix_json(text)
    return read_matrix_csv(text)


def arrangement_to_dict(arr: Arrangement) -> dict:
    return {
        "d": arr.d,
        "r": arr.r,
        "bases": [[[float(v) for v in row] for row in b.matrix] for b in arr.bases],
        "assignment": list(arr.assignment),
    }


def arrangement_from_dict(doc: dict) -> Arrangement:
    return Arrangement(tuple(SubspaceBasis(np.array(b, dtype=float)) for b in doc["bases"]), tuple(doc["assignment"]))
