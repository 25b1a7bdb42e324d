"""Small hand-checked patterns and data used by tests, docs and the CLI."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mask import ObservationPattern


@dataclass(frozen=True)
class Fixture:
    name: str
    pattern: ObservationPattern
    note: str


def _p(columns, d, r) -> ObservationPattern:
    return ObservationPattern.from_columns(columns, d, r)


# five rows, rank two: the first four columns form a circuit of size d-r+1
five_row_circuit = Fixture(
    "five_row_circuit",
    _p([(1, 2, 3), (2, 3, 4), (3, 4, 5), (1, 4, 5), (1, 2, 4)], 5, 2),
    "all-of-a-kind with witness (1, 2, 3, 4)",
)

# three overlapping windows of three rows in R^5
staircase = Fixture(
    "staircase",
    _p([(1, 2, 3), (2, 3, 4), (3, 4, 5)], 5, 2),
    "independent, unique fit, too few columns for all-of-a-kind",
)

# two columns sharing row 1 in R^3 at rank one
two_column_line = Fixture(
    "two_column_line",
    _p([(1, 2), (1, 3)], 3, 1),
    "unique but not all-of-a-kind",
)

# every pair of rows in R^3 at rank one
triangle = Fixture(
    "triangle",
    _p([(1, 2), (1, 3), (2, 3)], 3, 1),
    "all-of-a-kind with witness (1, 2, 3)",
)

# column 3 has three distinct bases: itself, (1, 2) and (4, 5, 6)
three_bases = Fixture(
    "three_bases",
    _p([(1, 2, 3), (2, 3, 4), (1, 3, 4), (3, 4, 5), (4, 5, 6), (1, 5, 6)], 6, 2),
    "bases of column 3: (3,), (1, 2), (4, 5, 6)",
)

# three columns crowded into four rows block a rank of d - r
crowded = Fixture(
    "crowded",
    _p([(1, 2, 3), (2, 3, 4), (1, 3, 4), (4, 5, 6)], 6, 2),
    "indeterminate, rank 3, violating subfamily (1, 2, 3)",
)

# a rank-one four-cycle plus a chord: the chord has no basis of size d - r
cycle_with_chord = Fixture(
    "cycle_with_chord",
    _p([(1, 2), (2, 3), (3, 4), (1, 4), (1, 3)], 4, 1),
    "all-of-a-kind via (1, 2, 3, 4); column 5 lies on no circuit of size d - r + 1",
)

ALL = (five_row_circuit, staircase, two_column_line, triangle, three_bases, crowded, cycle_with_chord)
BY_NAME = {f.name: f for f in ALL}


def staircase_data() -> tuple[np.ndarray, np.ndarray]:
    """Basis with rows ``(1, j)`` and three data columns inside its span."""
    U = np.array([[1.0, j] for j in range(1, 6)])
    X = np.array(
        [
            [2.0, 2.0, 2.0, 2.0, 2.0],
            [3.0, 6.0, 9.0, 12.0, 15.0],
            [2.0, 3.0, 4.0, 5.0, 6.0],
        ]
    ).T
    return U, X


def deceptive_fit() -> dict:
    """Two columns from different lines whose observed entries both fit a third line."""
    nan = np.nan
    return {
        "pattern": two_column_line.pattern,
        "observed": np.array([[1.0, 1.0], [1.0, nan], [nan, 3.0]]),
        "fitting": np.array([[1.0], [1.0], [3.0]]),
        "true_bases": (np.array([[1.0], [1.0], [1.0]]), np.array([[1.0], [2.0], [3.0]])),
    }
