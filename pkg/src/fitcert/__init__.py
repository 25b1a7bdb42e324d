"""Certify from an observation pattern alone whether partially observed
vectors pin down a unique r-dimensional subspace."""

__version__ = "0.1.0"

from .certifier import (
    BasisWitness,
    Certificate,
    CertificateKind,
    certify_all_of_a_kind,
    certify_uniqueness,
    check_certificate,
    enumerate_bases,
    find_basis_of,
    find_violation,
    is_independent,
    is_redundant,
    matroid_rank,
)
from .geometry import (
    Arrangement,
    ConstraintMatrix,
    DirectionRow,
    SubspaceBasis,
    assemble_A,
    direction_row,
    fits,
    fits_pattern,
    is_degenerate,
    kernel_dimension,
    restrict,
)
from .mask import (
    ObservationPattern,
    ObservationSet,
    load_pattern,
    parse_pattern,
    render_pattern,
    split_oversized,
    subset_stats,
    validate_assumptions,
)
from .synth import GenSpec, random_arrangement, random_mask, sample_columns

__all__ = [
    "Arrangement",
    "BasisWitness",
    "Certificate",
    "CertificateKind",
    "ConstraintMatrix",
    "DirectionRow",
    "GenSpec",
    "ObservationPattern",
    "ObservationSet",
    "SubspaceBasis",
    "assemble_A",
    "certify_all_of_a_kind",
    "certify_uniqueness",
    "check_certificate",
    "direction_row",
    "enumerate_bases",
    "find_basis_of",
    "find_violation",
    "fits",
    "fits_pattern",
    "is_degenerate",
    "is_independent",
    "is_redundant",
    "kernel_dimension",
    "load_pattern",
    "matroid_rank",
    "parse_pattern",
    "random_arrangement",
    "random_mask",
    "render_pattern",
    "restrict",
    "sample_columns",
    "split_oversized",
    "subset_stats",
    "validate_assumptions",
]
