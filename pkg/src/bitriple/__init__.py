"""Exact lattice and finite-field verification of Z3^2-cover constructions of
surfaces of general type whose canonical map has degree 3."""

from bitriple.kernels import BACKEND
from bitriple.picard import (
    BlowupSurface,
    DivisorClass,
    InfinitelyNear,
    LatticeError,
    blowup_pullback,
    canonical_class,
    intersect,
    named_class,
    parse_class,
)

__all__ = [
    "BACKEND",
    "BlowupSurface",
    "DivisorClass",
    "InfinitelyNear",
    "LatticeError",
    "blowup_pullback",
    "canonical_class",
    "intersect",
    "named_class",
    "parse_class",
]
