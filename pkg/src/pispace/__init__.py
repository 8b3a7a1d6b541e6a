"""Exact combinatorics and integral homology for finite pre-independence
spaces (pi-spaces) and matroids: independence complexes, lattices of
flats, closed-set posets, injective-word posets, and homological
Cohen-Macaulay / sphericity verification over the integers."""

from .core import (
    AxiomReport,
    AxiomWitness,
    CapExceeded,
    DependentSeed,
    EmptyRestriction,
    InvalidSpec,
    NotDownwardClosed,
    OutOfRange,
    PiSpace,
    PiSpaceError,
    boolean,
    build_family,
    check_axioms,
    explicit,
    graphic,
    linear_gfp,
    uniform,
    w_equals_fin_check,
)

__version__ = "0.1.0"
