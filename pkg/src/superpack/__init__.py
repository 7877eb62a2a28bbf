"""Densest lattice packings of three-dimensional superballs.

Submodules: ``geometry`` (norms, volumes), ``lattice`` (bases, packing
checks), ``optimizer`` (Newton search), ``family`` (the circulant family),
``interval`` (outward-rounded arithmetic) and ``certifier`` (existence
certificates).
"""

from .errors import DomainError, KinkError, SolverError
from .geometry import conjugate_exponent, dual_norm, lp_norm, superball_volume
from .kernels import BACKEND
from .lattice import (
    CASE_I,
    CASE_II,
    CASE_III,
    Basis,
    NeighborCase,
    count_neighbors,
    density,
    enumeration_bound,
    hanner_verify,
    verify_packing,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Basis",
    "CASE_I",
    "CASE_II",
    "CASE_III",
    "DomainError",
    "KinkError",
    "NeighborCase",
    "SolverError",
    "conjugate_exponent",
    "count_neighbors",
    "density",
    "dual_norm",
    "enumeration_bound",
    "hanner_verify",
    "lp_norm",
    "superball_volume",
    "verify_packing",
]
