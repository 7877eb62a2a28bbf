"""Lattice bases, packing density and packing verification for superballs.

The body is K = (1/2) B^p_3, so a basis B (columns b1, b2, b3) defines a
packing lattice exactly when ||B u||_p >= 1 for every nonzero integer u.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .geometry import check_exponent, conjugate_exponent, dual_norm, superball_volume

MIN_ABS_DET = 1e-12
DEFAULT_TOL = 1e-9
TABLE_TOL = 1e-6


class Basis:
    """3x3 real matrix whose columns generate a lattice."""

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        b = np.array(matrix, dtype=float)
        if b.size != 9:
            raise ValueError(f"basis needs 9 entries, got {b.size}")
        b = b.reshape(3, 3)
        if not np.all(np.isfinite(b)):
            raise ValueError("basis has non-finite entries")
        d = float(np.linalg.det(b))
        if abs(d) < MIN_ABS_DET:
            raise ValueError(f"determinant too small: |det| = {abs(d):.3g}")
        b.setflags(write=False)
        self.matrix = b

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.matrix))

    def __matmul__(self, u):
        return self.matrix @ np.asarray(u, dtype=float)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def scaled(self, s: float) -> "Basis":
        return Basis(s * self.matrix)

    def tolist(self) -> list[float]:
        """Row-major flat list, the serialized form."""
        return [float(x) for x in self.matrix.ravel()]

    def __repr__(self) -> str:
        return f"Basis({self.matrix.tolist()!r})"


@dataclass(frozen=True)
class NeighborCase:
    """One of Minkowski's contact configurations (one vector per +/- pair)."""

    case_id: str
    representatives: tuple[tuple[int, int, int], ...]

    @property
    def vectors(self) -> np.ndarray:
        return np.array(self.representatives, dtype=float)

    def __len__(self) -> int:
        return len(self.representatives)


CASE_I = NeighborCase(
    "I", ((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, -1, 0), (0, 1, -1), (1, 0, -1))
)
CASE_II = NeighborCase(
    "II", ((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (0, 1, 1), (1, 0, 1))
)
CASE_III = NeighborCase("III", CASE_II.representatives + ((1, 1, 1),))
CASES = {"I": CASE_I, "II": CASE_II, "III": CASE_III}


def get_case(key) -> NeighborCase:
    """Look up a case by 1/2/3, "I"/"II"/"III" or pass a case through."""
    if isinstance(key, NeighborCase):
        return key
    k = str(key).strip().upper()
    k = {"1": "I", "2": "II", "3": "III"}.get(k, k)
    try:
        return CASES[k]
    except KeyError:
        raise ValueError(f"unknown neighbor case {key!r}") from None


@dataclass
class PackingCheckReport:
    is_packing: bool
    min_norm: float
    argmin: tuple[int, int, int]
    enumeration_box: tuple[int, int, int]
    vectors_checked: int
    violators: list[tuple[int, int, int]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "is_packing": self.is_packing,
            "min_norm": self.min_norm,
            "argmin": list(self.argmin),
            "enumeration_box": list(self.enumeration_box),
            "vectors_checked": self.vectors_checked,
            "violators": [list(u) for u in self.violators],
        }


def _as_basis(B) -> Basis:
    return B if isinstance(B, Basis) else Basis(B)


def density(B, p: float) -> float:
    """vol((1/2) B^p_3) / |det B|.

    Only a packing density if ``B`` is a packing lattice; see
    :func:`verify_packing`.
    """
    B = _as_basis(B)
    return superball_volume(p, 0.5) / abs(B.det)


def enumeration_bound(B, p: float, mu: float) -> tuple[int, int, int]:
    """Box containing every integer u with ||B u||_p <= mu.

    Holder's inequality gives |u_i| <= ||row_i(B^-1)||_q * mu with q the
    conjugate exponent.
    """
    B = _as_basis(B)
    if mu < 0:
        raise ValueError("mu must be nonnegative")
    q = conjugate_exponent(p)
    inv = np.linalg.inv(B.matrix)
    return tuple(int(math.floor(dual_norm(row, q) * mu)) for row in inv)


def _canonical(u) -> tuple[int, int, int]:
    """Representative of {u, -u} whose first nonzero entry is positive."""
    u = tuple(int(x) for x in u)
    for x in u:
        if x != 0:
            return u if x > 0 else tuple(-y for y in u)
    return u


def _box_norms(B: Basis, p: float, tol: float):
    box = enumeration_bound(B, p, 1.0 + tol)
    U, norms = kernels.lattice_norms(B.matrix, p, box)
    return box, U, norms


def verify_packing(B, p: float, tol: float = DEFAULT_TOL) -> PackingCheckReport:
    """Decide the packing property by enumerating the Lemma-1 box.

    Every nonzero u with ||B u||_p <= 1 + tol lies inside the box, so the
    minimum found there is the lattice minimum whenever it is <= 1 + tol.
    """
    B = _as_basis(B)
    p = check_exponent(p)
    if not 0.0 <= tol <= 1e-3:
        raise ValueError(f"tol must lie in [0, 1e-3], got {tol}")
    box, U, norms = _box_norms(B, p, tol)
    if len(norms) == 0:
        # every nonzero lattice vector is longer than 1 + tol
        return PackingCheckReport(True, math.inf, (0, 0, 0), box, 0, [])
    k = int(np.argmin(norms))
    min_norm = float(norms[k])
    bad = {_canonical(u) for u in U[norms < 1.0 - tol]}
    return PackingCheckReport(
        is_packing=min_norm >= 1.0 - tol,
        min_norm=min_norm,
        argmin=_canonical(U[k]),
        enumeration_box=box,
        vectors_checked=int(len(norms)),
        violators=sorted(bad),
    )


def hanner_verify(B, p: float, tol: float = TABLE_TOL) -> bool:
    """Packing test for 1 < p < 2 from the Case III equalities alone.

    By Hanner's inequality, ||B u||_p = 1 on the seven Case III vectors
    forces ||B u||_p >= 1 on all of Z^3 minus the origin.
    """
    p = check_exponent(p)
    if not 1.0 < p < 2.0:
        raise ValueError(f"Hanner criterion needs 1 < p < 2, got p = {p}")
    B = _as_basis(B)
    V = np.abs(CASE_III.vectors @ B.matrix.T)
    norms = (V**p).sum(axis=1) ** (1.0 / p)
    return bool(np.max(np.abs(norms - 1.0)) <= tol)


def count_neighbors(B, p: float, tol: float = DEFAULT_TOL) -> int:
    """Number of nonzero lattice vectors u with ||B u||_p <= 1 + tol."""
    B = _as_basis(B)
    p = check_exponent(p)
    _, _, norms = _box_norms(B, p, tol)
    return int(np.count_nonzero(norms <= 1.0 + tol))


# serialization -------------------------------------------------------------


def basis_to_json(B, p: float | None = None) -> dict:
    out = {"matrix": _as_basis(B).tolist()}
    if p is not None:
        out["p"] = float(p)
    return out


def _parse_text_matrix(text: str) -> list[float]:
    values = []
    for tok in text.split():
        try:
            values.append(float(tok))
        except ValueError:
            raise ValueError(f"cannot parse matrix entry {tok!r}") from None
    return values


def _matrix_from_obj(obj) -> tuple[list[float], float | None]:
    if isinstance(obj, list):
        if obj and isinstance(obj[0], dict):
            return _matrix_from_obj(obj[0])
        obj = {"matrix": obj}
    if not isinstance(obj, dict) or "matrix" not in obj:
        raise ValueError("JSON basis must be an object with a 'matrix' key")
    flat = np.asarray(obj["matrix"], dtype=float).ravel().tolist()
    p = obj.get("p")
    return flat, (None if p is None else float(p))


def parse_basis(text: str) -> tuple[Basis, float | None]:
    """Parse either serialized form; returns (basis, p or None).

    Accepts ``{"matrix": [9 floats], "p": float}`` (nested 3x3 also
    tolerated), a JSON array of such records (the first one is used, which
    is the best result of a search), or 9 whitespace-separated floats.
    """
    stripped = text.strip()
    if stripped.startswith(("{", "[")):
        try:
            obj = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ValueError(f"invalid JSON basis: {exc}") from None
        flat, p = _matrix_from_obj(obj)
    else:
        flat, p = _parse_text_matrix(stripped), None
    if len(flat) != 9:
        raise ValueError(f"basis needs 9 entries, got {len(flat)}")
    return Basis(flat), p


def load_basis(path) -> tuple[Basis, float | None]:
    return parse_basis(Path(path).read_text())
