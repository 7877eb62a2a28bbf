"""The circulant family L(x, y, z) of Case III packing lattices.

For 1 <= p < log2(3) the family member is the solution of

    x^p + y^p + z^p = 1
    (x - y)^p + (z - x)^p + (y + z)^p = 1
    3 (-x + y + z)^p = 1

with z >= x >= y >= 0.  It starts at (1/3, 1/6, 1/2) for p = 1 (Minkowski's
octahedron lattice) and ends at (1/2, 1/2, 1/2), the bcc lattice, at
p = log2(3).

The residual and Jacobian are written once in terms of a ``power`` callable
so that :mod:`superpack.certifier` evaluates exactly the same formulas with
interval arithmetic.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DomainError, SolverError
from .geometry import check_exponent, superball_volume
from .lattice import Basis, count_neighbors

LOG2_3 = math.log2(3.0)
P1_START = (1.0 / 3.0, 1.0 / 6.0, 0.5)
ENDPOINT = (0.5, 0.5, 0.5)
# continuation stops this far below log2(3); the endpoint is analytic
ENDPOINT_GAP = 1e-9
SOLVE_TOL = 1e-11


@dataclass(frozen=True)
class FamilyPoint:
    p: float
    x: float
    y: float
    z: float
    residual: float = 0.0

    @property
    def xyz(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


def _float_power(t: float, e: float) -> float:
    if t < 0.0:
        raise DomainError(f"negative power argument {t!r}")
    # 0 ** 0 == 1 keeps the p = 1 Jacobian equal to its limit from p > 1
    return t**e


def system_terms(p, x, y, z, power: Callable = _float_power):
    """The three residual components, generic in the number type."""
    return (
        power(x, p) + power(y, p) + power(z, p) - 1,
        power(x - y, p) + power(z - x, p) + power(y + z, p) - 1,
        3 * power(-x + y + z, p) - 1,
    )


def power_terms(p, x, y, z, power: Callable = _float_power):
    """The seven t^(p-1) terms the Jacobian is built from.

    Order: x, y, z, x - y, z - x, y + z, -x + y + z.
    """
    m = p - 1
    return (
        power(x, m),
        power(y, m),
        power(z, m),
        power(x - y, m),
        power(z - x, m),
        power(y + z, m),
        power(-x + y + z, m),
    )


# Jacobian row i only reads these entries of ``power_terms``.
JACOBIAN_ROW_TERMS = ((0, 1, 2), (3, 4, 5), (6,))


def jacobian_from_powers(p, t):
    """Jacobian rows from precomputed power terms.

    Every entry is p times a linear combination of the terms; the certifier
    relies on this (it maximizes over vertices of the term box).
    """
    a, b, c, d = t[3], t[4], t[5], t[6]
    rows = (
        (t[0], t[1], t[2]),
        (a - b, -a + c, b + c),
        (-3 * d, 3 * d, 3 * d),
    )
    return tuple(tuple(p * e for e in row) for row in rows)


def jacobian_terms(p, x, y, z, power: Callable = _float_power):
    """Rows of the Jacobian of :func:`system_terms`, generic in the number type."""
    return jacobian_from_powers(p, power_terms(p, x, y, z, power))


def in_region(x: float, y: float, z: float, strict: bool = False) -> bool:
    """z >= x >= y >= 0 and -x + y + z >= 0 (all power arguments valid)."""
    vals = (y, x - y, z - x, -x + y + z)
    if strict:
        return all(v > 0.0 for v in vals)
    return all(v >= 0.0 for v in vals)


def family_system(p: float, x: float, y: float, z: float) -> np.ndarray:
    p = check_exponent(p)
    return np.array(system_terms(p, float(x), float(y), float(z)))


def family_jacobian(p: float, x: float, y: float, z: float) -> np.ndarray:
    """Jacobian of :func:`family_system` in (x, y, z).

    At p = 1 every t^(p-1) is taken as 1, including t = 0, so the matrix is
    constant there.
    """
    p = check_exponent(p)
    return np.array(jacobian_terms(p, float(x), float(y), float(z)))


def family_det(x: float, y: float, z: float) -> float:
    """det L(x, y, z) = y^3 + z^3 - x^3 + 3xyz."""
    return y**3 + z**3 - x**3 + 3.0 * x * y * z


def circulant(x: float, y: float, z: float) -> np.ndarray:
    return np.array([[-x, y, z], [z, -x, y], [y, z, -x]], dtype=float)


def family_matrix(pt: FamilyPoint) -> Basis:
    """The basis L(x, y, z); rows are cyclic shifts of (-x, y, z)."""
    return Basis(circulant(pt.x, pt.y, pt.z))


def _sup(v) -> float:
    return float(np.max(np.abs(v)))


def solve_family(
    p: float,
    start: Sequence[float],
    tol: float = SOLVE_TOL,
    max_iterations: int = 60,
) -> FamilyPoint:
    """Damped Newton on the family system from ``start``.

    Steps are halved until the iterate stays in the region and the residual
    sup-norm decreases.  Iteration continues past ``tol`` while it still
    makes progress, so the returned point is typically accurate to rounding.
    """
    p = check_exponent(p)
    v = np.array(start, dtype=float)
    if not in_region(*v, strict=True):
        raise DomainError(f"start {tuple(v)} is not strictly inside z > x > y > 0")
    r = _sup(family_system(p, *v))
    for _ in range(max_iterations):
        J = family_jacobian(p, *v)
        try:
            if np.linalg.cond(J) > 1e14:
                raise np.linalg.LinAlgError
            step = np.linalg.solve(J, -family_system(p, *v))
        except np.linalg.LinAlgError:
            raise SolverError("singular_jacobian", f"at p={p}, xyz={tuple(v)}") from None
        t = 1.0
        for _ in range(40):
            cand = v + t * step
            if in_region(*cand):
                rc = _sup(family_system(p, *cand))
                if rc < r or rc == 0.0:
                    break
            t *= 0.5
        else:
            if r <= tol:
                break
            raise SolverError("left_region", f"no admissible step at p={p}")
        v, r = cand, rc
        if r == 0.0 or (r <= tol and _sup(t * step) <= 1e-15):
            break
    else:
        if r > tol:
            raise SolverError("max_iterations", f"residual {r:.3g} at p={p}")
    if r > tol:
        raise SolverError("max_iterations", f"residual {r:.3g} at p={p}")
    return FamilyPoint(p, float(v[0]), float(v[1]), float(v[2]), r)


def continue_family(
    targets: Iterable[float],
    step: float = 0.01,
    min_step: float = 1e-13,
    start: FamilyPoint | None = None,
):
    """Yield family points at each target p, by continuation from p = 1.

    Targets are visited in increasing order.  The previous solution is the
    warm start; a failed solve halves the step.  Targets at or above
    log2(3) - 1e-9 are clamped there; use :func:`family_point` for the
    analytic endpoint.
    """
    if start is None:
        start = solve_family(1.0, P1_START)
    cur = start
    for target in sorted(float(t) for t in targets):
        target = min(target, LOG2_3 - ENDPOINT_GAP)
        if target < cur.p:
            raise ValueError(f"target p={target} lies below the continuation start {cur.p}")
        h = step
        while cur.p < target:
            nxt = min(cur.p + h, target)
            try:
                cur = solve_family(nxt, cur.xyz)
                h = min(step, 2.0 * h)
            except SolverError:
                h *= 0.5
                if h < min_step:
                    raise SolverError("max_iterations", f"continuation stalled at p={cur.p}")
        yield cur


def family_point(p: float) -> FamilyPoint:
    """Family member at one p, with the analytic endpoint at log2(3)."""
    p = check_exponent(p)
    if abs(p - LOG2_3) <= 1e-12:
        return FamilyPoint(p, *ENDPOINT, residual=_sup(family_system(p, *ENDPOINT)))
    if p > LOG2_3:
        raise DomainError(f"the family ends at log2(3); got p = {p}")
    return next(continue_family([p]))


@dataclass
class FamilyRow:
    p: float
    x: float | None = None
    y: float | None = None
    z: float | None = None
    det: float | None = None
    density: float | None = None
    neighbors: int | None = None
    residual: float | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def _row_from_point(pt: FamilyPoint, neighbor_tol: float) -> FamilyRow:
    det = family_det(pt.x, pt.y, pt.z)
    B = family_matrix(pt)
    return FamilyRow(
        p=pt.p,
        x=pt.x,
        y=pt.y,
        z=pt.z,
        det=det,
        density=superball_volume(pt.p, 0.5) / det,
        neighbors=count_neighbors(B, pt.p, neighbor_tol),
        residual=pt.residual,
    )


def family_table(p_values: Iterable[float], neighbor_tol: float = 1e-9) -> list[FamilyRow]:
    """Continuation table of (p, x, y, z, det, density, neighbors).

    A failing p yields a row with ``error`` set; later rows restart the
    continuation from the last good point.
    """
    ps = sorted(float(p) for p in p_values)
    rows: list[FamilyRow] = []
    cur = None
    for p in ps:
        try:
            check_exponent(p)
            if abs(p - LOG2_3) <= 1e-12:
                pt = family_point(p)
            elif p > LOG2_3:
                raise DomainError(f"the family ends at log2(3); got p = {p}")
            else:
                pt = next(continue_family([p], start=cur))
                cur = pt
            rows.append(_row_from_point(pt, neighbor_tol))
        except (SolverError, ValueError) as exc:
            rows.append(FamilyRow(p=p, error=str(exc)))
    return rows


TABLE_FIELDS = ("p", "x", "y", "z", "det", "density", "neighbors")


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{v:.12g}"


def table_to_csv(rows: Sequence[FamilyRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TABLE_FIELDS)
    for r in rows:
        w.writerow([_fmt(getattr(r, f)) for f in TABLE_FIELDS])
    return buf.getvalue()


def table_to_json(rows: Sequence[FamilyRow]) -> str:
    recs = []
    for r in rows:
        d = asdict(r)
        for k, v in d.items():
            if isinstance(v, float):
                d[k] = float(f"{v:.12g}")
        recs.append(d)
    return json.dumps(recs, indent=2)
