"""Interval-arithmetic existence certificates for the family.

For each subinterval P = [p0, p0 + peps] and box X of radius eps (l-infinity)
around a numerical center, the effective implicit function theorem gives a
zero of f_p in X for every p in P whenever

    || Df_P(X) T - I ||  <  1 - ||T|| * |f_P(center)| / eps

for some fixed matrix T.  Norms are l-infinity, so the operator norm is the
largest absolute row sum.  T is a floating-point inverse of the point
Jacobian at (p0, center); rigor lives in the interval evaluation only.

A passing row shows existence of a solution that is unique within the box;
a chain of passing rows without gaps covers a p-range.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import family
from .errors import SolverError
from .interval import (
    Interval,
    IntervalMatrix3,
    abs_val,
    ipow,
    linf_op_norm,
    vec_linf,
)
from .reference import PRINTED_SCHEDULE_ROWS

COND_LIMIT = 1e12
MAX_DEPTH = 16
P_COVER_END = 1.58
COARSE = (0.03, 0.01)
FINE = (0.006, 0.001)


@dataclass(frozen=True)
class ScheduleEntry:
    """Arguments of one certificate row: p0, x0, y0, z0, eps, peps."""

    p0: float
    x0: float
    y0: float
    z0: float
    eps: float
    peps: float

    @property
    def center(self) -> tuple[float, float, float]:
        return (self.x0, self.y0, self.z0)


@dataclass
class CertificateRow:
    p_lo: float
    p_hi: float
    center: tuple[float, float, float]
    eps: float
    T: np.ndarray | None
    lhs: Interval | None
    rhs: Interval | None
    region_ok: bool
    passed: bool
    status: str

    @property
    def margin(self) -> float | None:
        """rhs.lo - lhs.hi; positive for passing rows."""
        if self.lhs is None or self.rhs is None:
            return None
        return self.rhs.lo - self.lhs.hi

    def to_dict(self) -> dict:
        return {
            "p_lo": self.p_lo,
            "p_hi": self.p_hi,
            "center": list(self.center),
            "eps": self.eps,
            "T": None if self.T is None else [float(t) for t in np.ravel(self.T)],
            "lhs": None if self.lhs is None else [self.lhs.lo, self.lhs.hi],
            "rhs": None if self.rhs is None else [self.rhs.lo, self.rhs.hi],
            "region_ok": self.region_ok,
            "pass": self.passed,
            "status": self.status,
        }


@dataclass
class CertificateChain:
    rows: list[CertificateRow]
    covered: tuple[float, float]

    @property
    def all_pass(self) -> bool:
        return all(r.passed for r in self.rows)

    def covers(self, a: float, b: float) -> bool:
        return self.covered[0] <= a and b <= self.covered[1]

    def summary(self) -> dict:
        return {"covered": list(self.covered), "rows": len(self.rows), "all_pass": self.all_pass}


class CertificationError(RuntimeError):
    """A schedule does not certify; ``rows`` holds everything verified so far."""

    def __init__(self, message: str, rows: Sequence[CertificateRow] = (), index: int | None = None):
        super().__init__(message)
        self.rows = list(rows)
        self.index = index


class GapError(CertificationError):
    def __init__(self, p: float, rows=(), index=None):
        super().__init__(f"gap in coverage: p = {p!r} is not covered", rows, index)
        self.p = p


class RowFailure(CertificationError):
    def __init__(self, index: int, status: str, rows=()):
        super().__init__(f"row {index} failed with status {status!r}", rows, index)
        self.status = status


def _box(center: float, eps: float) -> Interval:
    return Interval.around(center, eps)


def region_check(center: Sequence[float], eps: float) -> bool:
    """Every point of the closed box keeps all power arguments nonnegative.

    The bounds y - eps, x - y - 2 eps, z - x - 2 eps and -x + y + z - 3 eps
    are evaluated in interval arithmetic, i.e. exactly as the certificate
    will see them.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    X, Y, Z = (_box(c, eps) for c in center)
    args = (Y, X - Y, Z - X, -X + Y + Z)
    return all(a.lo >= 0.0 for a in args)


def _f_interval(P, X, Y, Z):
    return family.system_terms(P, X, Y, Z, power=ipow)


def _df_interval(P, X, Y, Z) -> IntervalMatrix3:
    return IntervalMatrix3(family.jacobian_terms(P, X, Y, Z, power=ipow))


def _p_interval(p0: float, peps: float) -> Interval:
    return Interval(p0, (Interval.point(p0) + peps).hi)


def _row_bound(P: Interval, terms, Ti: IntervalMatrix3, i: int) -> float:
    """Upper bound of |row i of Df T - I|_1 over the box.

    Row i of Df is p times a linear combination of its power terms, so the
    absolute row sum is convex in p and in the terms separately; its
    maximum over the box enclosing (p, terms) sits at a vertex.  Each
    vertex is evaluated in interval arithmetic.
    """
    idx = family.JACOBIAN_ROW_TERMS[i]
    best = -math.inf
    for pv in (P.lo, P.hi):
        pi = Interval.point(pv)
        for corner in itertools.product(*((terms[k].lo, terms[k].hi) for k in idx)):
            t = list(terms)
            for k, v in zip(idx, corner):
                t[k] = Interval.point(v)
            row = family.jacobian_from_powers(pi, t)[i]
            s = Interval.point(0.0)
            for j in range(3):
                acc = row[0] * Ti[0, j] + row[1] * Ti[1, j] + row[2] * Ti[2, j]
                if i == j:
                    acc = acc - 1
                s = s + abs_val(acc)
            best = max(best, s.hi)
    return best


def _leaf_bound(box, Ti) -> float:
    P, X, Y, Z = box
    terms = family.power_terms(P, X, Y, Z, power=ipow)
    return max(_row_bound(P, terms, Ti, i) for i in range(3))


def _bisect(iv: Interval) -> tuple[Interval, Interval]:
    m = iv.mid
    return Interval(iv.lo, m), Interval(m, iv.hi)


def _lhs_upper(box, Ti, target: float, depth: int, max_depth: int) -> float:
    """Adaptive bisection until every leaf bound drops below ``target``."""
    bound = _leaf_bound(box, Ti)
    if bound < target or depth >= max_depth:
        return bound
    # x, y, z first, then p
    k = (1, 2, 3, 0)[depth % 4]
    worst = -math.inf
    failed = False
    for half in _bisect(box[k]):
        sub = list(box)
        sub[k] = half
        if failed:
            # the row fails anyway; a coarse bound keeps ``worst`` an upper bound
            worst = max(worst, _leaf_bound(tuple(sub), Ti))
            continue
        b = _lhs_upper(tuple(sub), Ti, target, depth + 1, max_depth)
        worst = max(worst, b)
        failed = b >= target
    return worst


def lhs_enclosure(P, X, Y, Z, Ti, target: float = -math.inf, max_depth: int = 0) -> Interval:
    """Enclosure of sup ||Df_p(x) T - I|| over p in P and x in the box.

    The lower end is the norm at the box center (a valid lower bound of the
    sup), the upper end comes from vertex maximization, refined by up to
    ``max_depth`` bisections wherever it is not yet below ``target``.
    """
    hi = _lhs_upper((P, X, Y, Z), Ti, target, 0, max_depth)
    mid = [Interval.point(v.mid) for v in (P, X, Y, Z)]
    lo = linf_op_norm(_df_interval(*mid) @ Ti - IntervalMatrix3.identity()).lo
    return Interval(min(lo, hi), hi)


def verify_row(p0, x0, y0, z0, eps, peps, T=None, max_depth: int = MAX_DEPTH) -> CertificateRow:
    """Check one row of the certificate.

    ``T`` defaults to the floating-point inverse of the Jacobian at
    (p0, x0, y0, z0); any matrix is admissible, only the margin changes.
    ``max_depth`` bounds the bisection used to sharpen the left-hand side;
    0 evaluates the whole box at once.
    """
    p0, x0, y0, z0, eps, peps = (float(v) for v in (p0, x0, y0, z0, eps, peps))
    center = (x0, y0, z0)
    if not (eps > 0 and peps > 0):
        raise ValueError("eps and peps must be positive")
    P = _p_interval(p0, peps)
    if not region_check(center, eps):
        return CertificateRow(P.lo, P.hi, center, eps, None, None, None, False, False, "region")
    if T is None:
        J = family.family_jacobian(p0, *center)
        if not np.isfinite(J).all() or np.linalg.cond(J) > COND_LIMIT:
            return CertificateRow(P.lo, P.hi, center, eps, None, None, None, True, False, "singular-T")
        T = np.linalg.inv(J)
    T = np.asarray(T, dtype=float)
    X, Y, Z = (_box(c, eps) for c in center)
    Ti = IntervalMatrix3.from_points(T)
    fc = _f_interval(P, *(Interval.point(c) for c in center))
    rhs = 1 - linf_op_norm(Ti) * vec_linf(fc) / eps
    lhs = lhs_enclosure(P, X, Y, Z, Ti, target=rhs.lo, max_depth=max_depth)
    passed = lhs.hi < rhs.lo
    return CertificateRow(
        P.lo, P.hi, center, eps, T, lhs, rhs, True, passed, "pass" if passed else "fail"
    )


@dataclass(frozen=True)
class Witness:
    """A point where the row hypothesis provably fails for the given T."""

    p: float
    x: tuple[float, float, float]
    lhs: Interval
    rhs: Interval

    @property
    def gap(self) -> float:
        return self.lhs.lo - self.rhs.hi


def infeasibility_witness(p0, x0, y0, z0, eps, peps, T=None, samples: int = 3) -> Witness | None:
    """Search for a rigorous counterexample to the row condition.

    The theorem is applied to each f_p separately, so the condition must hold
    at every p in P on its own.  A witness is a single p and a single x in the
    box with ||Df_p(x) T - I|| >= 1 - ||T|| |f_p(center)| / eps, both sides
    enclosed in interval arithmetic.  Only box corners and a few p values are
    tried; None means no witness was found, not that the row holds.
    """
    center = (float(x0), float(y0), float(z0))
    if T is None:
        T = np.linalg.inv(family.family_jacobian(p0, *center))
    Ti = IntervalMatrix3.from_points(T)
    nT = linf_op_norm(Ti)
    eye = IntervalMatrix3.identity()
    best = None
    for k in range(samples):
        pv = p0 + peps * k / max(samples - 1, 1)
        P = Interval.point(pv)
        fc = _f_interval(P, *(Interval.point(c) for c in center))
        rhs = 1 - nT * vec_linf(fc) / eps
        for signs in itertools.product((-1.0, 1.0), repeat=3):
            x = tuple(c + s * eps for c, s in zip(center, signs))
            try:
                lhs = linf_op_norm(_df_interval(P, *(Interval.point(v) for v in x)) @ Ti - eye)
            except ValueError:
                continue
            w = Witness(pv, x, lhs, rhs)
            if w.gap >= 0 and (best is None or w.gap > best.gap):
                best = w
    return best


def _entry(row) -> ScheduleEntry:
    return row if isinstance(row, ScheduleEntry) else ScheduleEntry(*(float(v) for v in row))


def check_chain(rows: Sequence[CertificateRow]) -> tuple[float, float]:
    """Return the covered interval, raising on the first gap."""
    if not rows:
        raise CertificationError("empty schedule")
    hi = rows[0].p_hi
    for i, r in enumerate(rows[1:], start=1):
        if r.p_lo > hi:
            raise GapError(hi, rows, i)
        hi = max(hi, r.p_hi)
    return (rows[0].p_lo, hi)


def passing_coverage(rows: Sequence[CertificateRow]) -> tuple[float, float] | None:
    """Interval covered without gaps by passing rows, from the first row on."""
    if not rows or not rows[0].passed:
        return None
    hi = rows[0].p_hi
    for r in rows[1:]:
        if not r.passed or r.p_lo > hi:
            break
        hi = max(hi, r.p_hi)
    return (rows[0].p_lo, hi)


def certify_schedule(entries: Iterable, jobs: int = 1) -> CertificateChain:
    """Verify every row and check that consecutive rows leave no gap.

    Raises :class:`RowFailure` on the first failing row (by index) and
    :class:`GapError` on the first uncovered p.
    """
    entries = [_entry(e) for e in entries]
    if any(b.p0 < a.p0 for a, b in zip(entries, entries[1:])):
        raise ValueError("schedule rows must be sorted by p0")
    args = [(e.p0, e.x0, e.y0, e.z0, e.eps, e.peps) for e in entries]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(_verify_args, args))
    else:
        rows = [verify_row(*a) for a in args]
    for i, r in enumerate(rows):
        if not r.passed:
            raise RowFailure(i, r.status, rows)
    covered = check_chain(rows)
    return CertificateChain(rows, covered)


def _verify_args(a):
    return verify_row(*a)


# schedules -----------------------------------------------------------------


def _grid(start: float, stop: float, step: float) -> list[float]:
    n = int(round((stop - start) / step))
    return [round(start + k * step, 10) for k in range(n)]


def appendix_schedule() -> list[ScheduleEntry]:
    """The published schedule on [1, 1.58].

    Step 0.01 with eps 0.03 on [1, 1.52), step 0.001 with eps 0.006 on
    [1.52, 1.58).  Centers that were not printed are regenerated by
    continuation, as 12-significant-digit values like the printed ones.
    """
    printed = {r[0]: r for r in PRINTED_SCHEDULE_ROWS}
    ps = [(p, COARSE) for p in _grid(1.0, 1.52, 0.01)]
    ps += [(p, FINE) for p in _grid(1.52, P_COVER_END, 0.001)]
    pts = family.continue_family([p for p, _ in ps])
    out = []
    for (p, (eps, peps)), pt in zip(ps, pts):
        if p in printed:
            out.append(ScheduleEntry(*printed[p]))
        else:
            x, y, z = (float(f"{v:.12g}") for v in pt.xyz)
            out.append(ScheduleEntry(p, x, y, z, eps, peps))
    return out


# eps / peps ratios tried per step, in order
EPS_RATIOS = (3.0, 6.0, 2.0, 12.0)


def _region_eps(center) -> float:
    x, y, z = center
    return min(y, (x - y) / 2.0, (z - x) / 2.0, (-x + y + z) / 3.0)


@dataclass
class AutoScheduleResult:
    entries: list[ScheduleEntry] = field(default_factory=list)
    rows: list[CertificateRow] = field(default_factory=list)
    reached: float = math.nan
    complete: bool = False

    def report(self) -> dict:
        return {"rows": len(self.entries), "reached": self.reached, "complete": self.complete}


def _try_step(p: float, peps: float, prev: family.FamilyPoint):
    """Center at the middle of [p, p + peps]; first eps ratio that passes."""
    try:
        mid = next(family.continue_family([p + 0.5 * peps], start=prev))
    except (SolverError, ValueError):
        return None, prev
    cap = 0.9 * _region_eps(mid.xyz)
    if not cap > 0:
        return None, mid
    for k in EPS_RATIOS:
        eps = min(k * peps, cap)
        row = verify_row(p, *mid.xyz, eps, peps)
        if row.passed:
            return (ScheduleEntry(p, *mid.xyz, eps, peps), row), mid
        if eps == cap:
            break
    return None, mid


def auto_schedule(
    p_start: float = 1.0,
    p_end: float = P_COVER_END,
    initial_step: float = 0.01,
    min_step: float = 1e-12,
    max_rows: int = 2000,
    allow_beyond: bool = False,
) -> AutoScheduleResult:
    """Generate and verify rows from ``p_start`` until ``p_end`` is covered.

    Each row is centered on the family point at the middle of its
    p-interval, which halves the drift of f_p(center) over P.  eps is tried
    at a few multiples of the step (capped at 90% of the distance to the
    region boundary); if none passes the step is halved, and after a success
    it grows back towards ``initial_step``.  Never raises on numerical
    trouble: the result records the largest p certified without gaps.
    """
    if p_end > P_COVER_END + 1e-12 and not allow_beyond:
        raise ValueError(f"p_end beyond {P_COVER_END} needs allow_beyond=True")
    res = AutoScheduleResult(reached=p_start)
    p = float(p_start)
    step = float(initial_step)
    try:
        prev = next(family.continue_family([p]))
    except (SolverError, ValueError):
        return res
    while p < p_end and len(res.entries) < max_rows:
        peps = min(step, p_end - p) if p_end - p > min_step else step
        found, mid = _try_step(p, peps, prev)
        if found is not None:
            entry, row = found
            res.entries.append(entry)
            res.rows.append(row)
            res.reached = p = row.p_hi
            prev = mid
            step = min(initial_step, 2.0 * step)
        else:
            step *= 0.5
            if step < min_step:
                break
    res.complete = res.reached >= p_end
    return res


# file formats --------------------------------------------------------------


SCHEDULE_FIELDS = ("p0", "x0", "y0", "z0", "eps", "peps")


def read_schedule(path) -> list[ScheduleEntry]:
    """CSV with columns p0,x0,y0,z0,eps,peps (header optional)."""
    out = []
    with open(path, newline="") as fh:
        for lineno, rec in enumerate(csv.reader(fh), start=1):
            if not rec or rec[0].strip().startswith("#"):
                continue
            if lineno == 1 and rec[0].strip() == "p0":
                continue
            if len(rec) != 6:
                raise ValueError(f"line {lineno}: expected 6 fields, got {len(rec)}")
            try:
                out.append(ScheduleEntry(*(float(v) for v in rec)))
            except ValueError:
                raise ValueError(f"line {lineno}: non-numeric field in {rec}") from None
    return out


def write_schedule(entries: Iterable[ScheduleEntry], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SCHEDULE_FIELDS)
        for e in entries:
            w.writerow([repr(getattr(e, f)) for f in SCHEDULE_FIELDS])


def certificate_lines(rows: Sequence[CertificateRow], covered=None) -> list[str]:
    """JSON lines: one object per row, then a chain summary object.

    ``covered`` defaults to :func:`passing_coverage`.
    """
    lines = [json.dumps(r.to_dict()) for r in rows]
    all_pass = bool(rows) and all(r.passed for r in rows)
    if covered is None:
        covered = passing_coverage(rows)
    summary = {
        "covered": None if covered is None else list(covered),
        "rows": len(rows),
        "all_pass": all_pass,
    }
    lines.append(json.dumps(summary))
    return lines


def write_certificate(rows: Sequence[CertificateRow], path, covered=None) -> None:
    Path(path).write_text("\n".join(certificate_lines(rows, covered)) + "\n")


def read_certificate(path) -> tuple[list[dict], dict]:
    """Parse a certificate file into (row dicts, summary dict)."""
    recs = [json.loads(line) for line in Path(path).read_text().splitlines() if line.strip()]
    if not recs or "covered" not in recs[-1]:
        raise ValueError("certificate file lacks a chain summary line")
    return recs[:-1], recs[-1]
