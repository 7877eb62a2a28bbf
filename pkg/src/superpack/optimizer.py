"""Random-restart Newton search for locally densest lattices.

For a neighbor case with representatives u_1..u_m we look for critical
points of det B subject to ||B u_j||_p^p = 1.  The Lagrange conditions

    cof(B) - sum_j lam_j grad_B ||B u_j||_p^p = 0,    ||B u_j||_p^p - 1 = 0

form a square system in the 9 + m unknowns (B, lam), solved by damped
Newton from random normal starts.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .errors import KinkError, SolverError
from .geometry import check_exponent
from .lattice import Basis, count_neighbors, density, get_case, verify_packing

DEFAULT_SEED = 1
KINK_TOL = 1e-12
DEDUPE_TOL = 1e-7
RCOND = 1e-10


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 500
    seed: int = DEFAULT_SEED
    newton_tol: float = 1e-11
    max_iterations: int = 200
    min_abs_det: float = 1e-8
    jobs: int = 1

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if not self.newton_tol > 0:
            raise ValueError("newton_tol must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass
class CriticalPoint:
    basis: Basis
    case_id: str
    p: float
    multipliers: np.ndarray
    residual: float
    density: float
    verified: bool = False
    neighbors: int = 0
    iterations: int = 0
    start_index: int | None = field(default=None, compare=False)

    def to_dict(self) -> dict:
        return {
            "case": self.case_id,
            "p": self.p,
            "matrix": self.basis.tolist(),
            "density": self.density,
            "residual": self.residual,
            "neighbors": self.neighbors,
            "verified": self.verified,
        }


def _matrix(B) -> np.ndarray:
    return np.asarray(B.matrix if isinstance(B, Basis) else B, dtype=float).reshape(3, 3)


def constraint_residuals(B, case, p: float) -> np.ndarray:
    """||B u||_p^p - 1 for each representative u of the case."""
    p = check_exponent(p)
    V = _matrix(B) @ get_case(case).vectors.T
    return (np.abs(V) ** p).sum(axis=0) - 1.0


def _check_kink(B: np.ndarray, U: np.ndarray, p: float) -> None:
    if p < 2.0:
        V = B @ U.T
        if np.any(np.abs(V) < KINK_TOL):
            raise KinkError(f"a coordinate of B u is below {KINK_TOL:g} at p = {p}")


def stationarity_system(B, multipliers, case, p: float) -> np.ndarray:
    """Stationarity block (9 entries, row-major in B) then constraints.

    Raises :class:`KinkError` if p < 2 and some coordinate of some B u is
    numerically zero.
    """
    p = check_exponent(p)
    U = get_case(case).vectors
    B = _matrix(B)
    lam = np.asarray(multipliers, dtype=float)
    if lam.shape != (len(U),):
        raise ValueError(f"expected {len(U)} multipliers, got shape {lam.shape}")
    _check_kink(B, U, p)
    return kernels.stationarity_residual(B, lam, U, p)


def stationarity_jacobian(B, multipliers, case, p: float) -> np.ndarray:
    """Analytic Jacobian of :func:`stationarity_system` in (B row-major, lam)."""
    p = check_exponent(p)
    U = get_case(case).vectors
    return kernels.stationarity_jacobian(_matrix(B), np.asarray(multipliers, dtype=float), U, p)


def finite_difference_jacobian(B, multipliers, case, p: float, h: float = 1e-6) -> np.ndarray:
    """Central differences of :func:`stationarity_system`; for validation."""
    p = check_exponent(p)
    U = get_case(case).vectors
    z = np.concatenate([_matrix(B).ravel(), np.asarray(multipliers, dtype=float)])
    n = len(z)
    J = np.empty((n, n))
    for k in range(n):
        e = np.zeros(n)
        e[k] = h
        fp = kernels.stationarity_residual((z + e)[:9].reshape(3, 3), (z + e)[9:], U, p)
        fm = kernels.stationarity_residual((z - e)[:9].reshape(3, 3), (z - e)[9:], U, p)
        J[:, k] = (fp - fm) / (2 * h)
    return J


def initial_multipliers(B, case, p: float) -> np.ndarray:
    """Least-squares multipliers for the stationarity block at fixed B."""
    p = check_exponent(p)
    U = get_case(case).vectors
    B = _matrix(B)
    V = B @ U.T
    G = p * np.sign(V) * np.abs(V) ** (p - 1.0)
    # column j is grad_B ||B u_j||_p^p flattened row-major
    A = np.stack([np.outer(G[:, j], U[j]).ravel() for j in range(len(U))], axis=1)
    return np.linalg.lstsq(A, kernels.cofactor(B).ravel(), rcond=None)[0]


def _sup(v) -> float:
    return float(np.max(np.abs(v)))


def newton_solve(start, case, p: float, cfg: SearchConfig = SearchConfig()) -> CriticalPoint:
    """Damped Newton on the stationarity system from ``start``.

    A start with negative determinant is replaced by -B first; the
    constraints are even in B, so this only flips the multipliers.
    Raises :class:`SolverError` (reason tag set) on failure.
    """
    p = check_exponent(p)
    case = get_case(case)
    U = case.vectors
    n = 9 + len(U)
    # the rotation group acts on solutions at p = 2 only
    expected_rank = n - 3 if p == 2.0 else n
    B = np.array(_matrix(start))
    d0 = float(np.linalg.det(B))
    if not abs(d0) >= cfg.min_abs_det:
        raise ValueError(f"start has |det| = {abs(d0):.3g} < {cfg.min_abs_det:g}")
    if d0 < 0:
        B = -B
    z = np.concatenate([B.ravel(), initial_multipliers(B, case, p)])

    def F(w):
        return kernels.stationarity_residual(w[:9].reshape(3, 3), w[9:], U, p)

    r = _sup(F(z))
    it = 0
    while r > cfg.newton_tol:
        if it >= cfg.max_iterations:
            raise SolverError("max_iterations", f"residual {r:.3g} after {it} steps")
        it += 1
        Bz = z[:9].reshape(3, 3)
        _check_kink(Bz, U, p)
        J = kernels.stationarity_jacobian(Bz, z[9:], U, p)
        # Minimum-norm step with small singular values cut off.  At p = 2
        # the system is rotation invariant and J has a 3-dimensional kernel
        # everywhere; elsewhere J is generically regular and this is the
        # plain Newton step.
        try:
            step, _, rank, _ = np.linalg.lstsq(J, -F(z), rcond=RCOND)
        except np.linalg.LinAlgError:
            raise SolverError("singular_jacobian", f"SVD failed at iteration {it}") from None
        if rank < expected_rank or not np.all(np.isfinite(step)):
            raise SolverError("singular_jacobian", f"rank {rank} of {n} at iteration {it}")
        t = 1.0
        for _ in range(30):
            cand = z + t * step
            rc = _sup(F(cand))
            if math.isfinite(rc) and rc < (1.0 - 1e-4 * t) * r:
                break
            t *= 0.5
        else:
            raise SolverError("line_search", f"no decrease from residual {r:.3g}")
        z, r = cand, rc
        if abs(np.linalg.det(z[:9].reshape(3, 3))) < cfg.min_abs_det:
            raise SolverError("left_region", f"|det| fell below {cfg.min_abs_det:g}")
    Bf = z[:9].reshape(3, 3)
    _check_kink(Bf, U, p)
    det = float(np.linalg.det(Bf))
    if det <= 0:
        raise SolverError("nonpositive_det", f"det = {det:.3g}")
    basis = Basis(Bf)
    report = verify_packing(basis, p)
    return CriticalPoint(
        basis=basis,
        case_id=case.case_id,
        p=p,
        multipliers=z[9:].copy(),
        residual=r,
        density=density(basis, p),
        verified=report.is_packing,
        neighbors=count_neighbors(basis, p),
        iterations=it,
    )


def _restart(args) -> CriticalPoint | None:
    i, case_id, p, cfg = args
    rng = np.random.default_rng([cfg.seed, i])
    start = rng.standard_normal((3, 3))
    try:
        cp = newton_solve(start, case_id, p, cfg)
    except (SolverError, ValueError):
        return None
    cp.start_index = i
    return cp


def random_search(case, p: float, cfg: SearchConfig = SearchConfig()) -> list[CriticalPoint]:
    """Converged, verified packing lattices from ``cfg.restarts`` random starts.

    Restart i draws its start from its own generator seeded by (seed, i),
    so results do not depend on ``cfg.jobs``.  Sorted by density descending;
    densities within 1e-7 of an earlier kept one are dropped.
    """
    p = check_exponent(p)
    case = get_case(case)
    tasks = [(i, case.case_id, p, cfg) for i in range(cfg.restarts)]
    if cfg.jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
            found = list(ex.map(_restart, tasks, chunksize=16))
    else:
        found = [_restart(t) for t in tasks]
    good = [c for c in found if c is not None and c.verified]
    # stable sort: equal densities keep restart order
    good.sort(key=lambda c: -c.density)
    out: list[CriticalPoint] = []
    for c in good:
        if not out or abs(out[-1].density - c.density) > DEDUPE_TOL:
            out.append(c)
    return out


def _round12(v: float) -> float:
    return float(f"{v:.12g}")


def results_to_json(points: Sequence[CriticalPoint]) -> str:
    """JSON array of {case, p, matrix, density, residual, neighbors, verified}.

    Floats carry 12 significant digits, so output is stable across runs.
    """
    recs = []
    for c in points:
        d = c.to_dict()
        d["p"] = _round12(d["p"])
        d["matrix"] = [_round12(v) for v in d["matrix"]]
        d["density"] = _round12(d["density"])
        d["residual"] = float(f"{d['residual']:.3g}")
        recs.append(d)
    return json.dumps(recs, indent=2)
