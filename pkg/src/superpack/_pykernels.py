"""Pure numpy implementations of the hot kernels.

Signatures match the compiled ``_ckernels`` module exactly; ``kernels``
picks one at import time.
"""

import numpy as np

# eps[i, j, k] is the Levi-Civita symbol; used for the cofactor derivative.
_EPS = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    _EPS[_i, _j, _k] = 1.0
    _EPS[_i, _k, _j] = -1.0


def lattice_norms(B, p, bounds):
    """All nonzero u with |u_i| <= bounds[i], and ||B u||_p for each.

    Returns ``(U, norms)`` with ``U`` an (N, 3) int64 array in lexicographic
    order.
    """
    B = np.ascontiguousarray(B, dtype=float)
    b0, b1, b2 = (int(b) for b in bounds)
    axes = [np.arange(-b, b + 1, dtype=np.int64) for b in (b0, b1, b2)]
    U = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
    U = U[np.any(U != 0, axis=1)]
    A = np.abs(U @ B.T)
    if p == 1.0:
        norms = A.sum(axis=1)
    elif p == 2.0:
        norms = np.sqrt((A * A).sum(axis=1))
    else:
        norms = (A**p).sum(axis=1) ** (1.0 / p)
    return U, norms


def cofactor(B):
    B = np.asarray(B, dtype=float)
    return 0.5 * np.einsum("iab,kcd,ac,bd->ik", _EPS, _EPS, B, B)


def _powers(V, p):
    """sign(V)|V|^(p-1) and |V|^(p-2) with the zero conventions."""
    A = np.abs(V)
    grad = np.sign(V) * A ** (p - 1.0)
    with np.errstate(divide="ignore"):
        curv = np.where(A > 0.0, A ** (p - 2.0), 1.0 if p == 2.0 else 0.0)
    return grad, curv


def stationarity_residual(B, lam, U, p):
    """Lagrange stationarity block followed by the constraint residuals."""
    B = np.asarray(B, dtype=float)
    U = np.asarray(U, dtype=float)
    lam = np.asarray(lam, dtype=float)
    V = B @ U.T
    grad, _ = _powers(V, p)
    stat = cofactor(B) - p * (grad * lam) @ U
    g = (np.abs(V) ** p).sum(axis=0) - 1.0
    return np.concatenate([stat.ravel(), g])


def stationarity_jacobian(B, lam, U, p):
    """Analytic Jacobian of ``stationarity_residual`` w.r.t. (vec B, lam)."""
    B = np.asarray(B, dtype=float)
    U = np.asarray(U, dtype=float)
    lam = np.asarray(lam, dtype=float)
    m = U.shape[0]
    V = B @ U.T
    grad, curv = _powers(V, p)
    J = np.zeros((9 + m, 9 + m))
    # d cof_ik / d B_jl = eps_ijb eps_kld B_bd
    dcof = np.einsum("ijb,kld,bd->ikjl", _EPS, _EPS, B)
    # Hessian of sum_j lam_j ||B u_j||^p: block diagonal in the row index i
    w = p * (p - 1.0) * curv * lam  # (3, m)
    hess = np.einsum("ij,jk,jl->ikl", w, U, U)
    for i in range(3):
        dcof[i, :, i, :] -= hess[i]
    J[:9, :9] = dcof.reshape(9, 9)
    dg = p * grad[:, :, None] * U[None, :, :]  # (i, j, k) -> d g_j / d B_ik
    J[:9, 9:] = -dg.transpose(0, 2, 1).reshape(9, m)
    J[9:, :9] = dg.transpose(1, 0, 2).reshape(m, 9)
    return J
