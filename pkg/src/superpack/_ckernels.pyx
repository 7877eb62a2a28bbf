# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; see ``_pykernels`` for semantics."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, pow, sqrt

cnp.import_array()


cdef inline double _norm3(double a, double b, double c, double p) nogil:
    a = fabs(a)
    b = fabs(b)
    c = fabs(c)
    if p == 1.0:
        return a + b + c
    if p == 2.0:
        return sqrt(a * a + b * b + c * c)
    return pow(pow(a, p) + pow(b, p) + pow(c, p), 1.0 / p)


def lattice_norms(B, double p, bounds):
    cdef const double[:, ::1] b = np.ascontiguousarray(B, dtype=np.float64)
    cdef long n0 = bounds[0], n1 = bounds[1], n2 = bounds[2]
    cdef Py_ssize_t total = (2 * n0 + 1) * (2 * n1 + 1) * (2 * n2 + 1) - 1
    U_arr = np.empty((total, 3), dtype=np.int64)
    norms_arr = np.empty(total, dtype=np.float64)
    cdef cnp.int64_t[:, ::1] U = U_arr
    cdef double[::1] norms = norms_arr
    cdef long u0, u1, u2
    cdef Py_ssize_t n = 0
    with nogil:
        for u0 in range(-n0, n0 + 1):
            for u1 in range(-n1, n1 + 1):
                for u2 in range(-n2, n2 + 1):
                    if u0 == 0 and u1 == 0 and u2 == 0:
                        continue
                    U[n, 0] = u0
                    U[n, 1] = u1
                    U[n, 2] = u2
                    norms[n] = _norm3(
                        b[0, 0] * u0 + b[0, 1] * u1 + b[0, 2] * u2,
                        b[1, 0] * u0 + b[1, 1] * u1 + b[1, 2] * u2,
                        b[2, 0] * u0 + b[2, 1] * u1 + b[2, 2] * u2,
                        p,
                    )
                    n += 1
    return U_arr, norms_arr


cdef inline double _sign(double t) nogil:
    if t > 0.0:
        return 1.0
    if t < 0.0:
        return -1.0
    return 0.0


cdef inline double _levi(int i, int j, int k) nogil:
    return <double>((i - j) * (j - k) * (k - i)) / 2.0


cdef void _fill_powers(const double[:, ::1] b, const double[:, ::1] u, Py_ssize_t m, double p,
                       double[:, ::1] V, double[:, ::1] grad, double[:, ::1] curv) nogil:
    cdef Py_ssize_t i, j
    cdef double v, a
    for i in range(3):
        for j in range(m):
            v = b[i, 0] * u[j, 0] + b[i, 1] * u[j, 1] + b[i, 2] * u[j, 2]
            V[i, j] = v
            a = fabs(v)
            if a > 0.0:
                grad[i, j] = _sign(v) * pow(a, p - 1.0)
                curv[i, j] = pow(a, p - 2.0)
            else:
                grad[i, j] = 0.0
                curv[i, j] = 1.0 if p == 2.0 else 0.0


cdef void _cofactor(const double[:, ::1] b, double[:, ::1] out) nogil:
    cdef int i, k, r0, r1, c0, c1
    for i in range(3):
        r0 = (i + 1) % 3
        r1 = (i + 2) % 3
        for k in range(3):
            c0 = (k + 1) % 3
            c1 = (k + 2) % 3
            out[i, k] = b[r0, c0] * b[r1, c1] - b[r0, c1] * b[r1, c0]


def cofactor(B):
    cdef const double[:, ::1] b = np.ascontiguousarray(B, dtype=np.float64)
    out = np.empty((3, 3))
    _cofactor(b, out)
    return out


def stationarity_residual(B, lam, U, double p):
    cdef const double[:, ::1] b = np.ascontiguousarray(B, dtype=np.float64)
    cdef const double[::1] l = np.ascontiguousarray(lam, dtype=np.float64)
    cdef const double[:, ::1] u = np.ascontiguousarray(U, dtype=np.float64)
    cdef Py_ssize_t m = u.shape[0]
    cdef double[:, ::1] V = np.empty((3, m))
    cdef double[:, ::1] grad = np.empty((3, m))
    cdef double[:, ::1] curv = np.empty((3, m))
    cdef double[:, ::1] cof = np.empty((3, 3))
    out_arr = np.empty(9 + m)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, j, k
    cdef double s
    with nogil:
        _fill_powers(b, u, m, p, V, grad, curv)
        _cofactor(b, cof)
        for i in range(3):
            for k in range(3):
                s = 0.0
                for j in range(m):
                    s += l[j] * grad[i, j] * u[j, k]
                out[3 * i + k] = cof[i, k] - p * s
        for j in range(m):
            s = 0.0
            for i in range(3):
                s += pow(fabs(V[i, j]), p)
            out[9 + j] = s - 1.0
    return out_arr


def stationarity_jacobian(B, lam, U, double p):
    cdef const double[:, ::1] b = np.ascontiguousarray(B, dtype=np.float64)
    cdef const double[::1] l = np.ascontiguousarray(lam, dtype=np.float64)
    cdef const double[:, ::1] u = np.ascontiguousarray(U, dtype=np.float64)
    cdef Py_ssize_t m = u.shape[0]
    cdef double[:, ::1] V = np.empty((3, m))
    cdef double[:, ::1] grad = np.empty((3, m))
    cdef double[:, ::1] curv = np.empty((3, m))
    J_arr = np.zeros((9 + m, 9 + m))
    cdef double[:, ::1] J = J_arr
    cdef Py_ssize_t i, k, jj, l_, bb, d, j
    cdef double s, w, pp1 = p * (p - 1.0)
    with nogil:
        _fill_powers(b, u, m, p, V, grad, curv)
        for i in range(3):
            for k in range(3):
                for jj in range(3):
                    for l_ in range(3):
                        s = 0.0
                        for bb in range(3):
                            for d in range(3):
                                s += _levi(i, jj, bb) * _levi(k, l_, d) * b[bb, d]
                        J[3 * i + k, 3 * jj + l_] = s
        for i in range(3):
            for j in range(m):
                w = pp1 * curv[i, j] * l[j]
                if w != 0.0:
                    for k in range(3):
                        for l_ in range(3):
                            J[3 * i + k, 3 * i + l_] -= w * u[j, k] * u[j, l_]
                for k in range(3):
                    s = p * grad[i, j] * u[j, k]
                    J[3 * i + k, 9 + j] = -s
                    J[9 + j, 3 * i + k] = s
    return J_arr
