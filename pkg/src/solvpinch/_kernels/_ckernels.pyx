# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled structure-constant kernels.

Every function mirrors one in ``_pykernels`` and must return the same
values to rounding.
"""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def ricci_operator(const double[:, :, ::1] c):
    cdef Py_ssize_t n = c.shape[0]
    cdef Py_ssize_t a, b, i, j, k
    cdef double acc1, acc2, acc3
    out_arr = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double[::1] H = np.zeros(n, dtype=np.float64)
    cdef double[:, ::1] adH = np.zeros((n, n), dtype=np.float64)

    for a in range(n):
        acc1 = 0.0
        for j in range(n):
            acc1 += c[a, j, j]
        H[a] = acc1
    for k in range(n):
        for j in range(n):
            acc1 = 0.0
            for i in range(n):
                acc1 += H[i] * c[i, j, k]
            adH[k, j] = acc1

    for a in range(n):
        for b in range(a, n):
            acc1 = 0.0
            acc2 = 0.0
            acc3 = 0.0
            for i in range(n):
                for j in range(n):
                    acc1 += c[a, i, j] * c[b, i, j]
                    acc2 += c[i, j, a] * c[i, j, b]
                    acc3 += c[a, i, j] * c[b, j, i]
            out[a, b] = -0.5 * acc1 + 0.25 * acc2 - 0.5 * acc3 - 0.5 * (adH[a, b] + adH[b, a])
            out[b, a] = out[a, b]
    return out_arr


def act(const double[:, ::1] h, const double[:, ::1] hinv, const double[:, :, ::1] c):
    """Structure constants of h.mu, (h.mu)(x, y) = h mu(h^-1 x, h^-1 y)."""
    cdef Py_ssize_t n = c.shape[0]
    cdef Py_ssize_t a, b, i, j, k, l
    cdef double acc
    cdef double[:, :, ::1] t1 = np.empty((n, n, n), dtype=np.float64)
    cdef double[:, :, ::1] t2 = np.empty((n, n, n), dtype=np.float64)
    out_arr = np.empty((n, n, n), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr

    for a in range(n):
        for b in range(n):
            for k in range(n):
                acc = 0.0
                for l in range(n):
                    acc += h[k, l] * c[a, b, l]
                t1[a, b, k] = acc
    for a in range(n):
        for j in range(n):
            for k in range(n):
                acc = 0.0
                for b in range(n):
                    acc += hinv[b, j] * t1[a, b, k]
                t2[a, j, k] = acc
    for i in range(n):
        for j in range(n):
            for k in range(n):
                acc = 0.0
                for a in range(n):
                    acc += hinv[a, i] * t2[a, j, k]
                out[i, j, k] = acc
    return out_arr


def jacobi_residual(const double[:, :, ::1] c):
    """max |mu(mu(e_i,e_j),e_k) + cyclic| over basis triples and components."""
    cdef Py_ssize_t n = c.shape[0]
    cdef Py_ssize_t i, j, k, l, m
    cdef double acc, worst = 0.0
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for m in range(n):
                    acc = 0.0
                    for l in range(n):
                        acc += c[i, j, l] * c[l, k, m] + c[j, k, l] * c[l, i, m] + c[k, i, l] * c[l, j, m]
                    if acc < 0:
                        acc = -acc
                    if acc > worst:
                        worst = acc
    return worst


def scal_and_norm(const double[:, :, ::1] c):
    """(scal, |Ric|^2) without materialising anything beyond the Ricci matrix."""
    ric = ricci_operator(c)
    cdef double[:, ::1] r = ric
    cdef Py_ssize_t n = r.shape[0]
    cdef Py_ssize_t i, j
    cdef double tr = 0.0, sq = 0.0
    for i in range(n):
        tr += r[i, i]
        for j in range(n):
            sq += r[i, j] * r[i, j]
    return tr, sq
