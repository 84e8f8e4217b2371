# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled pixel-pair block kernels; mirrors ``numpy_backend`` exactly."""

import numpy as np

cimport cython
from libc.math cimport sqrt


def tms_blocks(gains):
    g = np.ascontiguousarray(gains, dtype=np.float64)
    cdef const double[::1] gv = g
    cdef Py_ssize_t n = gv.shape[0]
    out = np.zeros((n, 4, 4))
    cdef double[:, :, ::1] o = out
    cdef Py_ssize_t k
    cdef double c, s
    for k in range(n):
        c = sqrt(gv[k])
        s = sqrt(gv[k] - 1.0)
        o[k, 0, 0] = c
        o[k, 1, 1] = c
        o[k, 2, 2] = c
        o[k, 3, 3] = c
        o[k, 0, 2] = s
        o[k, 2, 0] = s
        o[k, 1, 3] = -s
        o[k, 3, 1] = -s
    return out


cdef inline void _sandwich(double[:, :, ::1] covs, double[:, ::1] means,
                           const double[:, :] s, Py_ssize_t k) nogil:
    cdef double t[4][4]
    cdef double v[4][4]
    cdef double m[4]
    cdef Py_ssize_t i, j, l
    cdef double acc
    for i in range(4):
        m[i] = 0.0
        for j in range(4):
            v[i][j] = covs[k, i, j]
    # T = S V
    for i in range(4):
        for j in range(4):
            acc = 0.0
            for l in range(4):
                acc += s[i, l] * v[l][j]
            t[i][j] = acc
    # V' = T S^T
    for i in range(4):
        for j in range(4):
            acc = 0.0
            for l in range(4):
                acc += t[i][l] * s[j, l]
            covs[k, i, j] = acc
    for i in range(4):
        acc = 0.0
        for l in range(4):
            acc += s[i, l] * means[k, l]
        m[i] = acc
    for i in range(4):
        means[k, i] = m[i]


def apply_symplectic_blocks(double[:, :, ::1] covs, double[:, ::1] means, s):
    s_arr = np.ascontiguousarray(s, dtype=np.float64)
    cdef Py_ssize_t n = covs.shape[0]
    cdef Py_ssize_t k
    cdef const double[:, :] s2
    cdef const double[:, :, ::1] s3
    if s_arr.ndim == 2:
        s2 = s_arr
        for k in range(n):
            _sandwich(covs, means, s2, k)
    else:
        s3 = s_arr
        for k in range(n):
            _sandwich(covs, means, s3[k], k)


def apply_loss_blocks(double[:, :, ::1] covs, double[:, ::1] means,
                      double eta_probe, double eta_conj):
    cdef Py_ssize_t n = covs.shape[0]
    cdef double d[4]
    cdef double y[4]
    cdef Py_ssize_t k, i, j
    d[0] = sqrt(eta_probe)
    d[1] = d[0]
    d[2] = sqrt(eta_conj)
    d[3] = d[2]
    y[0] = 0.5 * (1.0 - eta_probe)
    y[1] = y[0]
    y[2] = 0.5 * (1.0 - eta_conj)
    y[3] = y[2]
    for k in range(n):
        for i in range(4):
            for j in range(4):
                covs[k, i, j] *= d[i] * d[j]
            covs[k, i, i] += y[i]
            means[k, i] *= d[i]


def photon_moments_blocks(const double[:, :, ::1] covs, const double[:, ::1] means):
    cdef Py_ssize_t n = covs.shape[0]
    nmean = np.empty((n, 2))
    nvar = np.empty((n, 2))
    ncross = np.empty(n)
    cdef double[:, ::1] nm = nmean
    cdef double[:, ::1] nv = nvar
    cdef double[::1] nc = ncross
    cdef Py_ssize_t k
    cdef double v00, v01, v11, v22, v23, v33, v02, v03, v12, v13
    cdef double m0, m1, m2, m3
    for k in range(n):
        v00 = covs[k, 0, 0]; v01 = covs[k, 0, 1]; v11 = covs[k, 1, 1]
        v22 = covs[k, 2, 2]; v23 = covs[k, 2, 3]; v33 = covs[k, 3, 3]
        v02 = covs[k, 0, 2]; v03 = covs[k, 0, 3]
        v12 = covs[k, 1, 2]; v13 = covs[k, 1, 3]
        m0 = means[k, 0]; m1 = means[k, 1]; m2 = means[k, 2]; m3 = means[k, 3]
        nm[k, 0] = 0.5 * (v00 + v11 + m0 * m0 + m1 * m1 - 1.0)
        nm[k, 1] = 0.5 * (v22 + v33 + m2 * m2 + m3 * m3 - 1.0)
        nv[k, 0] = (0.5 * (v00 * v00 + 2.0 * v01 * v01 + v11 * v11) - 0.25
                    + v00 * m0 * m0 + 2.0 * v01 * m0 * m1 + v11 * m1 * m1)
        nv[k, 1] = (0.5 * (v22 * v22 + 2.0 * v23 * v23 + v33 * v33) - 0.25
                    + v22 * m2 * m2 + 2.0 * v23 * m2 * m3 + v33 * m3 * m3)
        nc[k] = (0.5 * (v02 * v02 + v03 * v03 + v12 * v12 + v13 * v13)
                 + m0 * (v02 * m2 + v03 * m3) + m1 * (v12 * m2 + v13 * m3))
    return nmean, nvar, ncross


def joint_quadrature_variance_blocks(const double[:, :, ::1] covs,
                                     const double[::1] weights_probe,
                                     const double[::1] weights_conj,
                                     double cos_p, double sin_p,
                                     double cos_c, double sin_c):
    cdef Py_ssize_t n = covs.shape[0]
    cdef Py_ssize_t k, i, j
    cdef double c[4]
    cdef double total = 0.0
    cdef double row
    for k in range(n):
        c[0] = weights_probe[k] * cos_p
        c[1] = weights_probe[k] * sin_p
        c[2] = weights_conj[k] * cos_c
        c[3] = weights_conj[k] * sin_c
        for i in range(4):
            row = 0.0
            for j in range(4):
                row += covs[k, i, j] * c[j]
            total += c[i] * row
    return total


cdef inline int _cholesky4(const double[:, :, ::1] v, Py_ssize_t k,
                           double[4][4] l) nogil:
    # lower-triangular Cholesky of one 4x4 block; returns 0 on success
    cdef Py_ssize_t i, j, m
    cdef double acc
    for i in range(4):
        for j in range(4):
            l[i][j] = 0.0
    for i in range(4):
        for j in range(i + 1):
            acc = v[k, i, j]
            for m in range(j):
                acc -= l[i][m] * l[j][m]
            if i == j:
                if acc <= 0.0:
                    return 1  # not positive definite
                l[i][i] = sqrt(acc)
            else:
                l[i][j] = acc / l[j][j]
    return 0


def min_symplectic_eigenvalue_blocks(const double[:, :, ::1] covs):
    # Cholesky V = L L^T and A = L^T Omega L turn the problem into the
    # singular values of an antisymmetric 4x4, which split over
    # so(4) = su(2)+su(2) as nu = |P| +/- |Q|; stays accurate at the
    # degenerate spectra of pure states where the char-poly form loses
    # half the digits
    cdef Py_ssize_t n = covs.shape[0]
    cdef Py_ssize_t k, i, j
    cdef double l[4][4]
    cdef double t[4][4]
    cdef double a01, a02, a03, a12, a13, a23
    cdef double p, q, nu
    cdef double best = -1.0
    for k in range(n):
        if _cholesky4(covs, k, l) != 0:
            return 0.0
        # t = Omega L with Omega = diag([[0,1],[-1,0]], [[0,1],[-1,0]])
        for j in range(4):
            t[0][j] = l[1][j]
            t[1][j] = -l[0][j]
            t[2][j] = l[3][j]
            t[3][j] = -l[2][j]
        # upper triangle of A = L^T (Omega L)
        a01 = l[0][0] * t[0][1] + l[1][0] * t[1][1] + l[2][0] * t[2][1] + l[3][0] * t[3][1]
        a02 = l[0][0] * t[0][2] + l[1][0] * t[1][2] + l[2][0] * t[2][2] + l[3][0] * t[3][2]
        a03 = l[0][0] * t[0][3] + l[1][0] * t[1][3] + l[2][0] * t[2][3] + l[3][0] * t[3][3]
        a12 = l[0][1] * t[0][2] + l[1][1] * t[1][2] + l[2][1] * t[2][2] + l[3][1] * t[3][2]
        a13 = l[0][1] * t[0][3] + l[1][1] * t[1][3] + l[2][1] * t[2][3] + l[3][1] * t[3][3]
        a23 = l[0][2] * t[0][3] + l[1][2] * t[1][3] + l[2][2] * t[2][3] + l[3][2] * t[3][3]
        p = 0.5 * sqrt((a01 + a23) * (a01 + a23)
                       + (a02 - a13) * (a02 - a13)
                       + (a03 + a12) * (a03 + a12))
        q = 0.5 * sqrt((a01 - a23) * (a01 - a23)
                       + (a02 + a13) * (a02 + a13)
                       + (a03 - a12) * (a03 - a12))
        nu = p - q if p >= q else q - p
        if best < 0.0 or nu < best:
            best = nu
    return best if best >= 0.0 else float("inf")
