# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: Bell value, its gradient, and Givens products."""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()


cdef inline double abs2(double complex z) nogil:
    return z.real * z.real + z.imag * z.imag


cdef void _split(double complex[:, :, ::1] U, double[::1] lam,
                 double[:, :, ::1] re, double[:, :, ::1] im) noexcept nogil:
    # rows 0, 1 (Alice) carry the Schmidt weights; rows 2, 3 (Bob) do not
    cdef Py_ssize_t s, m, k, d = lam.shape[0]
    cdef double w
    for s in range(4):
        for m in range(d):
            for k in range(d):
                w = lam[k] if s < 2 else 1.0
                re[s, m, k] = U[s, m, k].real * w
                im[s, m, k] = U[s, m, k].imag * w


def bell_value(double complex[:, :, ::1] U, double[::1] lam, double[:, :, :, ::1] K):
    cdef Py_ssize_t d = lam.shape[0]
    cdef Py_ssize_t i, j, m, n, k
    cdef double ar, ai, total = 0.0
    re_arr = np.empty((4, d, d))
    im_arr = np.empty((4, d, d))
    cdef double[:, :, ::1] re = re_arr
    cdef double[:, :, ::1] im = im_arr
    with nogil:
        _split(U, lam, re, im)
        for i in range(2):
            for j in range(2):
                for m in range(d):
                    for n in range(d):
                        ar = 0.0
                        ai = 0.0
                        for k in range(d):
                            ar = ar + re[i, m, k] * re[2 + j, n, k] - im[i, m, k] * im[2 + j, n, k]
                            ai = ai + re[i, m, k] * im[2 + j, n, k] + im[i, m, k] * re[2 + j, n, k]
                        total += K[i, j, m, n] * (ar * ar + ai * ai)
    return total


def bell_value_grad(double complex[:, :, ::1] U, double[::1] lam, double[:, :, :, ::1] K):
    """Value, d(value)/d(conj U) times two, and d(value)/d(lam)."""
    cdef Py_ssize_t d = lam.shape[0]
    cdef Py_ssize_t i, j, m, n, k
    cdef double ar, ai, zr, zi, total = 0.0, kk
    re_arr = np.empty((4, d, d))
    im_arr = np.empty((4, d, d))
    ere_arr = np.zeros((4, d, d))
    eim_arr = np.zeros((4, d, d))
    dlam_arr = np.zeros(d)
    cdef double[:, :, ::1] re = re_arr
    cdef double[:, :, ::1] im = im_arr
    cdef double[:, :, ::1] ere = ere_arr
    cdef double[:, :, ::1] eim = eim_arr
    cdef double[::1] dlam = dlam_arr
    with nogil:
        _split(U, lam, re, im)
        for i in range(2):
            for j in range(2):
                for m in range(d):
                    for n in range(d):
                        ar = 0.0
                        ai = 0.0
                        for k in range(d):
                            ar = ar + re[i, m, k] * re[2 + j, n, k] - im[i, m, k] * im[2 + j, n, k]
                            ai = ai + re[i, m, k] * im[2 + j, n, k] + im[i, m, k] * re[2 + j, n, k]
                        kk = K[i, j, m, n]
                        total += kk * (ar * ar + ai * ai)
                        zr = 2.0 * kk * ar
                        zi = 2.0 * kk * ai
                        # z * conj(b) for Alice (times lam), z * conj(a) for Bob
                        for k in range(d):
                            ere[i, m, k] += zr * re[2 + j, n, k] + zi * im[2 + j, n, k]
                            eim[i, m, k] += zi * re[2 + j, n, k] - zr * im[2 + j, n, k]
                            ere[2 + j, n, k] += zr * re[i, m, k] + zi * im[i, m, k]
                            eim[2 + j, n, k] += zi * re[i, m, k] - zr * im[i, m, k]
        # Alice's accumulator: scale by lam once; Bob's already carries it via re/im
        # dlam[k] = sum over Alice rows of Re(conj(U) * E_unscaled)
        for i in range(2):
            for m in range(d):
                for k in range(d):
                    dlam[k] += U[i, m, k].real * ere[i, m, k] + U[i, m, k].imag * eim[i, m, k]
                    ere[i, m, k] *= lam[k]
                    eim[i, m, k] *= lam[k]
    E_arr = ere_arr + 1j * eim_arr
    return total, E_arr, dlam_arr


def givens_unitary(double[::1] theta, double[::1] phi, Py_ssize_t d):
    cdef Py_ssize_t p, q, col, idx = 0
    cdef double c, s
    cdef double complex e, rp, rq
    out = np.eye(d, dtype=np.complex128)
    cdef double complex[:, ::1] W = out
    with nogil:
        q = d - 1
        while q >= 1:
            for p in range(q):
                c = cos(theta[idx])
                s = sin(theta[idx])
                e = cos(phi[idx]) + 1j * sin(phi[idx])
                for col in range(d):
                    rp = W[p, col]
                    rq = W[q, col]
                    W[p, col] = e * c * rp - s * rq
                    W[q, col] = e * s * rp + c * rq
                idx += 1
            q -= 1
    return out
