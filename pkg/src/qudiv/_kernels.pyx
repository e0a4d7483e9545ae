# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled accumulation kernels for the Monte Carlo hot loops.

Mirrors the signatures of ``qudiv._kernels_py``; results agree with the
fallback to roundoff (summation order differs, so not bit-for-bit).
"""

import numpy as np


def pair_divergence_accum(const double complex[:, ::1] kets_a,
                          const double complex[:, ::1] kets_b,
                          double complex[:, ::1] out):
    """Accumulate sum_s (E_a(s) (x) I - I (x) E_b(s))^2 into ``out``."""
    cdef Py_ssize_t n = kets_a.shape[0]
    cdef Py_ssize_t d = kets_a.shape[1]
    cdef Py_ssize_t d2 = d * d
    cdef double complex[:, ::1] ea = np.empty((d, d), dtype=np.complex128)
    cdef double complex[:, ::1] eb = np.empty((d, d), dtype=np.complex128)
    cdef double complex[:, ::1] diff = np.empty((d2, d2), dtype=np.complex128)
    cdef Py_ssize_t s, j, k, p, q, r, c, m
    cdef double complex val, acc

    if kets_b.shape[0] != n or kets_b.shape[1] != d:
        raise ValueError("kets_a and kets_b must have identical shapes")
    if out.shape[0] != d2 or out.shape[1] != d2:
        raise ValueError("out must be (d*d, d*d)")

    with nogil:
        for s in range(n):
            for j in range(d):
                for k in range(d):
                    ea[j, k] = kets_a[s, j] * kets_a[s, k].conjugate()
                    eb[j, k] = kets_b[s, j] * kets_b[s, k].conjugate()
            # diff = kron(ea, I) - kron(I, eb); row (j,p), column (k,q)
            for j in range(d):
                for p in range(d):
                    for k in range(d):
                        for q in range(d):
                            val = 0
                            if p == q:
                                val = ea[j, k]
                            if j == k:
                                val = val - eb[p, q]
                            diff[j * d + p, k * d + q] = val
            for r in range(d2):
                for c in range(d2):
                    acc = 0
                    for m in range(d2):
                        acc = acc + diff[r, m] * diff[m, c]
                    out[r, c] = out[r, c] + acc


def moment_accum(const double complex[:, ::1] kets,
                 double complex[:, ::1] out1,
                 double complex[:, ::1] out2):
    """Accumulate sum_s |phi><phi| into ``out1`` and its two-copy tensor
    square into ``out2``."""
    cdef Py_ssize_t n = kets.shape[0]
    cdef Py_ssize_t d = kets.shape[1]
    cdef double complex[:, ::1] e = np.empty((d, d), dtype=np.complex128)
    cdef Py_ssize_t s, j, k, p, q

    if out1.shape[0] != d or out1.shape[1] != d:
        raise ValueError("out1 must be (d, d)")
    if out2.shape[0] != d * d or out2.shape[1] != d * d:
        raise ValueError("out2 must be (d*d, d*d)")

    with nogil:
        for s in range(n):
            for j in range(d):
                for k in range(d):
                    e[j, k] = kets[s, j] * kets[s, k].conjugate()
                    out1[j, k] = out1[j, k] + e[j, k]
            for j in range(d):
                for p in range(d):
                    for k in range(d):
                        for q in range(d):
                            out2[j * d + p, k * d + q] = out2[j * d + p, k * d + q] + e[j, k] * e[p, q]
