# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the enumeration kernels in ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, exp, fabs, M_PI

cnp.import_array()


def brute_force_sum(int n, int p, int q, double a, double b):
    cdef int N = p * q
    cdef long long total = 1
    cdef int i, j, r, c
    for i in range(N):
        total *= n
    cdef double[:] cosv = np.array([2.0 * cos(2.0 * M_PI * k / n) for k in range(n)])
    cdef int[:] s = np.zeros(N, dtype=np.intc)
    cdef double e, w, acc = 0.0, comp = 0.0, t
    cdef long long it
    for it in range(total):
        e = 0.0
        for r in range(p):
            for c in range(q):
                i = s[r * q + c]
                j = s[r * q + (c + 1) % q]
                e += a * cosv[(j - i + n) % n]
                j = s[((r + 1) % p) * q + c]
                e += b * cosv[(j - i + n) % n]
        w = exp(e)
        # Neumaier summation
        t = acc + w
        if fabs(acc) >= fabs(w):
            comp += (acc - t) + w
        else:
            comp += (w - t) + acc
        acc = t
        # odometer, last site fastest
        i = N - 1
        while i >= 0:
            s[i] += 1
            if s[i] < n:
                break
            s[i] = 0
            i -= 1
    return acc + comp, total


def multisum_accumulate(coefs, codes, phases, int q, int n, int ngen, table):
    cdef cnp.ndarray[cnp.complex128_t] cf = np.ascontiguousarray(coefs, dtype=np.complex128)
    cdef cnp.ndarray[cnp.int64_t] cd = np.ascontiguousarray(codes, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t] ph = np.ascontiguousarray(phases, dtype=np.int64) % n
    cdef cnp.ndarray[cnp.int64_t, ndim=2] tab = np.ascontiguousarray(table, dtype=np.int64)
    cdef int nb = cf.shape[0]
    cdef long long size = 1
    cdef int g, h, d, k
    for g in range(ngen):
        size *= n
    cdef cnp.ndarray[cnp.int64_t, ndim=2] bex = np.zeros((nb, ngen), dtype=np.int64)
    cdef long long code
    for k in range(nb):
        code = cd[k]
        for g in range(ngen):
            bex[k, g] = code % n
            code //= n
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] acc = np.zeros((size, n), dtype=np.complex128)
    cdef cnp.ndarray[cnp.int64_t, ndim=2] counts = np.zeros((size, n), dtype=np.int64)
    # per-depth partial products
    cdef cnp.ndarray[cnp.complex128_t] sc = np.zeros(q + 1, dtype=np.complex128)
    cdef cnp.ndarray[cnp.int64_t, ndim=2] se = np.zeros((q + 1, ngen), dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t] sp = np.zeros(q + 1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t] digit = np.zeros(q, dtype=np.int64)
    cdef long long cross, slot
    cdef int level = 0
    sc[0] = 1.0
    while True:
        # extend from `level` to full depth with current digits
        for d in range(level, q):
            k = digit[d]
            cross = 0
            for g in range(1, ngen):
                if se[d, g]:
                    for h in range(g):
                        if bex[k, h]:
                            cross += tab[g, h] * se[d, g] * bex[k, h]
            sc[d + 1] = sc[d] * cf[k]
            sp[d + 1] = (sp[d] + ph[k] + cross) % n
            for g in range(ngen):
                se[d + 1, g] = (se[d, g] + bex[k, g]) % n
        slot = 0
        for g in range(ngen - 1, -1, -1):
            slot = slot * n + se[q, g]
        acc[slot, sp[q]] += sc[q]
        counts[slot, sp[q]] += 1
        d = q - 1
        while d >= 0:
            digit[d] += 1
            if digit[d] < nb:
                break
            digit[d] = 0
            d -= 1
        if d < 0:
            break
        level = d
    return acc, counts
