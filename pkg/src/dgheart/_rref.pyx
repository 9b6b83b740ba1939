# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled reduced row echelon form over F_p (p < 2**31)."""

import numpy as np
cimport numpy as cnp


cdef long long _inv(long long a, long long p):
    cdef long long t = 0, nt = 1, r = p, nr = a, q, tmp
    while nr != 0:
        q = r // nr
        tmp = t - q * nt
        t = nt
        nt = tmp
        tmp = r - q * nr
        r = nr
        nr = tmp
    if t < 0:
        t += p
    return t


def rref_modp(cnp.int64_t[:, ::1] M, long long p):
    """Reduce ``M`` in place to reduced row echelon form; return pivot columns."""
    cdef Py_ssize_t m = M.shape[0], n = M.shape[1]
    cdef Py_ssize_t r = 0, c, i, j, k, piv, nnz
    cdef long long inv, f, x
    cdef cnp.int64_t[::1] nzcols = np.empty(n, dtype=np.int64)
    pivots = []
    for c in range(n):
        if r == m:
            break
        piv = -1
        for i in range(r, m):
            if M[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(c, n):
                x = M[r, j]
                M[r, j] = M[piv, j]
                M[piv, j] = x
        inv = _inv(M[r, c], p)
        nnz = 0
        for j in range(c, n):
            if M[r, j] != 0:
                M[r, j] = (M[r, j] * inv) % p
                nzcols[nnz] = j
                nnz += 1
        for i in range(m):
            if i == r:
                continue
            f = M[i, c]
            if f == 0:
                continue
            for k in range(nnz):
                j = nzcols[k]
                x = (M[i, j] - f * M[r, j]) % p
                if x < 0:
                    x += p
                M[i, j] = x
        pivots.append(c)
        r += 1
    return pivots
