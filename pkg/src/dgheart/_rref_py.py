"""Pure-Python (numpy-vectorised) reduced row echelon form over F_p.

Same contract as the compiled ``_rref.rref_modp``: reduces the int64 array in
place and returns the list of pivot columns.
"""

import numpy as np


def rref_modp(M, p):
    m, n = M.shape
    r = 0
    pivots = []
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(M[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            M[[r, i]] = M[[i, r]]
        M[r] = (M[r] * pow(int(M[r, c]), -1, p)) % p
        col = M[:, c].copy()
        col[r] = 0
        rows = np.flatnonzero(col)
        if rows.size:
            M[rows] = (M[rows] - np.outer(col[rows], M[r])) % p
        pivots.append(c)
        r += 1
    return pivots
