"""Exact linear algebra on sparse vectors.

Vectors are dicts ``{column: scalar}`` with zero entries omitted; a matrix is a
list of such row dicts together with its column count.  Over F_p the row
reduction is delegated to a dense int64 kernel (compiled when available); over
Q a sparse Fraction elimination is used.
"""

from __future__ import annotations

import numpy as np

from .field import Field, Fp

try:
    from ._rref import rref_modp
    KERNEL = "compiled"
except ImportError:  # pragma: no cover - exercised when the extension is absent
    from ._rref_py import rref_modp
    KERNEL = "python"

_DENSE_P_LIMIT = 2**31


def _rref_sparse(rows, one):
    pivots: dict[int, dict] = {}
    for row in rows:
        row = {c: v for c, v in row.items() if v != 0}
        for c in [c for c in row if c in pivots]:
            f = row.pop(c, None)
            if f is None or f == 0:
                continue
            for cc, vv in pivots[c].items():
                if cc == c:
                    continue
                nv = row.get(cc, 0) - f * vv
                if nv == 0:
                    row.pop(cc, None)
                else:
                    row[cc] = nv
        if not row:
            continue
        c0 = min(row)
        inv = one / row[c0]
        row = {c: v * inv for c, v in row.items()}
        for pc, prow in pivots.items():
            f = prow.get(c0)
            if f is None:
                continue
            for cc, vv in row.items():
                nv = prow.get(cc, 0) - f * vv
                if nv == 0:
                    prow.pop(cc, None)
                else:
                    prow[cc] = nv
        pivots[c0] = row
    order = sorted(pivots)
    return [pivots[c] for c in order], order


def _rref_dense_modp(rows, ncols, p):
    M = np.zeros((len(rows), ncols), dtype=np.int64)
    for i, row in enumerate(rows):
        for c, v in row.items():
            M[i, c] = v.v if isinstance(v, Fp) else int(v) % p
    pivots = rref_modp(M, p)
    out = []
    for r in range(len(pivots)):
        nz = np.flatnonzero(M[r])
        out.append({int(c): Fp(int(M[r, c]), p) for c in nz})
    return out, list(pivots)


def rref(F: Field, rows, ncols: int):
    """Reduced row echelon form.

    Returns ``(nonzero_rows, pivot_columns)``; row ``k`` has a 1 in column
    ``pivot_columns[k]`` and zeros in every other pivot column.
    """
    rows = list(rows)
    if not rows or ncols == 0:
        return [], []
    if F.characteristic and F.characteristic < _DENSE_P_LIMIT:
        return _rref_dense_modp(rows, ncols, F.characteristic)
    return _rref_sparse(rows, F.one)


def rank(F, rows, ncols):
    return len(rref(F, rows, ncols)[1])


def nullspace(F: Field, rows, ncols: int):
    """Basis of ``{v : row . v = 0 for every row}``, one vector per free column."""
    return nullspace_with_free(F, rows, ncols)[0]


def nullspace_with_free(F: Field, rows, ncols: int):
    """Like :func:`nullspace`, also returning the free column of each basis vector."""
    red, piv = rref(F, rows, ncols)
    pivset = set(piv)
    basis, free = [], []
    for f in range(ncols):
        if f in pivset:
            continue
        v = {f: F.one}
        for r, pc in zip(red, piv):
            x = r.get(f)
            if x is not None:
                v[pc] = -x
        basis.append(v)
        free.append(f)
    return basis, free


def solve(F: Field, rows, ncols: int, rhs: dict):
    """One solution ``v`` of ``rows . v = rhs`` (``rhs`` keyed by row index), or None."""
    rows = list(rows)
    aug = []
    for i, row in enumerate(rows):
        r = dict(row)
        b = rhs.get(i)
        if b is not None and b != 0:
            r[ncols] = b
        aug.append(r)
    for i in rhs:
        if i >= len(rows) and rhs[i] != 0:
            return None
    red, piv = rref(F, aug, ncols + 1)
    if piv and piv[-1] == ncols:
        return None
    sol = {}
    for r, pc in zip(red, piv):
        x = r.get(ncols)
        if x is not None and x != 0:
            sol[pc] = x
    return sol


def transpose(columns, nrows=None):
    """Turn a list of column dicts into row dicts."""
    rows: dict[int, dict] = {}
    for j, col in enumerate(columns):
        for i, v in col.items():
            rows.setdefault(i, {})[j] = v
    n = nrows if nrows is not None else (max(rows) + 1 if rows else 0)
    return [rows.get(i, {}) for i in range(n)]


def span_basis(F, vectors, ncols):
    """Reduced echelon basis of the span of ``vectors``."""
    return rref(F, vectors, ncols)[0]


def coordinates(F, basis, v, ncols):
    """Coefficients ``c`` with ``sum c_k basis[k] = v``; None if ``v`` is outside the span."""
    if not basis:
        return [] if not any(x != 0 for x in v.values()) else None
    rows = transpose(basis, ncols)
    sol = solve(F, rows, len(basis), {i: x for i, x in v.items()})
    if sol is None:
        return None
    return [sol.get(k, F.zero) for k in range(len(basis))]


def complement_units(F, vectors, ncols):
    """Unit vectors completing the span of ``vectors`` to the whole space."""
    _, piv = rref(F, vectors, ncols)
    pivset = set(piv)
    return [c for c in range(ncols) if c not in pivset]


# dense square matrices as lists of lists

def identity(F, n):
    return [[F.one if i == j else F.zero for j in range(n)] for i in range(n)]


def matmul(F, A, B):
    if not A:
        return []
    m, k, n = len(A), len(B), len(B[0]) if B else 0
    out = [[F.zero] * n for _ in range(m)]
    for i in range(m):
        Ai = A[i]
        oi = out[i]
        for t in range(k):
            a = Ai[t]
            if a == 0:
                continue
            Bt = B[t]
            for j in range(n):
                b = Bt[j]
                if b != 0:
                    oi[j] = oi[j] + a * b
    return out


def inverse(F, A):
    """Inverse of a dense square matrix, or None when singular."""
    n = len(A)
    if n == 0:
        return []
    rows = []
    for i in range(n):
        r = {j: A[i][j] for j in range(n) if A[i][j] != 0}
        r[n + i] = F.one
        rows.append(r)
    red, piv = rref(F, rows, 2 * n)
    if piv[:n] != list(range(n)) or len(piv) < n:
        return None
    return [[red[i].get(n + j, F.zero) for j in range(n)] for i in range(n)]


def dense_rank(F, A):
    if not A:
        return 0
    n = len(A[0])
    return rank(F, [{j: x for j, x in enumerate(r) if x != 0} for r in A], n)
