"""Cones, Gaussian-elimination minimization, Filt normal forms and truncations."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from . import linalg
from .dgmod import (
    ChainMap,
    Homotopy,
    conjugate,
    identity_map,
    make_module,
    mat_add,
    mat_mul,
    permute_module,
    reduced_module,
    submodule_on,
)
from .errors import NotFilterable, VerificationFailed


def cone(f: ChainMap):
    """``C(f) = Y (+) {1}X`` with differential ``[[d_Y, f], [0, -d_X]]``."""
    X, Y = f.source, f.target
    if f.degree != 0:
        raise VerificationFailed("cone needs a degree-0 map")
    off = Y.n
    D = dict(Y.D)
    for (j, i), v in f.entries.items():
        D[j, i + off] = v
    mone = X.field(-1)
    for (j, i), v in X.D.items():
        D[j + off, i + off] = v.scale(mone)
    gens = list(Y.gens) + [(l + 1, x) for l, x in X.gens]
    return make_module(X.alg, gens, D)


# -- minimization -------------------------------------------------------------


@dataclass
class MinimizationTrace:
    """``forward: M -> result`` and ``backward: result -> M`` with
    ``forward o backward = id`` and ``id - backward o forward = D(homotopy)``."""

    source: object
    result: object
    forward: ChainMap
    backward: ChainMap
    homotopy: Homotopy
    eliminations: list = dc_field(default_factory=list)  # (source gen, target gen) in input indices

    def verify(self):
        M, R = self.source, self.result
        if not (self.forward.is_chain() and self.backward.is_chain()):
            return False
        if self.forward @ self.backward != identity_map(R):
            return False
        lhs = identity_map(M) - self.backward @ self.forward
        return lhs == self.homotopy.boundary()


def _find_pivot(M):
    for (j, i) in sorted(M.D):
        v = M.D[j, i]
        if v.degree == 0:
            lam = v.scalar()
            if lam != 0:
                return j, i, lam
    return None


def _eliminate(M, j, i, lam):
    """Cancel source generator ``i`` against target ``j``; returns (M', pi, sigma, H)."""
    alg = M.alg
    F = alg.field
    linv = F.one / lam
    keep = [q for q in range(M.n) if q not in (i, j)]
    pos = {q: k for k, q in enumerate(keep)}
    col_i = {q: v for (q, c), v in M.D.items() if c == i}
    row_j = {p: v for (r, p), v in M.D.items() if r == j}
    D = {}
    for (q, p), v in M.D.items():
        if q in pos and p in pos:
            D[pos[q], pos[p]] = v
    for q, a_qi in col_i.items():
        if q not in pos:
            continue
        left = a_qi.scale(linv)
        for p, a_jp in row_j.items():
            if p not in pos:
                continue
            prod = left * a_jp
            if not prod:
                continue
            key = (pos[q], pos[p])
            cur = D.get(key)
            D[key] = prod.scale(F(-1)) if cur is None else cur - prod
    R = make_module(alg, [M.gens[q] for q in keep], D)

    pi = {}
    for q in keep:
        pi[pos[q], q] = alg.idempotent(M.vertex(q))
    for q, a_qi in col_i.items():
        if q in pos:
            pi[pos[q], j] = a_qi.scale(-linv)
    sigma = {}
    for q in keep:
        sigma[q, pos[q]] = alg.idempotent(M.vertex(q))
    for p, a_jp in row_j.items():
        if p in pos:
            sigma[i, pos[p]] = a_jp.scale(-linv)
    pi_map = ChainMap(M, R, 0, pi)
    sigma_map = ChainMap(R, M, 0, sigma)
    H = Homotopy(M, M, -1, {(i, j): alg.scalar_element(M.vertex(i), linv)})
    return R, pi_map, sigma_map, H


def minimize(M) -> MinimizationTrace:
    """Eliminate degree-0 scalar entries until ``d(M)`` lies in ``M A^+``."""
    current = M
    labels = list(range(M.n))
    fwd = identity_map(M)
    bwd = identity_map(M)
    H = Homotopy(M, M, -1, {})
    log = []
    while True:
        piv = _find_pivot(current)
        if piv is None:
            break
        j, i, lam = piv
        R, pi, sigma, h = _eliminate(current, j, i, lam)
        # H_total += bwd o h o fwd
        H = Homotopy(M, M, -1, mat_add(H.entries, mat_mul(bwd.entries, mat_mul(h.entries, fwd.entries))))
        fwd = pi @ fwd
        bwd = bwd @ sigma
        log.append((labels[i], labels[j]))
        labels = [labels[q] for q in range(current.n) if q not in (i, j)]
        current = R
    trace = MinimizationTrace(M, current, fwd, bwd, H, log)
    if not trace.verify():
        raise VerificationFailed("minimization comparison maps failed their exact check")
    return trace


def is_minimal(M) -> bool:
    return _find_pivot(M) is None and all(v.degree > 0 for v in M.D.values())


# -- Filt normal form ----------------------------------------------------------


@dataclass
class Normalized:
    """``module`` is a DgFiltModule with ``to_input: module -> M`` and ``from_input``."""

    module: object
    to_input: ChainMap
    from_input: ChainMap
    layers: dict  # shift -> list of layers, each a list of generator indices of ``module``


def _level_layers(M, block):
    """Ascending kernel flag of the within-level action on generator indices ``block``.

    Returns a list of layers, each a list of (vertex, vector over ``block``).
    """
    alg = M.alg
    F = alg.field
    n = len(block)
    bpos = {g: k for k, g in enumerate(block)}
    by_vertex: dict = {}
    for k, g in enumerate(block):
        by_vertex.setdefault(M.vertex(g), []).append(k)
    # w[b][k] : {row position: coeff} -- coefficient of g_row * b in d(g_block[k])
    act: dict = {}
    for (j, i), v in M.D.items():
        if j in bpos and i in bpos:
            for b, c in v.coeffs.items():
                act.setdefault((b, bpos[i]), {})[bpos[j]] = c
    bnames = sorted({b for (b, _) in act})

    U = {x: [] for x in by_vertex}  # echelon basis of current flag space (vectors over block positions)
    layers = []
    total = 0
    while total < n:
        new_layer = []
        ann = {}
        for y, ycols in by_vertex.items():
            yset = set(ycols)
            if U[y]:
                rows_y = [{c: v for c, v in r.items() if c in yset} for r in linalg.nullspace(F, U[y], n)]
                ann[y] = [r for r in rows_y if r]
            else:
                ann[y] = [{c: F.one} for c in ycols]
        for x, cols in sorted(by_vertex.items()):
            rows = []
            for b in bnames:
                y = alg.lv[b]
                if alg.rv[b] != x or y not in ann:
                    continue
                for r in ann[y]:
                    row = {}
                    for k in cols:
                        w = act.get((b, k))
                        if not w:
                            continue
                        s = sum((r.get(q, 0) * c for q, c in w.items()), F.zero)
                        if s != 0:
                            row[k] = s
                    if row:
                        rows.append(row)
            ker = linalg.nullspace(F, [{c: v for c, v in r.items()} for r in rows] + [
                {c: F.one} for c in range(n) if c not in set(cols)
            ], n)
            old = U[x]
            red_old, piv_old = linalg.rref(F, old, n)
            added = []
            cur = list(red_old)
            r0 = len(piv_old)
            for v in ker:
                trial = cur + [v]
                r = linalg.rank(F, trial, n)
                if r > r0:
                    added.append(v)
                    cur, r0 = trial, r
            new_layer.extend((x, v) for v in added)
        if not new_layer:
            raise NotFilterable(
                "the differential restricted to a level has no kernel; the module is not perfect"
            )
        for x, v in new_layer:
            U[x] = U[x] + [v]
        total += len(new_layer)
        layers.append(new_layer)
    return layers


def filt_normalize(M) -> Normalized:
    """Isomorphic DgFiltModule for a minimal module (``d(M)`` in ``M A^+``)."""
    alg = M.alg
    for v in M.D.values():
        if v.degree == 0:
            raise NotFilterable("input has degree-0 differential entries; minimize it first")
    perm = sorted(range(M.n), key=lambda k: -M.shift(k))
    S, to_S, from_S = permute_module(M, perm)
    P = {}
    order = []
    layer_info = {}
    k = 0
    while k < S.n:
        l = S.shift(k)
        block = [g for g in range(k, S.n) if S.shift(g) == l]
        k += len(block)
        layers = _level_layers(S, block)
        layer_info[l] = []
        for layer in layers:
            idxs = []
            for x, vec in layer:
                col = len(order)
                order.append((l, x))
                idxs.append(col)
                for pos_, c in vec.items():
                    P[block[pos_], col] = alg.scalar_element(x, c)
            layer_info[l].append(idxs)
    N, iso, inv = conjugate(S, P, order)
    if not N.is_filt:
        raise VerificationFailed("normalization did not produce a Filt module")
    return Normalized(N, from_S @ iso, inv @ to_S, layer_info)


def normal_form(M):
    """Minimize then normalize; returns (Filt module, map to M, map from M, trace)."""
    tr = minimize(M)
    nf = filt_normalize(tr.result)
    return nf.module, tr.backward @ nf.to_input, nf.from_input @ tr.forward, tr


# -- truncations ----------------------------------------------------------------


def _check_filt(M):
    if not M.is_filt:
        raise NotFilterable("truncations need a module in Filt form")


def tau_le(M, n):
    """Submodule generated by the generators of degree ``-l <= n``."""
    _check_filt(M)
    return submodule_on(M, [i for i in range(M.n) if -M.shift(i) <= n])


def tau_ge(M, n):
    """Quotient by the generators of degree ``< n``."""
    _check_filt(M)
    return submodule_on(M, [i for i in range(M.n) if -M.shift(i) >= n])


@dataclass
class TruncationTriangle:
    le: object
    module: object
    ge: object
    inclusion: ChainMap  # le -> M
    projection: ChainMap  # M -> ge
    section: ChainMap  # ge -> M, graded splitting (not a chain map in general)
    retraction: ChainMap  # M -> le, graded splitting
    connecting: ChainMap  # {-1}ge -> le, with M = cone(connecting)


def truncation_triangle(M, n) -> TruncationTriangle:
    from .dgmod import shift_module

    _check_filt(M)
    alg = M.alg
    lo = [i for i in range(M.n) if -M.shift(i) <= n]
    hi = [i for i in range(M.n) if -M.shift(i) > n]
    S, Q = submodule_on(M, lo), submodule_on(M, hi)
    e = alg.idempotent
    inc = ChainMap(S, M, 0, {(g, k): e(M.vertex(g)) for k, g in enumerate(lo)})
    pro = ChainMap(M, Q, 0, {(k, g): e(M.vertex(g)) for k, g in enumerate(hi)})
    sec = ChainMap(Q, M, 0, {(g, k): e(M.vertex(g)) for k, g in enumerate(hi)})
    ret = ChainMap(M, S, 0, {(k, g): e(M.vertex(g)) for k, g in enumerate(lo)})
    Qm = shift_module(Q, -1)
    lpos = {g: k for k, g in enumerate(lo)}
    hpos = {g: k for k, g in enumerate(hi)}
    delta = ChainMap(
        Qm, S, 0, {(lpos[j], hpos[i]): v for (j, i), v in M.D.items() if j in lpos and i in hpos}
    )
    return TruncationTriangle(S, M, Q, inc, pro, sec, ret, delta)


def t_bounds(M):
    """``(a, b)`` spanning the support of ``H(M-bar)``, or None for a zero object."""
    supp = reduced_module(M).support
    if not supp:
        return None
    return supp[0], supp[-1]
