"""Minimal graded resolutions of ``A^0``, the dg module ``K(A)`` and the Ext-algebra.

A graded free module is a list of generators ``(vertex, degree)``; generator
``g`` spans ``e_x A`` shifted to start in degree ``degree``.  Its degree-``d``
part with right vertex ``y`` has coordinates ``(g, b)`` with ``b`` running over
``e_x A^{d - degree} e_y``.  Maps are matrices ``D[j, g]`` (``g`` a source
generator, ``j`` a target generator) of algebra elements.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from . import linalg
from .algebra import AlgebraElement
from .dgmod import (
    ChainMap,
    ChainMapSpace,
    cohomology,
    make_module,
)
from .errors import (
    CapExceeded,
    DegreeCapExceeded,
    InfiniteResolution,
    NonzeroDerivation,
    NotKoszul,
    VerificationFailed,
)
from .fda import FiniteDimAlgebra


def _top_degree(alg):
    return max(alg.deg) if alg.deg else 0


def _slots(alg, gens, d, y):
    out = []
    for g, (x, deg) in enumerate(gens):
        e = d - deg
        if e < 0 or (e > alg.degree_cap and alg.finite):
            continue
        for b in alg.component(x, y, e):
            out.append((g, b))
    return out


def _image_columns(alg, Dm, src_gens, tgt_gens, d, y):
    """Columns of the degree-``(d, y)`` part of ``Dm`` and the target slot list."""
    F = alg.field
    src = _slots(alg, src_gens, d, y)
    tgt = _slots(alg, tgt_gens, d, y)
    index = {s: k for k, s in enumerate(tgt)}
    rows_of: dict = {}
    for (j, g), v in Dm.items():
        rows_of.setdefault(g, []).append((j, v))
    cols = []
    for g, b in src:
        u = AlgebraElement(alg, alg.deg[b], alg.lv[b], alg.rv[b], {b: F.one})
        col: dict = {}
        for j, a in rows_of.get(g, ()):
            for k, c in (a * u).coeffs.items():
                key = index[j, k]
                col[key] = col.get(key, F.zero) + c
        cols.append({k: c for k, c in col.items() if c != 0})
    return src, tgt, cols


def _kernel(alg, Dm, src_gens, tgt_gens, d, y, augmentation):
    F = alg.field
    src = _slots(alg, src_gens, d, y)
    if augmentation:
        # P_0 -> A^0 is the identity in degree 0 and zero above
        return src, ([] if d == 0 else [{k: F.one} for k in range(len(src))])
    _, tgt, cols = _image_columns(alg, Dm, src_gens, tgt_gens, d, y)
    return src, linalg.nullspace(F, linalg.transpose(cols, len(tgt)), len(src))


@dataclass
class Resolution:
    """``P_0 <- P_{-1} <- ...`` with ``terms[i]`` the generators ``(vertex, degree)`` of ``P_{-i}``.

    ``differentials[i]`` is the matrix of ``d_{-i}: P_{-i} -> P_{-i+1}``
    (``differentials[0]`` is empty; ``P_0 -> A^0`` is the augmentation).
    ``finite`` records that the syzygy after the last term vanishes in the
    computed window; ``window`` is the largest internal degree inspected.
    """

    alg: object
    terms: list
    differentials: list
    finite: bool
    window: int
    length_cap: int = 0
    degree_cap: int = 0

    @property
    def length(self):
        return len(self.terms)

    def generator_degrees(self, i):
        return sorted(deg for _, deg in self.terms[i])

    def term_multiset(self, i):
        from collections import Counter

        return Counter((self.alg.vertices[x], deg) for x, deg in self.terms[i])


def _window(alg, gens, degree_cap):
    if alg.finite:
        return max((deg for _, deg in gens), default=0) + _top_degree(alg)
    return min(degree_cap, alg.degree_cap)


def _next_term(alg, gens, Dm, tgt_gens, augmentation, window, degree_cap):
    F = alg.field
    nv = len(alg.vertices)
    new_gens, new_D = [], {}
    for d in range(window + 1):
        for y in range(nv):
            src, ker = _kernel(alg, Dm, gens, tgt_gens, d, y, augmentation)
            if not ker:
                continue
            index = {s: k for k, s in enumerate(src)}
            dec = []
            for h, (yh, dh) in enumerate(new_gens):
                e = d - dh
                if e <= 0:
                    continue
                col = [(g, v) for (g, hh), v in new_D.items() if hh == h]
                for b in alg.component(yh, y, e):
                    u = AlgebraElement(alg, e, yh, y, {b: F.one})
                    vec: dict = {}
                    for g, v in col:
                        for k, c in (v * u).coeffs.items():
                            key = index[g, k]
                            vec[key] = vec.get(key, F.zero) + c
                    vec = {k: c for k, c in vec.items() if c != 0}
                    if vec:
                        dec.append(vec)
            red, piv = linalg.rref(F, dec, len(src))
            current, r0 = list(red), len(piv)
            for v in ker:
                trial = current + [v]
                r = linalg.rank(F, trial, len(src))
                if r == r0:
                    continue
                current, r0 = trial, r
                if d > degree_cap:
                    raise DegreeCapExceeded(
                        f"a syzygy generator sits in degree {d} above the degree cap {degree_cap}; raise the cap"
                    )
                h = len(new_gens)
                new_gens.append((y, d))
                entries: dict = {}
                for k, c in v.items():
                    g, b = src[k]
                    entries.setdefault(g, {})[b] = c
                for g, coeffs in entries.items():
                    x, dg = gens[g]
                    new_D[g, h] = AlgebraElement(alg, d - dg, x, y, coeffs)
    return new_gens, new_D


def minimal_resolution(alg, length_cap=4, degree_cap=None) -> Resolution:
    """Terms ``P_0 .. P_{-length_cap}`` of the minimal graded resolution of ``A^0``."""
    if alg.has_derivation:
        raise NonzeroDerivation("resolutions need an algebra with zero differential")
    if degree_cap is None:
        degree_cap = max(length_cap, alg.degree_cap)
    nv = len(alg.vertices)
    terms = [[(x, 0) for x in range(nv)]]
    diffs = [{}]
    finite = False
    window = 0
    for i in range(length_cap + 1):
        gens = terms[-1]
        window = max(window, _window(alg, gens, degree_cap))
        tgt = terms[-2] if i > 0 else []
        # past the last requested term only the vanishing of the syzygy matters
        probe_cap = degree_cap if i < length_cap else float("inf")
        new_gens, new_D = _next_term(
            alg, gens, diffs[-1], tgt, i == 0, _window(alg, gens, degree_cap), probe_cap
        )
        if not new_gens:
            finite = True
            break
        if i == length_cap:
            break
        terms.append(new_gens)
        diffs.append(new_D)
    res = Resolution(alg, terms, diffs, finite, window, length_cap, degree_cap)
    verify_resolution(res)
    return res


def verify_resolution(res: Resolution):
    """Independent exactness and minimality check within the computed window."""
    alg = res.alg
    F = alg.field
    nv = len(alg.vertices)
    for i, Dm in enumerate(res.differentials):
        for v in Dm.values():
            if v.degree < 1:
                raise VerificationFailed("resolution differential has a scalar entry")
    for i in range(len(res.terms)):
        gens = res.terms[i]
        last = i == len(res.terms) - 1
        if last and not res.finite:
            continue
        for d in range(_window(alg, gens, res.degree_cap) + 1):
            for y in range(nv):
                src, ker = _kernel(alg, res.differentials[i], gens, res.terms[i - 1] if i else [], d, y, i == 0)
                if last:
                    if ker:
                        raise VerificationFailed("last term of a finite resolution is not injective")
                    continue
                _, tgt, cols = _image_columns(alg, res.differentials[i + 1], res.terms[i + 1], gens, d, y)
                rank = linalg.rank(F, cols, len(tgt))
                if rank != len(ker) or linalg.rank(F, list(cols) + ker, len(tgt)) != rank:
                    raise VerificationFailed(f"resolution is not exact at P_{-i} in degree {d}")


@dataclass
class KoszulVerdict:
    is_koszul: bool
    offending: tuple | None = None  # (i, generator degrees of P_{-i})
    complete: bool = True  # False: verdict holds up to the computed length only

    def __bool__(self):
        return self.is_koszul


def is_koszul(res: Resolution) -> KoszulVerdict:
    for i in range(len(res.terms)):
        degs = res.generator_degrees(i)
        if any(d != i for d in degs):
            return KoszulVerdict(False, (i, degs), True)
    return KoszulVerdict(True, None, res.finite)


def _require_finite_koszul(res):
    v = is_koszul(res)
    if not v:
        i, degs = v.offending
        raise NotKoszul(f"P_{-i} is generated in degrees {degs}, not purely in degree {i}")
    if not res.finite:
        raise InfiniteResolution("the resolution did not terminate within the computed length")


def _offsets(res):
    offs, k = [], 0
    for t in res.terms:
        offs.append(k)
        k += len(t)
    return offs


def koszul_module(res: Resolution):
    """``K(A) = P_0 (+) {1}P_{-1} (+) ...`` with differential ``(-1)^n d_{-n}`` on ``{n}P_{-n}``."""
    _require_finite_koszul(res)
    alg = res.alg
    F = alg.field
    offs = _offsets(res)
    gens = [(0, x) for t in res.terms for x, _ in t]
    D = {}
    for n in range(1, len(res.terms)):
        s = F(-1) if n % 2 else F.one
        for (j, g), v in res.differentials[n].items():
            D[offs[n - 1] + j, offs[n] + g] = v.scale(s)
    K = make_module(alg, gens, D)
    if not K.is_flag:
        raise VerificationFailed("K(A) did not come out as a flag module")
    return K


# -- Ext-algebra ------------------------------------------------------------------


@dataclass
class ExtAlgebra:
    """``E(A) = ext^*(A^0, A^0)`` realized by families of scalar matrices.

    An element of ``E^i`` is ``(f_s)`` with ``f_s`` a scalar matrix from the
    generators of ``P_{-s}`` to those of ``P_{-s+i}`` such that
    ``d_{-s+i} f_s = (-1)^i f_{s-1} d_{-s}``.  Products compose the families.
    """

    resolution: Resolution
    dims: list
    grading: list  # degree i of each basis element
    basis: list  # per basis element: {s: dense matrix}
    table: dict  # (a, b) -> {c: coeff}
    unit: list
    _coords: list = dc_field(default_factory=list, repr=False)

    def as_algebra(self) -> FiniteDimAlgebra:
        F = self.resolution.alg.field
        return FiniteDimAlgebra(F, [f"e{i}_{k}" for k, i in enumerate(self.grading)], self.table, self.unit)

    def multiply(self, a, b):
        return _compose_families(self.resolution, self.basis[a], self.grading[a], self.basis[b], self.grading[b])


def _compose_families(res, fa, ia, fb, ib):
    F = res.alg.field
    out = {}
    for s, B in fb.items():
        A = fa.get(s - ib)
        if A is None:
            continue
        C = linalg.matmul(F, A, B)
        if any(c != 0 for row in C for c in row):
            out[s] = C
    return out


def _ext_degree(res, i):
    """Basis of ``E^i`` as families, plus (unknown list, free columns) for coordinates."""
    alg = res.alg
    F = alg.field
    L = len(res.terms) - 1
    terms, diffs = res.terms, res.differentials
    unknowns = []
    for s in range(i, L + 1):
        for g, (x, _) in enumerate(terms[s]):
            for j, (xj, _) in enumerate(terms[s - i]):
                if xj == x:
                    unknowns.append((s, j, g))
    rows: dict = {}

    def put(key, k, c):
        r = rows.setdefault(key, {})
        r[k] = r.get(k, F.zero) + c

    sign = F.one if i % 2 == 0 else F(-1)
    for k, (s, j, g) in enumerate(unknowns):
        # d_{-s+i} f_s contributes to the (s) equation at entries (row of d, g)
        if s - i >= 1:
            for (r, jj), v in diffs[s - i].items():
                if jj == j:
                    for b, c in v.coeffs.items():
                        put((s, r, g, b), k, c)
        # -(-1)^i f_s d_{-(s+1)} contributes to the (s+1) equation
        if s + 1 <= L:
            for (gg, m), v in diffs[s + 1].items():
                if gg == g:
                    for b, c in v.coeffs.items():
                        put((s + 1, j, m, b), k, -sign * c)
    R = [{k: c for k, c in r.items() if c != 0} for r in rows.values()]
    vecs, free = linalg.nullspace_with_free(F, [r for r in R if r], len(unknowns))
    fams = [_family(res, i, unknowns, v) for v in vecs]
    return fams, unknowns, free


def _family(res, i, unknowns, vec):
    F = res.alg.field
    out = {}
    for k, c in vec.items():
        if c == 0:
            continue
        s, j, g = unknowns[k]
        if s not in out:
            out[s] = [[F.zero] * len(res.terms[s]) for _ in range(len(res.terms[s - i]))]
        out[s][j][g] = c
    return out


def _family_vector(unknowns, fam):
    return {k: fam[s][j][g] for k, (s, j, g) in enumerate(unknowns) if s in fam and fam[s][j][g] != 0}


def ext_algebra(res: Resolution) -> ExtAlgebra:
    _require_finite_koszul(res)
    F = res.alg.field
    L = len(res.terms) - 1
    basis, grading, dims, coords = [], [], [], []
    for i in range(L + 1):
        fams, unknowns, free = _ext_degree(res, i)
        if len(fams) != len(res.terms[i]):
            raise VerificationFailed(f"E^{i} has dimension {len(fams)}, expected {len(res.terms[i])}")
        dims.append(len(fams))
        start = len(basis)
        basis.extend(fams)
        grading.extend([i] * len(fams))
        coords.append((start, unknowns, free, fams))

    def coordinates(fam, i):
        if i > L:
            if fam:
                raise VerificationFailed("product lands above the resolution length")
            return {}
        start, unknowns, free, fams = coords[i]
        vec = _family_vector(unknowns, fam)
        c = [vec.get(k, F.zero) for k in free]
        rebuilt: dict = {}
        for x, f in zip(c, fams):
            for s, Mt in f.items():
                cur = rebuilt.setdefault(s, [[F.zero] * len(Mt[0]) for _ in Mt])
                for r, row in enumerate(Mt):
                    for q, y in enumerate(row):
                        cur[r][q] = cur[r][q] + x * y
        rebuilt = {s: Mt for s, Mt in rebuilt.items() if any(y != 0 for row in Mt for y in row)}
        if rebuilt != fam:
            raise VerificationFailed("product of Ext classes is not a cocycle")
        return {start + k: x for k, x in enumerate(c) if x != 0}

    table = {}
    for a in range(len(basis)):
        for b in range(len(basis)):
            prod = _compose_families(res, basis[a], grading[a], basis[b], grading[b])
            t = coordinates(prod, grading[a] + grading[b])
            if t:
                table[a, b] = t
    ident = {s: linalg.identity(F, len(res.terms[s])) for s in range(L + 1) if res.terms[s]}
    u = coordinates(ident, 0)
    unit = [u.get(k, F.zero) for k in range(len(basis))]
    return ExtAlgebra(res, dims, grading, basis, table, unit)


# -- End(K(A)) versus E(A) -------------------------------------------------------


def family_to_endomorphism(res, K, fam, i) -> ChainMap:
    alg = res.alg
    offs = _offsets(res)
    ent = {}
    for s, Mt in fam.items():
        for j, row in enumerate(Mt):
            for g, c in enumerate(row):
                if c != 0:
                    x = res.terms[s][g][0]
                    ent[offs[s - i] + j, offs[s] + g] = alg.scalar_element(x, c)
    return ChainMap(K, K, 0, ent)


def _term_of(res):
    out = []
    for s, t in enumerate(res.terms):
        out.extend([s] * len(t))
    return out


def end_graded_dims(K, res):
    """Dimensions of the diagonal graded pieces of the degree-0 endomorphisms of ``K``."""
    F = K.field
    term = _term_of(res)
    space = ChainMapSpace(K, K, 0)
    dims: dict = {}
    lowest = 0
    for i in range(-(len(res.terms) - 1), len(res.terms)):
        proj = []
        for v in space.vectors:
            w = {}
            for k, c in v.items():
                j, g, _ = space.space.slots[k]
                if term[g] - term[j] == i:
                    w[k] = c
            if w:
                proj.append(w)
        r = linalg.rank(F, proj, space.space.dim)
        if r:
            dims[i] = r
            lowest = min(lowest, i)
    return [dims.get(i, 0) for i in range(0, max(dims, default=-1) + 1)], lowest, space


@dataclass
class DualityReport:
    ext: ExtAlgebra
    module: object
    ext_dims: list
    end_dims: list
    isomorphism: list  # column k: coordinates of the image of the k-th Ext basis element
    checks: dict

    @property
    def verified(self):
        return all(self.checks.values())


def verify_koszul_duality(alg, length_cap=4, degree_cap=None) -> DualityReport:
    from .heart import contains_all_simples, is_injective_heart

    res = minimal_resolution(alg, length_cap, degree_cap)
    _require_finite_koszul(res)
    E = ext_algebra(res)
    K = koszul_module(res)
    end_dims, lowest, space = end_graded_dims(K, res)
    images = [family_to_endomorphism(res, K, f, i) for f, i in zip(E.basis, E.grading)]
    F = alg.field
    cols = [space.coords(phi) for phi in images]
    iso = [[cols[c][r] for c in range(len(cols))] for r in range(space.dim)]
    checks = {}
    checks["graded_dims_equal"] = end_dims == E.dims and lowest == 0
    checks["chain_maps"] = all(phi.is_chain() for phi in images)
    checks["bijective"] = len(cols) == space.dim and (space.dim == 0 or linalg.inverse(F, iso) is not None)
    mult = True
    for a in range(len(E.basis)):
        for b in range(len(E.basis)):
            lhs = images[a] @ images[b]
            t = E.table.get((a, b), {})
            rhs = ChainMap(K, K, 0, {}, check=False)
            for c, x in t.items():
                rhs = rhs + images[c].scale(x)
            if lhs != rhs:
                mult = False
    checks["structure_constants"] = mult
    unit = ChainMap(K, K, 0, {}, check=False)
    for c, x in enumerate(E.unit):
        if x != 0:
            unit = unit + images[c].scale(x)
    checks["unit"] = unit == ChainMap(K, K, 0, {(i, i): alg.idempotent(K.vertex(i)) for i in range(K.n)})
    checks["injective_in_heart"] = is_injective_heart(K)
    checks["contains_simples"] = contains_all_simples(K)
    checks["nonnegative_grading"] = lowest == 0
    checks["cohomology_is_A0"] = _cohomology_is_degree_zero(K)
    report = DualityReport(E, K, E.dims, end_dims, iso, checks)
    if not report.verified:
        failed = sorted(k for k, v in checks.items() if not v)
        raise VerificationFailed(f"Koszul duality checks failed: {', '.join(failed)}")
    return report


def _cohomology_is_degree_zero(K):
    alg = K.alg
    nv = len(alg.vertices)
    top = alg.degree_cap - 1 if not alg.finite else alg.degree_cap
    for n in range(0, top + 1):
        try:
            h = cohomology(K, n).dim
        except CapExceeded:
            break
        if h != (nv if n == 0 else 0):
            return False
    return True
