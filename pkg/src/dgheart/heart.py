"""The heart as flag modules: Filt modules whose generators all sit in degree 0.

Degree-0 maps between flag modules have scalar entries, so kernels and
cokernels are computed on the scalar generator matrix vertex by vertex and
the differential of the result is solved exactly in degree 1.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from . import linalg
from .dgmod import (
    ChainMap,
    ChainMapSpace,
    cohomology,
    generator_module,
    make_module,
    mat_mul,
    solve_factor,
    submodule_on,
)
from .errors import MissingSimple, NotDgFlag, NotInjective, VerificationFailed
from .fda import end_algebra


def require_flag(*mods):
    for M in mods:
        if not M.is_flag:
            raise NotDgFlag("heart operations need Filt modules with every shift 0")


def _normalized(alg, gens, D, to_ambient: dict, ambient, into=True):
    """Build the module, normalize it, and attach the map to or from ``ambient``."""
    from .triang import filt_normalize

    K = make_module(alg, gens, D)
    nf = filt_normalize(K)
    m = ChainMap(K, ambient, 0, to_ambient) if into else ChainMap(ambient, K, 0, to_ambient)
    if not m.is_chain():
        raise VerificationFailed("induced map is not a chain map")
    if into:
        return nf.module, m @ nf.to_input
    return nf.module, nf.from_input @ m


def _vertex_blocks(M):
    blocks: dict = {}
    for i in range(M.n):
        blocks.setdefault(M.vertex(i), []).append(i)
    return blocks


@dataclass
class HeartKernel:
    module: object
    inclusion: ChainMap


@dataclass
class HeartCokernel:
    module: object
    projection: ChainMap


@dataclass
class HeartImage:
    module: object
    inclusion: ChainMap  # image -> target
    corestriction: ChainMap  # source -> image


def heart_kernel(f: ChainMap) -> HeartKernel:
    M, N = f.source, f.target
    require_flag(M, N)
    alg = M.alg
    F = alg.field
    fbar = f.bar()
    gens, V = [], {}
    for x, idx in sorted(_vertex_blocks(M).items()):
        rows = []
        for j in range(N.n):
            if N.vertex(j) != x:
                continue
            row = {a: fbar[j][i] for a, i in enumerate(idx) if fbar[j][i] != 0}
            if row:
                rows.append(row)
        for v in linalg.nullspace(F, rows, len(idx)):
            col = len(gens)
            gens.append((0, x))
            for a, c in v.items():
                V[idx[a], col] = alg.scalar_element(x, c)
    D = solve_factor(alg, M.gens, gens, V, gens, mat_mul(M.D, V), 1)
    if D is None:
        raise VerificationFailed("kernel of a chain map is not closed under the differential")
    K, inc = _normalized(alg, gens, D, V, M, into=True)
    if not (f @ inc).is_zero():
        raise VerificationFailed("kernel inclusion does not compose to zero")
    return HeartKernel(K, inc)


def heart_cokernel(f: ChainMap) -> HeartCokernel:
    M, N = f.source, f.target
    require_flag(M, N)
    alg = M.alg
    F = alg.field
    fbar = f.bar()
    gens, P, S = [], {}, {}
    for x, idx in sorted(_vertex_blocks(N).items()):
        pos = {j: a for a, j in enumerate(idx)}
        cols = []
        for i in range(M.n):
            col = {pos[j]: fbar[j][i] for j in idx if fbar[j][i] != 0}
            if col:
                cols.append(col)
        red, piv = linalg.rref(F, cols, len(idx))
        pivset = set(piv)
        comp = [a for a in range(len(idx)) if a not in pivset]
        start = len(gens)
        cpos = {a: start + k for k, a in enumerate(comp)}
        for a in comp:
            gens.append((0, x))
            S[idx[a], cpos[a]] = alg.idempotent(x)
        for a, j in enumerate(idx):
            vec = {a: F.one}
            for r, p in zip(red, piv):
                c = vec.get(p)
                if c:
                    for k, y in r.items():
                        vec[k] = vec.get(k, F.zero) - c * y
            for k, c in vec.items():
                if c != 0:
                    if k not in cpos:
                        raise VerificationFailed("cokernel reduction left a pivot coordinate")
                    P[cpos[k], j] = alg.scalar_element(x, c)
    D = mat_mul(P, mat_mul(N.D, S))
    Q, pro = _normalized(alg, gens, D, P, N, into=False)
    if not (pro @ f).is_zero():
        raise VerificationFailed("cokernel projection does not compose to zero")
    return HeartCokernel(Q, pro)


def heart_image(f: ChainMap) -> HeartImage:
    ck = heart_cokernel(f)
    ker = heart_kernel(ck.projection)
    I, inc = ker.module, ker.inclusion
    g = solve_factor(I.alg, f.target.gens, I.gens, inc.entries, f.source.gens, f.entries, 0)
    if g is None:
        raise VerificationFailed("map does not factor through its image")
    return HeartImage(I, inc, ChainMap(f.source, I, 0, g))


# -- socle filtration and composition factors ------------------------------------


@dataclass
class SocleFiltration:
    """``soc_1 < soc_2 < ... = M`` with inclusions into ``M``.

    ``normal`` is the normalized presentation in which every ``soc_k`` is
    spanned by a prefix of the generators; ``multiplicities[k]`` counts the
    vertices of the generators added at step ``k``.
    """

    normal: object
    layers: list
    inclusions: list
    multiplicities: list

    @property
    def length(self):
        return len(self.layers)


def socle_filtration(M) -> SocleFiltration:
    from .triang import filt_normalize

    require_flag(M)
    nf = filt_normalize(M)
    N = nf.module
    names = M.alg.vertices
    layers, incs, mults = [], [], []
    prefix = []
    for layer in nf.layers.get(0, []):
        prefix = prefix + list(layer)
        S = submodule_on(N, prefix)
        inc = ChainMap(S, N, 0, {(g, k): M.alg.idempotent(N.vertex(g)) for k, g in enumerate(prefix)})
        layers.append(S)
        incs.append(nf.to_input @ inc)
        mults.append(Counter(names[N.vertex(g)] for g in layer))
    return SocleFiltration(N, layers, incs, mults)


def jh_multiplicities(M) -> Counter:
    require_flag(M)
    return Counter(M.alg.vertices[x] for _, x in M.gens)


def is_injective_heart(M) -> bool:
    require_flag(M)
    return cohomology(M, 1).dim == 0


def contains_all_simples(I) -> bool:
    """Every ``L_x`` embeds: some chain map ``L_x -> I`` has nonzero scalar part."""
    alg = I.alg
    for x in range(len(alg.vertices)):
        if not any(any(c != 0 for row in f.bar() for c in row) for f in ChainMapSpace(generator_module(alg, x, 0), I, 0).basis):
            return False
    return True


@dataclass
class HeartHomModule:
    """``Hom(N, I)`` as a left module over ``End(I)``.

    ``action[a]`` is the matrix (rows, columns indexed by ``basis``) of
    post-composition with the ``a``-th basis element of ``end``.
    """

    basis: list
    end: object
    action: list

    @property
    def dim(self):
        return len(self.basis)


def heart_hom_module(N, I) -> HeartHomModule:
    require_flag(N, I)
    if not is_injective_heart(I):
        raise NotInjective("H^1 of the target is nonzero")
    if not contains_all_simples(I):
        raise MissingSimple("some simple object does not embed in the target")
    H = ChainMapSpace(N, I, 0)
    E = end_algebra(I)
    F = E.field
    action = []
    for a in range(E.n):
        phi = E.to_map(E.basis_vector(a))
        cols = [H.coords(phi @ h) for h in H.basis]
        action.append([[cols[c][r] for c in range(H.dim)] for r in range(H.dim)])
    # module axioms, checked exactly
    unit = [[F.zero] * H.dim for _ in range(H.dim)]
    for a, c in enumerate(E.unit):
        if c != 0:
            unit = [[u + c * v for u, v in zip(ru, rv)] for ru, rv in zip(unit, action[a])]
    if unit != linalg.identity(F, H.dim):
        raise VerificationFailed("unit of End(I) does not act as the identity")
    for a in range(E.n):
        for b in range(E.n):
            prod = [[F.zero] * H.dim for _ in range(H.dim)]
            for k, c in E.table.get((a, b), {}).items():
                prod = [[u + c * v for u, v in zip(ru, rv)] for ru, rv in zip(prod, action[k])]
            if linalg.matmul(F, action[a], action[b]) != prod and H.dim:
                raise VerificationFailed("End(I) action is not multiplicative")
    return HeartHomModule(H.basis, E, action)


def is_semisimple_heart(M) -> bool:
    """A flag module is semisimple when its socle is everything."""
    require_flag(M)
    return socle_filtration(M).length <= 1
