"""Acceptance suite: ten criteria, exact arithmetic throughout.

Each test records one ``criterion N: PASS|FAIL`` line; the lines are printed
in the terminal summary (see conftest.py) and, when run directly with
``python tests/test_acceptance.py``, on standard output.
"""

import functools
import random
import sys
from collections import Counter
from math import comb

import pytest

from dgheart import catalog, linalg
from dgheart.dgmod import (
    ChainMap,
    chain_maps_basis,
    cohomology,
    direct_sum,
    generator_module,
    hom_homotopy_classes,
    identity_map,
    is_dgmod_iso,
    make_module,
    piece_differential,
    reduced_module,
)
from dgheart.fda import end_algebra, fitting, krs_decompose, modules_isomorphic, radical
from dgheart.field import GF, QQ
from dgheart.heart import (
    heart_cokernel,
    heart_image,
    heart_kernel,
    is_injective_heart,
    is_semisimple_heart,
    socle_filtration,
)
from dgheart.koszul import ext_algebra, is_koszul, koszul_module, minimal_resolution, verify_koszul_duality
from dgheart.randgen import random_chain_map, random_conjugate, random_filt_module
from dgheart.triang import cone, filt_normalize, is_minimal, minimize, t_bounds, tau_ge, tau_le, truncation_triangle

RESULTS = {}

F7 = GF(7)
CORPUS_ALGEBRAS = ("D2", "RAD2", "polyXY")


def corpus_algebra(name):
    # generator shifts span four levels, so k[X,Y] needs room for degree-6 products
    if name == "polyXY":
        return catalog.polynomial_ring(F7, 2, degree_cap=6)
    return catalog.algebra(name, F7)


def criterion(number, title):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                RESULTS[number] = f"criterion {number:>2}: FAIL  {title}"
                print(RESULTS[number])
                raise
            RESULTS[number] = f"criterion {number:>2}: PASS  {title}"
            print(RESULTS[number])

        return run

    return wrap


# -- shared corpora -----------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def filt_corpus():
    """(algebra name, X, Y, f, cone) with at most 8 generators in the cone."""
    out = []
    for name in CORPUS_ALGEBRAS:
        A = corpus_algebra(name)
        for seed in range(70):
            rng = random.Random(seed)
            X = random_filt_module(A, seed, rng.randint(1, 4), shifts=(-1, 0, 1))
            Y = random_filt_module(A, 1000 + seed, rng.randint(1, 4), shifts=(-1, 0, 1))
            f = random_chain_map(X, Y, seed)
            out.append((name, X, Y, f, cone(f)))
    return out


@functools.lru_cache(maxsize=None)
def minimized_corpus():
    return [(name, C, minimize(C)) for name, _, _, _, C in filt_corpus()]


@functools.lru_cache(maxsize=None)
def heart_corpus():
    out = []
    for name in CORPUS_ALGEBRAS:
        A = catalog.algebra(name, F7)
        for seed in range(70):
            rng = random.Random(seed)
            X = random_filt_module(A, seed, rng.randint(1, 4))
            Y = random_filt_module(A, 500 + seed, rng.randint(1, 4))
            out.append((name, X, Y, random_chain_map(X, Y, seed)))
    return out


def degree_zero_cycles_by_vertex(M):
    """Z^0(M) per vertex, in generator coordinates (flag modules only)."""
    F = M.field
    piece, nxt, cols = piece_differential(M, 0)
    out = {}
    for x in range(len(M.alg.vertices)):
        idx = [k for k, (j, _) in enumerate(piece) if M.vertex(j) == x]
        sub = [cols[k] for k in idx]
        Z = linalg.nullspace(F, linalg.transpose(sub, len(nxt)), len(idx))
        out[x] = [{piece[idx[k]][0]: c for k, c in z.items()} for z in Z]
    return out


def socle_layers_from_cycles(M):
    """Layer multiplicities by repeatedly dividing out Z^0(-)A."""
    layers = []
    S = M
    while S.n:
        Z = degree_zero_cycles_by_vertex(S)
        vecs = [(x, z) for x in sorted(Z) for z in Z[x]]
        if not vecs:
            raise AssertionError("nonzero flag module without degree-zero cycles")
        layers.append(Counter(M.alg.vertices[x] for x, _ in vecs))
        src = generator_module(M.alg, vecs[0][0])
        for x, _ in vecs[1:]:
            src = direct_sum(src, generator_module(M.alg, x))
        ent = {}
        for k, (x, z) in enumerate(vecs):
            for j, c in z.items():
                ent[j, k] = M.alg.scalar_element(x, c)
        inc = ChainMap(src, S, 0, ent)
        S = heart_cokernel(inc).module
    return layers


def columns(f):
    B = f.bar()
    return [{j: B[j][i] for j in range(len(B)) if B[j][i] != 0} for i in range(f.source.n)]


# -- 1 ----------------------------------------------------------------------------


@criterion(1, "two-step module over k[x]/x^(n+1): cohomology, injectivity, End = k[T]/T^2")
def test_criterion_01_two_step_module():
    for F in (GF(7), QQ):
        for n in (2, 3, 4):
            A = catalog.truncated_polynomial(F, n)
            M = make_module(A, [(0, 0), (0, 0)], {(0, 1): A.basis_element("x")})
            assert M.is_filt and M.is_flag
            dims = {i: cohomology(M, i).dim for i in range(-2, n + 3)}
            assert dims == {i: (1 if i in (0, n) else 0) for i in dims}, (F, n, dims)
            assert cohomology(M, 1).dim == 0 and is_injective_heart(M)
            E = end_algebra(M)
            assert E.n == 2 and E.is_commutative()
            J = radical(E)
            assert len(J) == 1 and E.is_zero(E.mul(J[0], J[0]))
            # explicit isomorphism k[T]/T^2 -> E: 1 -> unit, T -> radical generator
            t = J[0]
            assert linalg.dense_rank(F, [E.one(), t]) == 2
            assert E.mul(E.one(), t) == t == E.mul(t, E.one())


# -- 2 ----------------------------------------------------------------------------


@criterion(2, "Koszul duality for k[X] and k[X,Y], k[X,Y,Z]: exterior algebra, End(K(A)) = E(A)")
def test_criterion_02_koszul_duality():
    kX = catalog.polynomial_ring(F7, 1, degree_cap=4)
    r = minimal_resolution(kX, 4)
    assert r.finite and [r.generator_degrees(i) for i in range(r.length)] == [[0], [1]]
    E = ext_algebra(r)
    assert E.dims == [1, 1]
    eps = E.grading.index(1)
    assert not E.table.get((eps, eps))
    rep = verify_koszul_duality(kX, 4)
    assert rep.verified and rep.end_dims == [1, 1]
    for m in (2, 3):
        A = catalog.polynomial_ring(F7, m, degree_cap=4)
        r = minimal_resolution(A, 4)
        E = ext_algebra(r)
        assert E.dims == [comb(m, i) for i in range(m + 1)]
        ones = [k for k, i in enumerate(E.grading) if i == 1]
        for a in ones:
            assert not E.table.get((a, a))
            for b in ones:
                ab, ba = E.table.get((a, b), {}), E.table.get((b, a), {})
                assert all(ab.get(k, 0) + ba.get(k, 0) == 0 for k in set(ab) | set(ba))
        rep = verify_koszul_duality(A, 4)
        assert rep.verified and rep.end_dims == rep.ext_dims == E.dims
        assert sum(rep.end_dims) == len(chain_maps_basis(rep.module, rep.module)) == 2**m


# -- 3 ----------------------------------------------------------------------------


@criterion(3, "k[x]/x^3 is not Koszul: P_-2 generated in degree 3")
def test_criterion_03_non_koszul():
    A = catalog.truncated_polynomial(F7, 2)
    v = is_koszul(minimal_resolution(A, 2))
    assert v.is_koszul is False and v.offending == (2, [3])


# -- 4 ----------------------------------------------------------------------------


@criterion(4, "minimize(cone f) is minimal, normalizes, round-trips, lambda = dim H(cone-bar)")
def test_criterion_04_minimization():
    corpus = minimized_corpus()
    assert len(corpus) >= 200
    for name, C, tr in corpus:
        assert C.n <= 8
        R = tr.result
        assert is_minimal(R) and all(v.degree >= 1 for v in R.D.values())
        nf = filt_normalize(R)
        assert nf.module.is_filt
        assert nf.to_input.is_chain() and nf.from_input.is_chain()
        assert nf.from_input @ nf.to_input == identity_map(nf.module)
        assert nf.to_input @ nf.from_input == identity_map(R)
        assert tr.forward.is_chain() and tr.backward.is_chain()
        assert tr.forward @ tr.backward == identity_map(R)
        assert identity_map(C) - tr.backward @ tr.forward == tr.homotopy.boundary()
        assert R.n == reduced_module(C).total


# -- 5 ----------------------------------------------------------------------------


@criterion(5, "t-structure: Hom vanishing across (<=0, >=1), split truncations, bounds")
def test_criterion_05_t_structure():
    normals = [filt_normalize(tr.result).module for _, _, tr in minimized_corpus()]
    by_alg = {}
    for (name, _, _), N in zip(minimized_corpus(), normals):
        by_alg.setdefault(name, []).append(N)
    checked = 0
    for name, mods in by_alg.items():
        for k, N in enumerate(mods):
            for n in range(-2, 3):
                tri = truncation_triangle(N, n)
                assert tri.inclusion.is_chain() and tri.projection.is_chain()
                assert tri.retraction @ tri.inclusion == identity_map(tri.le)
                assert tri.projection @ tri.section == identity_map(tri.ge)
                assert (tri.projection @ tri.inclusion).is_zero()
                assert tri.inclusion @ tri.retraction + tri.section @ tri.projection == identity_map(N)
                b = t_bounds(tau_le(N, n))
                assert b is None or b[1] <= n
            X = tau_le(N, 0)
            Y = tau_ge(mods[(k + 1) % len(mods)], 1)
            bx, by = t_bounds(X), t_bounds(Y)
            assert bx is None or bx[1] <= 0
            assert by is None or by[0] >= 1
            if X.n and Y.n:
                checked += 1
                assert hom_homotopy_classes(X, Y).dim == 0
    assert checked >= 50


# -- 6 ----------------------------------------------------------------------------


@criterion(6, "heart: lambda additivity, ker -> M -> coker zero, Hom(L_x, L_y) = delta")
def test_criterion_06_heart_abelian():
    corpus = heart_corpus()
    assert len(corpus) >= 200
    for name, X, Y, f in corpus:
        K, I, Q = heart_kernel(f), heart_image(f), heart_cokernel(f)
        assert X.n == K.module.n + I.module.n
        assert Y.n == I.module.n + Q.module.n
        assert (f @ K.inclusion).is_zero() and (Q.projection @ f).is_zero()
        assert (Q.projection @ f @ K.inclusion).is_zero()
        assert I.inclusion @ I.corestriction == f
    for name in CORPUS_ALGEBRAS + ("SS",):
        A = catalog.algebra(name, F7)
        W = len(A.vertices)
        for x in range(W):
            for y in range(W):
                d = hom_homotopy_classes(generator_module(A, x), generator_module(A, y)).dim
                assert d == (1 if x == y else 0)


# -- 7 ----------------------------------------------------------------------------


@criterion(7, "socle filtration = normal-form layering = iterated Z^0(M)A; K(k[X,Y]) layers")
def test_criterion_07_socle():
    for name, X, _, _ in heart_corpus():
        s = socle_filtration(X)
        nf = filt_normalize(X)
        layers = nf.layers.get(0, [])
        sizes = [S.n for S in s.layers]
        assert [sum(len(L) for L in layers[: k + 1]) for k in range(len(layers))] == sizes
        assert [Counter(X.alg.vertices[nf.module.vertex(g)] for g in L) for L in layers] == s.multiplicities
        cycles = [z for zs in degree_zero_cycles_by_vertex(X).values() for z in zs]
        first = columns(s.inclusions[0])
        F = X.field
        r = linalg.rank(F, first + cycles, X.n)
        assert r == linalg.rank(F, first, X.n) == linalg.rank(F, cycles, X.n)
        assert socle_layers_from_cycles(X) == s.multiplicities
    A = catalog.polynomial_ring(F7, 2)
    res = minimal_resolution(A, 4)
    K = koszul_module(res)
    expected = [Counter(A.vertices[x] for x, _ in res.terms[i]) for i in range(res.length)]
    assert socle_filtration(K).multiplicities == expected == socle_layers_from_cycles(K)


# -- 8 ----------------------------------------------------------------------------


@criterion(8, "Krull-Remak-Schmidt round trip over F_7 across 5 seeds")
def test_criterion_08_krs():
    A = catalog.truncated_polynomial(F7, 2)
    pool = catalog.indecomposables(A)
    names = sorted(pool)
    for seed in range(5):
        rng = random.Random(seed)
        chosen = [rng.choice(names) for _ in range(rng.randint(2, 4))]
        X = catalog.direct_sum_of([pool[c] for c in chosen])
        Z, iso, inv = random_conjugate(X, seed)
        assert iso.is_chain() and is_dgmod_iso(iso)
        d = krs_decompose(Z, seed)
        assert d.verify(Z) and d.certificates == ["local"] * len(d.summands)
        left = [pool[c] for c in chosen]
        assert len(d.summands) == len(left)
        for S in d.summands:
            hit = next(k for k, T in enumerate(left) if modules_isomorphic(S, T, seed))
            del left[hit]
        assert not left


# -- 9 ----------------------------------------------------------------------------


def _check_fitting(M, f):
    r = fitting(M, f)
    K, I = r.kernel_part, r.image_part
    assert 1 <= r.n <= max(M.n, 1)
    assert K.projection @ K.inclusion == identity_map(K.module)
    assert I.projection @ I.inclusion == identity_map(I.module)
    assert (K.projection @ I.inclusion).is_zero() and (I.projection @ K.inclusion).is_zero()
    assert K.inclusion @ K.projection + I.inclusion @ I.projection == identity_map(M)
    e = r.idempotent
    assert e @ e == e and (e @ (identity_map(M) - e)).is_zero()
    assert I.inclusion @ I.projection == e
    fn = identity_map(M)
    for _ in range(r.n):
        fn = f @ fn
    assert (fn @ K.inclusion).is_zero()
    if I.module.n:
        assert is_dgmod_iso(I.projection @ f @ I.inclusion)
    return r


@criterion(9, "Fitting: M = K + I with orthogonal idempotents, nilpotent/invertible cases, n <= lambda")
def test_criterion_09_fitting():
    count = 0
    for name in CORPUS_ALGEBRAS:
        A = catalog.algebra(name, F7)
        for seed in range(14):
            M = random_filt_module(A, seed, random.Random(seed).randint(1, 4), shifts=(0, 1))
            f = random_chain_map(M, M, seed)
            r = _check_fitting(M, f)
            count += 1
            one = identity_map(M)
            nil = f @ (one - r.idempotent)
            rn = _check_fitting(M, nil)
            assert rn.image_part.module.n == 0
            power = identity_map(M)
            for _ in range(M.n):
                power = nil @ power
            assert power.is_zero()
            inv = f @ r.idempotent + (one - r.idempotent)
            assert is_dgmod_iso(inv)
            ri = _check_fitting(M, inv)
            assert ri.kernel_part.module.n == 0 and ri.n == 1
            count += 2
    assert count >= 100


# -- 10 ---------------------------------------------------------------------------


def _random_ss_complex(A, seed):
    rng = random.Random(seed)
    X = random_filt_module(A, seed, rng.randint(1, 4), shifts=(-1, 0, 1))
    Y = random_filt_module(A, seed + 50, rng.randint(1, 4), shifts=(-1, 0, 1))
    C = cone(random_chain_map(X, Y, seed))
    Z = random_filt_module(A, seed + 99, rng.randint(1, 3), shifts=(-1, 0, 1, 2))
    return cone(random_chain_map(Z, C, seed + 1))


@criterion(10, "semisimple degeneration over k x k: minimal complexes have zero differential")
def test_criterion_10_semisimple():
    A = catalog.semisimple(F7)
    for seed in range(40):
        M = _random_ss_complex(A, seed)
        R = minimize(M).result
        assert not R.D
        lo = min(-l for l, _ in M.gens) - 1
        hi = max(-l for l, _ in M.gens) + 1
        total = sum(cohomology(M, i).dim for i in range(lo, hi + 1))
        assert R.n == total
        H = random_filt_module(A, seed, random.Random(seed).randint(1, 5))
        assert is_injective_heart(H) and is_semisimple_heart(H)
        d = krs_decompose(H, seed)
        assert all(S.n == 1 for S in d.summands) and len(d.summands) == H.n


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
