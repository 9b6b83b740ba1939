"""Seeded random modules, maps and changes of basis for property tests."""

from __future__ import annotations

import random

from . import linalg
from .algebra import AlgebraElement
from .dgmod import (
    ChainMap,
    chain_maps_basis,
    conjugate,
    generator_module,
    make_module,
)


def _rng(seed_or_rng):
    if isinstance(seed_or_rng, random.Random):
        return seed_or_rng
    return random.Random(seed_or_rng)


def random_combination(F, rng, maps, density=0.7):
    if not maps:
        return None
    total = None
    for f in maps:
        if rng.random() > density:
            continue
        c = F.random(rng, nonzero=True)
        term = f.scale(c)
        total = term if total is None else total + term
    if total is None:
        total = maps[0].scale(0)
    return total


def random_filt_module(alg, seed, n_gens, shifts=(0,), vertices=None, density=0.7):
    """Random DgFiltModule built one generator at a time.

    Each new column is a random solution of the square-zero condition, which
    is the chain condition for a degree-1 map from the new generator into the
    module built so far.
    """
    rng = _rng(seed)
    F = alg.field
    verts = list(range(len(alg.vertices))) if vertices is None else [
        alg.vindex[v] if isinstance(v, str) else v for v in vertices
    ]
    gens = sorted(((rng.choice(list(shifts)), rng.choice(verts)) for _ in range(n_gens)), key=lambda g: -g[0])
    M = make_module(alg, [], {})
    for l, x in gens:
        G = generator_module(alg, x, l)
        col = random_combination(F, rng, chain_maps_basis(G, M, 1), density)
        D = dict(M.D)
        if col is not None:
            for (j, _), v in col.entries.items():
                D[j, M.n] = v
        M = make_module(alg, list(M.gens) + [(l, x)], D)
    return M


def random_chain_map(M, N, seed, degree=0, density=0.7):
    rng = _rng(seed)
    basis = chain_maps_basis(M, N, degree)
    f = random_combination(M.field, rng, basis, density)
    return f if f is not None else ChainMap(M, N, degree, {}, check=False)


def random_invertible_scalar(F, rng, n):
    while True:
        A = [[F.random(rng) for _ in range(n)] for _ in range(n)]
        if linalg.inverse(F, A) is not None:
            return A


def random_automorphism_matrix(M, seed, positive=True):
    """Random degree-0 change of generators: invertible scalar blocks plus higher terms."""
    rng = _rng(seed)
    alg = M.alg
    F = alg.field
    P = {}
    blocks: dict = {}
    for i, g in enumerate(M.gens):
        blocks.setdefault(g, []).append(i)
    for (l, x), idx in blocks.items():
        B = random_invertible_scalar(F, rng, len(idx))
        for a, j in enumerate(idx):
            for b, i in enumerate(idx):
                if B[a][b] != 0:
                    P[j, i] = alg.scalar_element(x, B[a][b])
    if positive:
        for j in range(M.n):
            for i in range(M.n):
                d = M.shift(j) - M.shift(i)
                if d <= 0 or not alg.in_window(d) or d > alg.degree_cap:
                    continue
                comp = alg.component(M.vertex(j), M.vertex(i), d)
                if not comp or rng.random() < 0.5:
                    continue
                coeffs = {b: F.random(rng) for b in comp}
                v = AlgebraElement(alg, d, M.vertex(j), M.vertex(i), coeffs)
                if v:
                    P[j, i] = v
    return P


def random_conjugate(M, seed, positive=True):
    """``(M', iso: M' -> M, inverse)`` for a random change of generators."""
    return conjugate(M, random_automorphism_matrix(M, seed, positive))

