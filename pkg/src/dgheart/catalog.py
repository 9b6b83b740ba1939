"""Named algebras and modules used by the tests, the CLI and the benchmark."""

from __future__ import annotations

from .algebra import build_quotient_algebra
from .dgmod import direct_sum, generator_module, make_module, shift_module
from .field import GF, QQ, Field


def truncated_polynomial(F: Field, n: int):
    """``k[x]/x^{n+1}`` with ``deg x = 1`` (one vertex ``v``)."""
    return build_quotient_algebra(F, ["v"], [("x", 1, "v", "v")], [f"x^{n + 1}"], degree_cap=n + 1)


def polynomial_ring(F: Field, m: int, degree_cap=4):
    """``k[X_1..X_m]`` in degree 1, stored up to ``degree_cap``."""
    names = ["X", "Y", "Z", "W"][:m] if m <= 4 else [f"X{i}" for i in range(m)]
    arrows = [(a, 1, "v", "v") for a in names]
    rels = [f"{a}*{b}-{b}*{a}" for i, a in enumerate(names) for b in names[i + 1:]]
    return build_quotient_algebra(F, ["v"], arrows, rels, degree_cap=degree_cap)


def semisimple(F: Field, vertices=("a", "b")):
    """``k x k``: only idempotents, nothing in positive degree."""
    return build_quotient_algebra(F, list(vertices), [], [], degree_cap=1)


def single_arrow(F: Field):
    """Two vertices joined by one arrow ``al: x -> y`` of degree 1 (radical square zero)."""
    return build_quotient_algebra(F, ["x", "y"], [("al", 1, "x", "y")], [], degree_cap=3)


def two_cycle(F: Field):
    """Arrows ``a: x -> y`` and ``b: y -> x`` with both composites zero."""
    return build_quotient_algebra(
        F, ["x", "y"], [("a", 1, "x", "y"), ("b", 1, "y", "x")], ["a*b", "b*a"], degree_cap=3
    )


def free_dg_algebra(F: Field = QQ, degree_cap=5):
    """Free algebra on ``x`` (degree 1) and ``y`` (degree 2) with ``d x = y``."""
    return build_quotient_algebra(
        F, ["v"], [("x", 1, "v", "v"), ("y", 2, "v", "v")], [], degree_cap=degree_cap, derivation={"x": "y"}
    )


def two_step_module(alg, arrow="x", vertex=0):
    """``A^2`` with ``d = [[0, a], [0, 0]]`` for a loop arrow ``a`` of degree 1."""
    a = alg.basis_element(arrow)
    return make_module(alg, [(0, vertex), (0, vertex)], {(0, 1): a})


def standard(alg, x=0, shift=0):
    return generator_module(alg, x, shift)


def long_extension(alg, element="x^2", vertex=0):
    """``{1}A (+) A`` glued by an element of degree 2."""
    a = alg.basis_element(element)
    return make_module(alg, [(1, vertex), (0, vertex)], {(0, 1): a})


def indecomposables(alg):
    """Indecomposable Filt modules over ``k[x]/x^3`` used for decomposition round trips."""
    return {
        "L": standard(alg),
        "L{1}": shift_module(standard(alg), 1),
        "M": two_step_module(alg),
        "N": long_extension(alg),
    }


def direct_sum_of(modules):
    out = modules[0]
    for m in modules[1:]:
        out = direct_sum(out, m)
    return out


ALGEBRAS = {
    "D2": lambda F: truncated_polynomial(F, 2),
    "D3": lambda F: truncated_polynomial(F, 3),
    "D4": lambda F: truncated_polynomial(F, 4),
    "polyX": lambda F: polynomial_ring(F, 1),
    "polyXY": lambda F: polynomial_ring(F, 2),
    "polyXYZ": lambda F: polynomial_ring(F, 3),
    "SS": semisimple,
    "RAD2": single_arrow,
    "LOOP": two_cycle,
}


def algebra(name: str, F: Field = GF(7)):
    return ALGEBRAS[name](F)
