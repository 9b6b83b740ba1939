import pytest
from hypothesis import given, strategies as st

from dgheart import catalog
from dgheart.dgmod import (
    ChainMap,
    direct_sum,
    free_module,
    generator_module,
    identity_map,
    is_dgmod_iso,
    shift_module,
    zero_map,
)
from dgheart.errors import NotIdempotent, UnsupportedField
from dgheart.fda import (
    end_algebra,
    fitting,
    in_span,
    is_local,
    krs_decompose,
    lift_idempotent,
    matrix_algebra,
    modules_isomorphic,
    primitive_idempotents,
    product_algebra,
    radical,
    split_idempotent,
    truncated_polynomial_algebra,
    upper_triangular_algebra,
)
from dgheart.field import GF, QQ
from dgheart.randgen import random_conjugate, random_filt_module
from dgheart.triang import cone


def check_system(E, idems):
    total = E.zero()
    for i, a in enumerate(idems):
        for j, b in enumerate(idems):
            assert E.mul(a, b) == (a if i == j else E.zero())
        total = E.add(total, a)
    assert total == E.one()


@pytest.mark.parametrize("F", [GF(7), QQ])
def test_small_algebras_obey_laws(F):
    for E in (matrix_algebra(F, 2), upper_triangular_algebra(F, 3), truncated_polynomial_algebra(F, 3), product_algebra(F, 3)):
        E.check_laws()


def test_radicals(F7):
    T = truncated_polynomial_algebra(F7, 2)
    R = radical(T)
    assert len(R) == 1 and R[0][0] == 0 and R[0][1] != 0
    assert radical(product_algebra(F7, 3)) == []
    U = upper_triangular_algebra(F7, 2)  # basis E00, E01, E11
    R = radical(U)
    assert len(R) == 1 and R[0][0] == 0 and R[0][2] == 0 and R[0][1] != 0


def test_radical_over_rationals():
    assert len(radical(upper_triangular_algebra(QQ, 3))) == 3


def test_idempotents_of_split_algebras(F7):
    P = product_algebra(F7, 2)
    assert {tuple(int(c) for c in e) for e in primitive_idempotents(P)} == {(0, 1), (1, 0)}
    assert primitive_idempotents(truncated_polynomial_algebra(F7, 2)) == [[1, 0]]
    for n in (2, 3):
        M = matrix_algebra(F7, n)
        idems = primitive_idempotents(M, seed=n)
        assert len(idems) == n
        check_system(M, idems)
        for e in idems:  # rank one: e M e is one-dimensional
            assert len(M.span_products(M.span_products([e], [M.basis_vector(i) for i in range(M.n)]), [e])) == 1


def test_rational_splitting_is_refused():
    with pytest.raises(UnsupportedField):
        primitive_idempotents(product_algebra(QQ, 2))
    assert primitive_idempotents(truncated_polynomial_algebra(QQ, 3)) == [[1, 0, 0]]


def test_lifting_modulo_radical(F7):
    U = upper_triangular_algebra(F7, 2)
    a = [F7(1), F7(3), F7(0)]  # E00 + 3 E01 is already idempotent
    e = lift_idempotent(U, a)
    assert U.mul(e, e) == e


def test_end_of_two_step_module(D2, D2Q):
    for A in (D2, D2Q):
        E = end_algebra(catalog.two_step_module(A))
        assert E.n == 2 and E.is_commutative()
        J = radical(E)
        assert len(J) == 1 and E.mul(J[0], J[0]) == E.zero()
        assert is_local(E)
    assert end_algebra(generator_module(D2, 0)).n == 1


@pytest.mark.parametrize("name", ["D2", "RAD2", "SS", "polyXY"])
def test_end_of_free_module_is_degree_zero_part(name):
    A = catalog.algebra(name)
    E = end_algebra(free_module(A))
    assert E.n == len(A.vertices) and radical(E) == []
    assert len(primitive_idempotents(E)) == len(A.vertices)


def test_fitting_examples(D2, SS):
    M = catalog.two_step_module(D2)
    f = ChainMap(M, M, 0, {(0, 1): D2.idempotent(0)})
    assert (f @ f).is_zero()
    r = fitting(M, f)
    assert r.n == 2 and r.kernel_part.module.n == 2 and r.image_part.module.n == 0
    r = fitting(M, identity_map(M))
    assert r.n == 1 and r.kernel_part.module.n == 0 and r.image_part.module.n == 2
    S = direct_sum(generator_module(SS, 0), generator_module(SS, 0))
    e = ChainMap(S, S, 0, {(0, 0): SS.idempotent(0)})
    r = fitting(S, e)
    assert r.n == 1 and r.kernel_part.module.n == 1 and r.image_part.module.n == 1
    s1, s2 = split_idempotent(S, e)
    assert (s1.module.n, s2.module.n) == (r.image_part.module.n, r.kernel_part.module.n)


def test_split_idempotent_edge_cases(D2):
    M = catalog.two_step_module(D2)
    s1, s2 = split_idempotent(M, zero_map(M, M))
    assert s1.module.n == 0 and s2.module.n == 2
    with pytest.raises(NotIdempotent):
        split_idempotent(M, identity_map(M).scale(2))


def test_split_recovers_conjugated_summands(D2):
    X, Y = catalog.two_step_module(D2), catalog.long_extension(D2)
    S = direct_sum(X, Y)
    for seed in range(3):
        Z, _, _ = random_conjugate(S, seed)
        d = krs_decompose(Z, seed)
        assert d.verify(Z) and len(d.summands) == 2
        for P, Q in ((0, 1), (1, 0)):
            if modules_isomorphic(d.summands[P], X) and modules_isomorphic(d.summands[Q], Y):
                break
        else:
            pytest.fail("summands do not match the construction")


def test_decomposition_examples(D2, SS):
    M = catalog.two_step_module(D2)
    d = krs_decompose(M)
    assert len(d.summands) == 1 and d.certificates == ["local"]
    MM = direct_sum(M, M)
    d = krs_decompose(MM, 1)
    assert len(d.summands) == 2 and all(modules_isomorphic(S, M) for S in d.summands)
    d = krs_decompose(direct_sum(generator_module(SS, 0), generator_module(SS, 1)))
    assert sorted(S.gens[0][1] for S in d.summands) == [0, 1]


def test_isomorphism_examples(D2):
    M = catalog.two_step_module(D2)
    Z, _, _ = random_conjugate(M, 5)
    assert modules_isomorphic(M, Z)
    L = generator_module(D2, 0)
    assert not modules_isomorphic(L, shift_module(L, 1))
    f = ChainMap(shift_module(L, -1), L, 0, {(0, 0): D2.basis_element("x")})
    assert modules_isomorphic(cone(f), M)
    assert not modules_isomorphic(M, direct_sum(L, L))


@given(st.integers(0, 10_000), st.sampled_from(["D2", "RAD2"]))
def test_locality_of_indecomposable_summands(seed, name):
    A = catalog.algebra(name)
    M = random_filt_module(A, seed, 4, shifts=(0, 1))
    d = krs_decompose(M, seed)
    assert d.verify(M)
    for S in d.summands:
        E = end_algebra(S)
        assert is_local(E)
        for i in range(E.n):
            b = E.basis_vector(i)
            nilpotent = E.is_zero(E.power(b, E.n))
            assert nilpotent or is_dgmod_iso(E.to_map(b))


@given(st.integers(0, 10_000))
def test_fitting_with_idempotent_matches_split(seed):
    A = catalog.algebra("D2")
    M = random_filt_module(A, seed, 4, shifts=(0, 1))
    E = end_algebra(M)
    for u in primitive_idempotents(E, seed):
        e = E.to_map(u)
        r = fitting(M, e, E)
        s1, s2 = split_idempotent(M, e)
        assert r.n == 1
        assert modules_isomorphic(r.image_part.module, s1.module)
        assert modules_isomorphic(r.kernel_part.module, s2.module)


def test_span_membership(F7):
    assert in_span(F7, [[F7(1), F7(2)]], [F7(2), F7(4)], 2)
    assert not in_span(F7, [], [F7(1), F7(0)], 2)
