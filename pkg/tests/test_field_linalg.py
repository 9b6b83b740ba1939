from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dgheart import _rref_py, linalg
from dgheart.field import GF, QQ, Field, Fp


def test_field_parse_and_format():
    assert Field.parse("Q") == QQ
    assert Field.parse("F7") == GF(7)
    with pytest.raises(ValueError):
        Field.parse("F8")
    assert QQ.format("-4/14") == "-2/7"
    assert GF(7).format("-3") == "4"
    with pytest.raises(ZeroDivisionError):
        QQ("1/0")
    with pytest.raises(ZeroDivisionError):
        GF(7)("1/7")


def test_fp_arithmetic():
    a, b = Fp(3, 7), Fp(5, 7)
    assert a + b == 1 and a * b == 1 and a / b == Fp(2, 7)
    assert -a == 4 and a ** 6 == 1 and a ** -1 == b


def _rows(draw_rows, F):
    return [{c: F(v) for c, v in enumerate(r) if v % (F.p or 10**9) != 0} for r in draw_rows]


matrices = st.integers(1, 6).flatmap(
    lambda n: st.lists(st.lists(st.integers(-3, 3), min_size=n, max_size=n), min_size=1, max_size=6)
)


@given(matrices, st.sampled_from([0, 2, 7, 101]))
def test_nullspace_is_annihilated(M, p):
    F = GF(p) if p else QQ
    n = len(M[0])
    rows = _rows(M, F)
    basis = linalg.nullspace(F, rows, n)
    assert len(basis) + linalg.rank(F, rows, n) == n
    for v in basis:
        for r in rows:
            assert sum((r.get(c, 0) * x for c, x in v.items()), F.zero) == 0


@given(matrices, st.sampled_from([0, 7]))
def test_solve_reproduces_rhs(M, p):
    F = GF(p) if p else QQ
    n = len(M[0])
    rows = _rows(M, F)
    x = {c: F(c + 1) for c in range(n)}
    rhs = {i: sum((r.get(c, 0) * v for c, v in x.items()), F.zero) for i, r in enumerate(rows)}
    sol = linalg.solve(F, rows, n, rhs)
    assert sol is not None
    for i, r in enumerate(rows):
        assert sum((r.get(c, 0) * sol.get(c, 0) for c in range(n)), F.zero) == rhs[i]


@given(st.integers(1, 12), st.integers(1, 12), st.integers(0, 2**32 - 1), st.sampled_from([2, 7, 2147483647]))
def test_kernels_agree(m, n, seed, p):
    if linalg.KERNEL != "compiled":
        pytest.skip("compiled kernel not built")
    from dgheart import _rref

    rng = np.random.default_rng(seed)
    M = rng.integers(0, p, size=(m, n), dtype=np.int64)
    A, B = M.copy(), M.copy()
    assert list(_rref.rref_modp(A, p)) == list(_rref_py.rref_modp(B, p))
    assert np.array_equal(A, B)


def test_rational_rref_against_hand_example():
    rows = [{0: Fraction(2), 1: Fraction(4)}, {0: Fraction(1), 1: Fraction(3)}]
    red, piv = linalg.rref(QQ, rows, 2)
    assert piv == [0, 1] and red == [{0: 1}, {1: 1}]


def test_inverse_and_rank():
    F = GF(7)
    A = [[F(1), F(2)], [F(3), F(4)]]
    inv = linalg.inverse(F, A)
    assert linalg.matmul(F, A, inv) == linalg.identity(F, 2)
    assert linalg.inverse(F, [[F(1), F(2)], [F(2), F(4)]]) is None
    assert linalg.dense_rank(F, [[F(1), F(2)], [F(2), F(4)]]) == 1
