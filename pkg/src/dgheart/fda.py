"""Finite-dimensional algebras by structure constants, and decompositions of modules.

Elements of a :class:`FiniteDimAlgebra` are dense coordinate lists.  The
Jacobson radical is the kernel of the trace form, checked to be nilpotent.
Over F_p, primitive idempotents of the semisimple quotient are found with
the Frobenius map ``x -> x^p``: on a commutative algebra it is linear and its
fixed points are spanned by the primitive idempotents.  They are then lifted
through the radical with ``a -> 3a^2 - 2a^3``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import linalg
from .dgmod import (
    ChainMap,
    ChainMapSpace,
    identity_map,
    is_dgmod_iso,
    make_module,
    mat_add,
    mat_mul,
    solve_factor,
    _sign,
)
from .errors import (
    NotIdempotent,
    UnsupportedCharacteristic,
    UnsupportedField,
    VerificationFailed,
)


class FiniteDimAlgebra:
    """Associative unital algebra with basis ``labels`` and table ``(i, j) -> {k: c}``."""

    def __init__(self, field, labels, table, unit):
        self.field = field
        self.labels = list(labels)
        self.n = len(self.labels)
        self.table = {k: {a: b for a, b in v.items() if b != 0} for k, v in table.items()}
        self.unit = [field(c) for c in unit]
        self._radical = None

    # -- arithmetic on coordinate lists --

    def zero(self):
        return [self.field.zero] * self.n

    def one(self):
        return list(self.unit)

    def basis_vector(self, i):
        v = self.zero()
        v[i] = self.field.one
        return v

    def add(self, u, v):
        return [a + b for a, b in zip(u, v)]

    def sub(self, u, v):
        return [a - b for a, b in zip(u, v)]

    def scale(self, u, c):
        return [c * a for a in u]

    @staticmethod
    def is_zero(u):
        return all(a == 0 for a in u)

    def mul(self, u, v):
        out = self.zero()
        nzv = [(j, b) for j, b in enumerate(v) if b != 0]
        for i, a in enumerate(u):
            if a == 0:
                continue
            for j, b in nzv:
                t = self.table.get((i, j))
                if not t:
                    continue
                ab = a * b
                for k, c in t.items():
                    out[k] = out[k] + ab * c
        return out

    def power(self, u, k):
        if k == 0:
            return self.one()
        result = None
        base = list(u)
        while k:
            if k & 1:
                result = base if result is None else self.mul(result, base)
            k >>= 1
            if k:
                base = self.mul(base, base)
        return result

    def evaluate(self, poly, u):
        """``poly(u)`` for a coefficient list (lowest degree first)."""
        out = self.zero()
        for c in reversed(poly):
            out = self.add(self.mul(out, u), self.scale(self.one(), c))
        return out

    def left_matrix(self, u):
        cols = [self.mul(u, self.basis_vector(j)) for j in range(self.n)]
        return [[cols[j][i] for j in range(self.n)] for i in range(self.n)]

    def is_commutative(self):
        return all(
            self.table.get((i, j), {}) == self.table.get((j, i), {})
            for i in range(self.n)
            for j in range(i + 1, self.n)
        )

    def check_laws(self):
        """Exhaustive associativity and unit check on the basis."""
        e = [self.basis_vector(i) for i in range(self.n)]
        for a in e:
            if self.mul(self.unit, a) != a or self.mul(a, self.unit) != a:
                return False
            for b in e:
                ab = self.mul(a, b)
                for c in e:
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)):
                        return False
        return True

    def minimal_polynomial(self, u):
        """Monic minimal polynomial of ``u`` as a coefficient list."""
        F = self.field
        powers = [self.one()]
        while True:
            nxt = self.mul(powers[-1], u) if len(powers) > 1 else list(u)
            basis = [{k: x for k, x in enumerate(p) if x != 0} for p in powers]
            c = linalg.coordinates(F, basis, {k: x for k, x in enumerate(nxt) if x != 0}, self.n)
            if c is not None:
                return [-x for x in c] + [F.one]
            powers.append(nxt)

    def span_products(self, U, V):
        vecs = [self.mul(u, v) for u in U for v in V]
        rows = [{k: x for k, x in enumerate(w) if x != 0} for w in vecs]
        return [_dense(r, self.n, self.field) for r in linalg.span_basis(self.field, rows, self.n)]

    def __repr__(self):
        return f"FiniteDimAlgebra({self.field}, dim={self.n})"


def _dense(d, n, F):
    out = [F.zero] * n
    for k, x in d.items():
        out[k] = x
    return out


def _sparse(v):
    return {k: x for k, x in enumerate(v) if x != 0}


# -- small algebras used as fixtures and examples ---------------------------


def matrix_algebra(F, n):
    labels = [f"E{i}{j}" for i in range(n) for j in range(n)]
    idx = {(i, j): i * n + j for i in range(n) for j in range(n)}
    table = {}
    for (i, j), a in idx.items():
        for (k, l), b in idx.items():
            if j == k:
                table[a, b] = {idx[i, l]: F.one}
    unit = [F.one if i == j else F.zero for i in range(n) for j in range(n)]
    return FiniteDimAlgebra(F, labels, table, unit)


def upper_triangular_algebra(F, n):
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    idx = {p: k for k, p in enumerate(pairs)}
    table = {}
    for (i, j), a in idx.items():
        for (k, l), b in idx.items():
            if j == k:
                table[a, b] = {idx[i, l]: F.one}
    unit = [F.one if i == j else F.zero for (i, j) in pairs]
    return FiniteDimAlgebra(F, [f"E{i}{j}" for i, j in pairs], table, unit)


def truncated_polynomial_algebra(F, m):
    """``k[T]/T^m``."""
    table = {(i, j): {i + j: F.one} for i in range(m) for j in range(m) if i + j < m}
    return FiniteDimAlgebra(F, [f"T^{i}" for i in range(m)], table, [F.one] + [F.zero] * (m - 1))


def product_algebra(F, m):
    """``k^m`` with orthogonal idempotent basis."""
    table = {(i, i): {i: F.one} for i in range(m)}
    return FiniteDimAlgebra(F, [f"e{i}" for i in range(m)], table, [F.one] * m)


# -- radical ------------------------------------------------------------------


def radical(E: FiniteDimAlgebra):
    """Basis (dense vectors) of the Jacobson radical."""
    if E._radical is not None:
        return E._radical
    F = E.field
    n = E.n
    traces = [sum((E.table.get((k, j), {}).get(j, F.zero) for j in range(n)), F.zero) for k in range(n)]
    rows = []
    for a in range(n):
        row = {}
        for b in range(n):
            s = sum((c * traces[k] for k, c in E.table.get((a, b), {}).items()), F.zero)
            if s != 0:
                row[b] = s
        rows.append(row)
    R = [_dense(v, n, F) for v in linalg.nullspace(F, rows, n)]
    if not _is_nilpotent_ideal(E, R):
        if F.characteristic and F.characteristic <= n:
            raise UnsupportedCharacteristic(
                f"trace form radical is unreliable in characteristic {F.characteristic} "
                f"for an algebra of dimension {n}"
            )
        raise VerificationFailed("trace form radical is not a nilpotent ideal")
    E._radical = R
    return R


def _is_nilpotent_ideal(E, R):
    if not R:
        return True
    basis = [E.basis_vector(i) for i in range(E.n)]
    F = E.field
    span = linalg.span_basis(F, [_sparse(r) for r in R], E.n)
    rank = len(span)
    for side in (E.span_products(R, basis), E.span_products(basis, R)):
        if linalg.rank(F, span + [_sparse(v) for v in side], E.n) != rank:
            return False
    P = R
    for _ in range(E.n + 1):
        P = E.span_products(P, R)
        if not P:
            return True
    return False


def in_span(F, vectors, v, n):
    if not vectors:
        return all(x == 0 for x in v)
    return linalg.coordinates(F, [_sparse(w) for w in vectors], _sparse(v), n) is not None


# -- primitive idempotents ----------------------------------------------------


def _quotient_by_radical(E, J):
    F = E.field
    red, piv = linalg.rref(F, [_sparse(r) for r in J], E.n)
    pivset = set(piv)
    comp = [c for c in range(E.n) if c not in pivset]

    def proj(x):
        x = list(x)
        for r, p in zip(red, piv):
            f = x[p]
            if f != 0:
                for k, c in r.items():
                    x[k] = x[k] - f * c
        return [x[c] for c in comp]

    def lift(s):
        out = E.zero()
        for c, v in zip(comp, s):
            out[c] = v
        return out

    table = {}
    for a, ca in enumerate(comp):
        for b, cb in enumerate(comp):
            p = proj(E.mul(E.basis_vector(ca), E.basis_vector(cb)))
            t = {k: x for k, x in enumerate(p) if x != 0}
            if t:
                table[a, b] = t
    S = FiniteDimAlgebra(F, [E.labels[c] for c in comp], table, proj(E.unit))
    return S, proj, lift


def _coords_in(F, basis, v, n):
    return linalg.coordinates(F, [_sparse(b) for b in basis], _sparse(v), n)


def _frobenius_fixed(S, R):
    """Fixed space of ``x -> x^p`` on the commutative subalgebra spanned by ``R``."""
    F = S.field
    p = F.characteristic
    m = len(R)
    cols = []
    for r in R:
        c = _coords_in(F, R, S.power(r, p), S.n)
        if c is None:
            raise VerificationFailed("subalgebra is not closed under the Frobenius map")
        cols.append(c)
    rows = []
    for i in range(m):
        row = {}
        for j in range(m):
            x = cols[j][i] - (F.one if i == j else F.zero)
            if x != 0:
                row[j] = x
        rows.append(row)
    out = []
    for v in linalg.nullspace(F, rows, m):
        z = S.zero()
        for j, c in v.items():
            z = S.add(z, S.scale(R[j], c))
        out.append(z)
    return out


def _idempotent_from_fixed(S, e, Z0, rng):
    """Nontrivial idempotent in the split commutative algebra spanned by ``Z0``."""
    F = S.field
    p = F.characteristic
    for _ in range(200):
        z = S.zero()
        for b in Z0:
            z = S.add(z, S.scale(b, F.random(rng)))
        if p == 2:
            cands = [z]
        else:
            w = S.power(z, (p - 1) // 2)
            w2 = S.mul(w, w)
            half = F.one / F(2)
            cands = [S.scale(S.add(w2, w), half), S.scale(S.sub(w2, w), half), S.sub(e, w2)]
        for f in cands:
            if not S.is_zero(f) and f != e:
                return f
    raise VerificationFailed("no idempotent found in a split commutative algebra")


def _corner_basis(S, e):
    F = S.field
    vecs = []
    for i in range(S.n):
        b = S.basis_vector(i)
        vecs.append(_sparse(S.mul(S.mul(e, b), e)))
    return [_dense(r, S.n, F) for r in linalg.span_basis(F, vecs, S.n)]


def _generated_subalgebra(S, e, a):
    F = S.field
    basis = [e]
    cur = a
    while True:
        if in_span(F, basis, cur, S.n):
            return basis
        basis.append(cur)
        cur = S.mul(cur, a)


def _nontrivial_idempotent(S, e, rng):
    """An idempotent ``f`` with ``0 != f != e`` in ``eSe``, or None if ``e`` is primitive."""
    F = S.field
    C = _corner_basis(S, e)
    if len(C) <= 1:
        return None
    commutative = all(S.mul(a, b) == S.mul(b, a) for a in C for b in C)
    if commutative:
        Z0 = _frobenius_fixed(S, C)
        if len(Z0) <= 1:
            return None
        return _idempotent_from_fixed(S, e, Z0, rng)
    for _ in range(500):
        a = S.zero()
        for b in C:
            a = S.add(a, S.scale(b, F.random(rng)))
        R = _generated_subalgebra(S, e, a)
        Z0 = _frobenius_fixed(S, R)
        if len(Z0) >= 2:
            return _idempotent_from_fixed(S, e, Z0, rng)
    raise VerificationFailed("random search failed to split a non-commutative corner")


def semisimple_idempotents(S, seed=0):
    """Complete orthogonal primitive idempotents of a semisimple algebra over F_p."""
    rng = random.Random(seed)
    out = []
    stack = [S.one()]
    while stack:
        e = stack.pop()
        f = _nontrivial_idempotent(S, e, rng)
        if f is None:
            out.append(e)
        else:
            stack.append(S.sub(e, f))
            stack.append(f)
    return out


def lift_idempotent(E, a, limit=64):
    """Iterate ``a -> 3a^2 - 2a^3`` until idempotent (``a^2 - a`` must be nilpotent)."""
    F = E.field
    for _ in range(limit):
        a2 = E.mul(a, a)
        if a2 == a:
            return a
        a3 = E.mul(a2, a)
        a = E.sub(E.scale(a2, F(3)), E.scale(a3, F(2)))
    raise VerificationFailed("idempotent lifting did not converge")


def primitive_idempotents(E: FiniteDimAlgebra, seed=0):
    """Complete list of orthogonal primitive idempotents summing to 1."""
    F = E.field
    if E.n == 0:
        return []
    J = radical(E)
    if E.n - len(J) == 1:
        return [E.one()]
    if F.characteristic == 0:
        raise UnsupportedField(
            "splitting a semisimple quotient of dimension > 1 over Q needs polynomial factorization"
        )
    S, proj, lift = _quotient_by_radical(E, J)
    sidems = semisimple_idempotents(S, seed)
    lifted = []
    rest = E.one()
    for s in sidems[:-1]:
        a = E.mul(E.mul(rest, lift(s)), rest)
        e = lift_idempotent(E, a)
        lifted.append(e)
        rest = E.sub(rest, e)
    lifted.append(rest)
    _check_idempotent_system(E, lifted)
    return lifted


def _check_idempotent_system(E, idems):
    total = E.zero()
    for i, a in enumerate(idems):
        if E.is_zero(a):
            raise VerificationFailed("zero idempotent in a complete system")
        for j, b in enumerate(idems):
            ab = E.mul(a, b)
            if i == j and ab != a:
                raise VerificationFailed("element is not idempotent")
            if i != j and not E.is_zero(ab):
                raise VerificationFailed("idempotents are not orthogonal")
        total = E.add(total, a)
    if total != E.unit:
        raise VerificationFailed("idempotents do not sum to one")


def is_local(E: FiniteDimAlgebra):
    """True when ``E/J`` is one-dimensional."""
    return E.n - len(radical(E)) == 1


# -- polynomials (coefficient lists, lowest degree first) ---------------------


def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mul(F, a, b):
    if not a or not b:
        return []
    out = [F.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return _trim(out)


def poly_sub(F, a, b):
    n = max(len(a), len(b))
    a = list(a) + [F.zero] * (n - len(a))
    b = list(b) + [F.zero] * (n - len(b))
    return _trim([x - y for x, y in zip(a, b)])


def poly_divmod(F, a, b):
    a, b = _trim(a), _trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [F.zero] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    inv = F.one / b[-1]
    while len(r) >= len(b) and r:
        c = r[-1] * inv
        k = len(r) - len(b)
        q[k] = c
        for i, y in enumerate(b):
            r[k + i] = r[k + i] - c * y
        r = _trim(r)
    return _trim(q), r


def poly_ext_gcd(F, a, b):
    """``(g, s, t)`` with ``s a + t b = g`` monic."""
    r0, r1 = _trim(a), _trim(b)
    s0, s1, t0, t1 = [F.one], [], [], [F.one]
    while r1:
        q, r = poly_divmod(F, r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, poly_sub(F, s0, poly_mul(F, q, s1))
        t0, t1 = t1, poly_sub(F, t0, poly_mul(F, q, t1))
    inv = F.one / r0[-1]
    return [x * inv for x in r0], [x * inv for x in s0], [x * inv for x in t0]


# -- endomorphism algebras of modules -----------------------------------------


class EndAlgebra(FiniteDimAlgebra):
    """``End(M)`` in degree 0 with ``to_map``/``coords`` between vectors and chain maps."""

    def __init__(self, M):
        self.module = M
        self.space = ChainMapSpace(M, M, 0)
        basis = self.space.basis
        F = M.field
        table = {}
        for i, a in enumerate(basis):
            for j, b in enumerate(basis):
                c = self.space.coords(a @ b)
                t = {k: x for k, x in enumerate(c) if x != 0}
                if t:
                    table[i, j] = t
        unit = self.space.coords(identity_map(M)) if basis else []
        super().__init__(F, [f"f{i}" for i in range(len(basis))], table, unit)

    def to_map(self, u) -> ChainMap:
        return self.space.combine(u)

    def coords(self, f: ChainMap):
        return self.space.coords(f)


def end_algebra(M) -> EndAlgebra:
    return EndAlgebra(M)


# -- splitting idempotents ----------------------------------------------------


@dataclass
class Summand:
    module: object
    inclusion: ChainMap  # summand -> M
    projection: ChainMap  # M -> summand


def _image_of(M, Emat: dict) -> Summand:
    """Realize ``im e`` for an idempotent matrix ``Emat`` as a free module."""
    from .triang import filt_normalize

    alg = M.alg
    F = alg.field
    ebar = [[F.zero] * M.n for _ in range(M.n)]
    for (j, i), v in Emat.items():
        if v.degree == 0:
            ebar[j][i] = v.scalar()
    blocks: dict = {}
    for i, g in enumerate(M.gens):
        blocks.setdefault(g, []).append(i)
    new_gens, C = [], {}
    for g, idx in blocks.items():
        cols = [{a: ebar[j][i] for a, j in enumerate(idx) if ebar[j][i] != 0} for i in idx]
        for vec in linalg.span_basis(F, cols, len(idx)):
            r = len(new_gens)
            new_gens.append(g)
            for a, c in vec.items():
                C[idx[a], r] = alg.scalar_element(g[1], c)
    U = mat_mul(Emat, C)
    rhs = mat_mul(M.D, U)
    if alg.has_derivation:
        extra = {}
        for (k, r), v in U.items():
            dv = alg.apply_derivation(v)
            if dv:
                extra[k, r] = dv.scale(F(_sign(M.shift(k))))
        rhs = mat_add(rhs, extra)
    beta = solve_factor(alg, M.gens, new_gens, U, new_gens, rhs, 1)
    P = solve_factor(alg, M.gens, new_gens, U, M.gens, Emat, 0)
    if beta is None or P is None:
        raise VerificationFailed("image of an idempotent is not free on the chosen generators")
    N = make_module(alg, new_gens, beta)
    inc = ChainMap(N, M, 0, U)
    pro = ChainMap(M, N, 0, P)
    if not (inc.is_chain() and pro.is_chain()) or pro @ inc != identity_map(N):
        raise VerificationFailed("summand maps failed their exact check")
    nf = filt_normalize(N)
    return Summand(nf.module, inc @ nf.to_input, nf.from_input @ pro)


def split_idempotent(M, e: ChainMap):
    """``(im e, im(1 - e))`` as Filt modules with inclusions and projections."""
    if e.degree != 0 or e @ e != e:
        raise NotIdempotent("endomorphism is not idempotent")
    one = identity_map(M)
    s1 = _image_of(M, e.entries)
    s2 = _image_of(M, (one - e).entries)
    comparison = ChainMap(
        _sum_module(s1.module, s2.module),
        M,
        0,
        _hcat(s1.inclusion.entries, s2.inclusion.entries, s1.module.n),
    )
    if not is_dgmod_iso(comparison):
        raise VerificationFailed("summands do not reassemble to the module")
    return s1, s2


def _sum_module(A, B):
    from .dgmod import block_sum

    return block_sum(A, B)


def _hcat(X, Y, off):
    out = dict(X)
    out.update({(j, i + off): v for (j, i), v in Y.items()})
    return out


# -- Fitting decomposition ------------------------------------------------------


@dataclass
class FittingResult:
    n: int
    kernel_part: Summand  # K = ker f^n
    image_part: Summand  # I = im f^n
    idempotent: ChainMap  # projector onto I along K


def fitting(M, f: ChainMap, E: EndAlgebra | None = None) -> FittingResult:
    """``M = ker f^n (+) im f^n`` with the stabilization exponent ``n``."""
    E = E or end_algebra(M)
    F = E.field
    u = E.coords(f)
    if E.to_map(u) != f:
        raise VerificationFailed("endomorphism is not a chain map")
    mu = E.minimal_polynomial(u)
    a = 0
    while a < len(mu) and mu[a] == 0:
        a += 1
    g = mu[a:]
    if a == 0:
        eI = E.one()
    elif len(g) == 1:
        eI = E.zero()
    else:
        _, s, _ = poly_ext_gcd(F, [F.zero] * a + [F.one], g)
        eI = E.evaluate(poly_mul(F, s, [F.zero] * a + [F.one]), u)
    n = max(a, 1)
    # certify stabilization of the rank of left multiplication by f^k at k = n
    ranks = []
    fk = E.one()
    for _ in range(n + 2):
        ranks.append(linalg.dense_rank(F, E.left_matrix(fk)) if E.n else 0)
        fk = E.mul(fk, u)
    stab = next(k for k in range(len(ranks) - 1) if ranks[k] == ranks[k + 1])
    if max(stab, 1) != n or E.mul(eI, eI) != eI:
        raise VerificationFailed("Fitting exponent failed its stabilization check")
    e = E.to_map(eI)
    I, K = split_idempotent(M, e)
    return FittingResult(n, K, I, e)


# -- Krull-Remak-Schmidt --------------------------------------------------------


@dataclass
class Decomposition:
    summands: list
    inclusions: list
    projections: list
    certificates: list  # "local" or "local-non-split"

    def verify(self, M):
        total = None
        for i, (a, b) in enumerate(zip(self.inclusions, self.projections)):
            t = a @ b
            total = t if total is None else total + t
            for j, c in enumerate(self.inclusions):
                pc = b @ c
                want = identity_map(self.summands[i]) if i == j else None
                if (want is not None and pc != want) or (want is None and not pc.is_zero()):
                    return False
        if total is None:
            return M.n == 0
        return total == identity_map(M)


def krs_decompose(M, seed=0) -> Decomposition:
    """Decompose a Filt module into summands with local endomorphism rings."""
    E = end_algebra(M)
    idems = primitive_idempotents(E, seed)
    parts = []
    for u in idems:
        s = _image_of(M, E.to_map(u).entries)
        EE = end_algebra(s.module)
        cert = "local" if is_local(EE) else "local-non-split"
        parts.append((s, cert))
    parts.sort(key=lambda p: (p[0].module.n, p[0].module.presentation_key()))
    dec = Decomposition(
        [p[0].module for p in parts],
        [p[0].inclusion for p in parts],
        [p[0].projection for p in parts],
        [p[1] for p in parts],
    )
    if not dec.verify(M):
        raise VerificationFailed("decomposition maps failed their exact check")
    return dec


def _generator_multiset(M):
    return sorted(M.gens)


def _find_iso(M, N, seed, tries=24):
    if _generator_multiset(M) != _generator_multiset(N):
        return None
    if M.n == 0:
        return ChainMap(M, N, 0, {}, check=False)
    space = ChainMapSpace(M, N, 0)
    for f in space.basis:
        if is_dgmod_iso(f):
            return f
    rng = random.Random(seed)
    F = M.field
    for _ in range(tries):
        f = space.combine([F.random(rng) for _ in range(space.dim)])
        if is_dgmod_iso(f):
            return f
    return None


def indecomposables_isomorphic(X, Y):
    """Exact test for modules with local endomorphism rings."""
    if _generator_multiset(X) != _generator_multiset(Y):
        return False
    if X.n == 0:
        return True
    EX = end_algebra(X)
    J = radical(EX)
    HXY = ChainMapSpace(X, Y, 0).basis
    HYX = ChainMapSpace(Y, X, 0).basis
    for f in HXY:
        for g in HYX:
            if not in_span(EX.field, J, EX.coords(g @ f), EX.n):
                return True
    return False


def modules_isomorphic(M, N, seed=0) -> bool:
    if _generator_multiset(M) != _generator_multiset(N):
        return False
    if _find_iso(M, N, seed) is not None:
        return True
    dm, dn = krs_decompose(M, seed), krs_decompose(N, seed)
    if len(dm.summands) != len(dn.summands):
        return False
    left = list(dn.summands)
    for X in dm.summands:
        for k, Y in enumerate(left):
            if indecomposables_isomorphic(X, Y):
                del left[k]
                break
        else:
            return False
    return True
