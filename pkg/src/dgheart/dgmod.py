"""Perfect dg modules as finite semifree presentations.

A module is a list of generators ``g_i`` with shift ``l_i`` and vertex ``x_i``
(so ``g_i = g_i e_{x_i}`` sits in degree ``-l_i``) and a sparse matrix ``D``
over the algebra with ``d(g_i) = sum_j g_j D[j, i]``.  The differential is
extended by ``d(g b) = d(g) b + (-1)^l g d_A(b)``; it squares to zero iff

    sum_j D[k, j] D[j, i] + (-1)^{l_k} d_A(D[k, i]) = 0   for all k, i.

Maps of degree ``t`` are matrices ``F`` with ``f(g_i) = sum_j h_j F[j, i]`` and
``F[j, i]`` of degree ``m_j - l_i + t``.  The Hom-complex differential is

    (DF)[k, i] = sum_j D_N[k, j] F[j, i] + (-1)^{m_k} d_A(F[k, i])
                 - (-1)^t sum_j F[k, j] D_M[j, i].
"""

from __future__ import annotations

from dataclasses import dataclass

from . import linalg
from .algebra import AlgebraElement, GradedAlgebra
from .errors import CapExceeded, DegreeMismatch, DSquareViolation, VertexMismatch


def _sign(n):
    return -1 if n % 2 else 1


# -- matrices over the algebra ----------------------------------------------
#
# A matrix is a dict {(row, col): AlgebraElement} without zero entries.


def mat_mul(X: dict, Y: dict) -> dict:
    rows_of_Y: dict = {}
    for (j, i), v in Y.items():
        rows_of_Y.setdefault(j, []).append((i, v))
    out: dict = {}
    for (k, j), u in X.items():
        for i, v in rows_of_Y.get(j, ()):
            p = u * v
            if not p:
                continue
            cur = out.get((k, i))
            out[k, i] = p if cur is None else cur + p
    return {k: v for k, v in out.items() if v}


def mat_add(X: dict, Y: dict, c=1) -> dict:
    out = dict(X)
    for k, v in Y.items():
        if c != 1:
            v = v.scale(c)
        cur = out.get(k)
        out[k] = v if cur is None else cur + v
    return {k: v for k, v in out.items() if v}


def mat_scale(X: dict, c) -> dict:
    if c == 0:
        return {}
    return {k: v.scale(c) for k, v in X.items()}


def mat_equal(X: dict, Y: dict) -> bool:
    return not mat_add(X, Y, -1)


# -- modules ------------------------------------------------------------------


class MatrixDgModule:
    """Semifree dg module ``(generators, D)``; construct via :func:`validate_module`."""

    def __init__(self, alg: GradedAlgebra, gens, D: dict):
        self.alg = alg
        self.gens = tuple((int(l), int(x)) for l, x in gens)
        self.D = {k: v for k, v in D.items() if v}
        self._cols = None

    @property
    def n(self):
        return len(self.gens)

    @property
    def field(self):
        return self.alg.field

    def shift(self, i):
        return self.gens[i][0]

    def vertex(self, i):
        return self.gens[i][1]

    def column(self, i):
        if self._cols is None:
            cols: dict = {}
            for (j, c), v in sorted(self.D.items()):
                cols.setdefault(c, []).append((j, v))
            self._cols = cols
        return self._cols.get(i, ())

    @property
    def is_filt(self):
        return isinstance(self, DgFiltModule)

    @property
    def is_flag(self):
        return self.is_filt and all(l == 0 for l, _ in self.gens)

    def generator_labels(self):
        return [(l, self.alg.vertices[x]) for l, x in self.gens]

    def presentation_key(self):
        F = self.field
        ents = tuple(
            (j, i, tuple(sorted((k, F.format(c)) for k, c in v.coeffs.items())))
            for (j, i), v in sorted(self.D.items())
        )
        return (self.gens, ents)

    def __eq__(self, other):
        if not isinstance(other, MatrixDgModule):
            return NotImplemented
        return self.alg is other.alg and self.gens == other.gens and mat_equal(self.D, other.D)

    __hash__ = None

    def __repr__(self):
        kind = "DgFiltModule" if self.is_filt else "MatrixDgModule"
        lines = [f"{kind}(generators={self.generator_labels()})"]
        for (j, i), v in sorted(self.D.items()):
            lines.append(f"  D[{j},{i}] = {v!r}")
        return "\n".join(lines)


class DgFiltModule(MatrixDgModule):
    """Shifts weakly decreasing and ``D`` strictly upper triangular."""


@dataclass
class ModuleSpec:
    """Unvalidated module: generators as ``(shift, vertex name)``, entries as ``{name: coeff}``."""

    alg: GradedAlgebra
    generators: list
    differential: dict  # (row, col) -> {basis name: scalar} or AlgebraElement


def entry_slot(alg, gens_row, gens_col, j, i, t=0):
    """Required (degree, left, right) of a map entry from column generator i to row generator j."""
    (lj, xj), (li, xi) = gens_row[j], gens_col[i]
    return lj - li + t, xj, xi


def _check_entry(alg, v: AlgebraElement, slot, where):
    d, x, y = slot
    if (v.left, v.right) != (x, y):
        raise VertexMismatch(f"entry {where} lies in the wrong vertex component")
    if v.degree != d:
        raise DegreeMismatch(f"entry {where} has degree {v.degree}, expected {d}")


def d_squared(M: MatrixDgModule) -> dict:
    """The matrix of ``d_M o d_M`` on generators."""
    alg = M.alg
    out = mat_mul(M.D, M.D)
    if alg.has_derivation:
        extra = {}
        for (k, i), v in M.D.items():
            dv = alg.apply_derivation(v)
            if dv:
                extra[k, i] = dv.scale(alg.field(_sign(M.shift(k))))
        out = mat_add(out, extra)
    return out


def _is_filt_shape(gens, D):
    if any(gens[k][0] < gens[k + 1][0] for k in range(len(gens) - 1)):
        return False
    return all(j < i for (j, i) in D)


def make_module(alg, gens, D, check=True) -> MatrixDgModule:
    """Internal constructor on vertex indices; classifies Filt shape and checks d^2 = 0."""
    gens = tuple((int(l), int(x)) for l, x in gens)
    D = {k: v for k, v in D.items() if v}
    if check:
        for (j, i), v in D.items():
            if not (0 <= j < len(gens) and 0 <= i < len(gens)):
                raise VertexMismatch(f"entry ({j}, {i}) outside the generator range")
            _check_entry(alg, v, entry_slot(alg, gens, gens, j, i, 1), (j, i))
    cls = DgFiltModule if _is_filt_shape(gens, D) else MatrixDgModule
    M = cls(alg, gens, D)
    if check and d_squared(M):
        raise DSquareViolation("the differential does not square to zero")
    return M


def validate_module(spec: ModuleSpec) -> MatrixDgModule:
    alg = spec.alg
    gens = []
    for l, x in spec.generators:
        if x not in alg.vindex:
            raise VertexMismatch(f"unknown vertex {x!r}")
        gens.append((int(l), alg.vindex[x]))
    D = {}
    for (j, i), terms in spec.differential.items():
        if not (0 <= j < len(gens) and 0 <= i < len(gens)):
            raise VertexMismatch(f"differential entry ({j}, {i}) outside the generator range")
        d, x, y = entry_slot(alg, gens, gens, j, i, 1)
        if isinstance(terms, AlgebraElement):
            v = terms
        else:
            for name in terms:
                if name not in alg.bindex:
                    raise VertexMismatch(f"unknown basis element {name!r}")
            if d < 0:
                if any(alg.field(c) != 0 for c in terms.values()):
                    raise DegreeMismatch(f"entry ({j}, {i}) would need negative degree {d}")
                continue
            v = alg.element(terms, d, x, y) if terms else alg.zero(d, x, y)
        D[j, i] = v
    return make_module(alg, gens, D)


def generator_module(alg, x, shift=0) -> DgFiltModule:
    xi = alg.vindex[x] if isinstance(x, str) else x
    return make_module(alg, [(shift, xi)], {})


def free_module(alg) -> DgFiltModule:
    """The algebra as a right module over itself, one generator per vertex."""
    return make_module(alg, [(0, x) for x in range(len(alg.vertices))], {})


def zero_module(alg) -> DgFiltModule:
    return make_module(alg, [], {})


def shift_module(M, n):
    s = M.field(_sign(n))
    return make_module(M.alg, [(l + n, x) for l, x in M.gens], mat_scale(M.D, s), check=False)


def block_sum(M, N):
    """Concatenate generators and block-diagonal differentials (no reordering)."""
    off = M.n
    D = dict(M.D)
    D.update({(j + off, i + off): v for (j, i), v in N.D.items()})
    return make_module(M.alg, M.gens + N.gens, D, check=False)


def direct_sum(M, N):
    """``M (+) N``; stably re-sorted by shift when both summands are Filt."""
    return direct_sum_with_maps(M, N)[0]


def direct_sum_with_maps(M, N):
    """Returns ``(S, [i_M, i_N], [p_M, p_N])``."""
    S = block_sum(M, N)
    inc = [block_inclusion(M, S, 0), block_inclusion(N, S, M.n)]
    pro = [block_projection(S, M, 0), block_projection(S, N, M.n)]
    if M.is_filt and N.is_filt:
        perm = sorted(range(S.n), key=lambda k: -S.shift(k))
        S2, to_new, to_old = permute_module(S, perm)
        inc = [to_new @ f for f in inc]
        pro = [f @ to_old for f in pro]
        S = S2
    return S, inc, pro


def permute_module(M, perm):
    """Reorder generators: new generator ``k`` is old generator ``perm[k]``.

    Returns ``(M', old_to_new, new_to_old)``.
    """
    inv = {old: new for new, old in enumerate(perm)}
    gens = [M.gens[p] for p in perm]
    D = {(inv[j], inv[i]): v for (j, i), v in M.D.items()}
    N = make_module(M.alg, gens, D, check=False)
    alg = M.alg
    fwd = {(inv[i], i): alg.idempotent(M.vertex(i)) for i in range(M.n)}
    bwd = {(i, inv[i]): alg.idempotent(M.vertex(i)) for i in range(M.n)}
    return N, ChainMap(M, N, 0, fwd, check=False), ChainMap(N, M, 0, bwd, check=False)


def submodule_on(M, idx):
    """Principal submatrix on generator indices ``idx`` (kept in the given order)."""
    pos = {g: k for k, g in enumerate(idx)}
    D = {(pos[j], pos[i]): v for (j, i), v in M.D.items() if j in pos and i in pos}
    return make_module(M.alg, [M.gens[g] for g in idx], D)


# -- maps ---------------------------------------------------------------------


class ChainMap:
    """Homogeneous right-linear map of degree ``degree`` given by its generator matrix."""

    def __init__(self, source, target, degree, entries, check=True):
        self.source = source
        self.target = target
        self.degree = degree
        self.entries = {k: v for k, v in entries.items() if v}
        if check:
            for (j, i), v in self.entries.items():
                if not (0 <= j < target.n and 0 <= i < source.n):
                    raise VertexMismatch(f"map entry ({j}, {i}) outside the generator range")
                _check_entry(source.alg, v, entry_slot(source.alg, target.gens, source.gens, j, i, degree), (j, i))

    @property
    def alg(self):
        return self.source.alg

    def compose(self, other: "ChainMap") -> "ChainMap":
        """``self o other``."""
        if other.target.gens != self.source.gens:
            raise VertexMismatch("composing maps with mismatched middle module")
        return ChainMap(other.source, self.target, self.degree + other.degree, mat_mul(self.entries, other.entries), check=False)

    __matmul__ = compose

    def _same(self, other):
        if (self.source.gens, self.target.gens, self.degree) != (other.source.gens, other.target.gens, other.degree):
            raise DegreeMismatch("maps between different modules or of different degree")

    def __add__(self, other):
        self._same(other)
        return ChainMap(self.source, self.target, self.degree, mat_add(self.entries, other.entries), check=False)

    def __sub__(self, other):
        self._same(other)
        return ChainMap(self.source, self.target, self.degree, mat_add(self.entries, other.entries, -1), check=False)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        c = self.alg.field(c)
        return ChainMap(self.source, self.target, self.degree, mat_scale(self.entries, c), check=False)

    def is_zero(self):
        return not self.entries

    def __eq__(self, other):
        if not isinstance(other, ChainMap):
            return NotImplemented
        return (
            self.degree == other.degree
            and self.source.gens == other.source.gens
            and self.target.gens == other.target.gens
            and mat_equal(self.entries, other.entries)
        )

    __hash__ = None

    def boundary(self) -> "ChainMap":
        """``D(f) = d_N f - (-1)^t f d_M``."""
        return ChainMap(self.source, self.target, self.degree + 1, hom_differential(self.source, self.target, self.degree, self.entries), check=False)

    def is_chain(self):
        return not hom_differential(self.source, self.target, self.degree, self.entries)

    def bar(self):
        """Dense scalar matrix of degree-zero parts (rows: target generators)."""
        F = self.alg.field
        out = [[F.zero] * self.source.n for _ in range(self.target.n)]
        for (j, i), v in self.entries.items():
            if v.degree == 0:
                out[j][i] = v.scalar()
        return out

    def __repr__(self):
        lines = [f"ChainMap(degree={self.degree}, {self.source.n} -> {self.target.n})"]
        for (j, i), v in sorted(self.entries.items()):
            lines.append(f"  F[{j},{i}] = {v!r}")
        return "\n".join(lines)


class Homotopy(ChainMap):
    """A map of degree -1 used as a homotopy witness."""


def identity_map(M) -> ChainMap:
    return ChainMap(M, M, 0, {(i, i): M.alg.idempotent(M.vertex(i)) for i in range(M.n)}, check=False)


def zero_map(M, N, degree=0) -> ChainMap:
    return ChainMap(M, N, degree, {}, check=False)


def block_inclusion(M, S, offset):
    alg = M.alg
    return ChainMap(M, S, 0, {(i + offset, i): alg.idempotent(M.vertex(i)) for i in range(M.n)}, check=False)


def block_projection(S, M, offset):
    alg = M.alg
    return ChainMap(S, M, 0, {(i, i + offset): alg.idempotent(M.vertex(i)) for i in range(M.n)}, check=False)


def scalar_map(M, N, matrix) -> ChainMap:
    """Map whose entries are the scalars ``matrix[j][i]`` times idempotents (needs equal slots)."""
    alg = M.alg
    ent = {}
    for j, row in enumerate(matrix):
        for i, c in enumerate(row):
            if c != 0:
                if N.gens[j] != M.gens[i]:
                    raise DegreeMismatch(f"scalar entry ({j}, {i}) between different generator types")
                ent[j, i] = alg.scalar_element(M.vertex(i), c)
    return ChainMap(M, N, 0, ent, check=False)


def hom_differential(M, N, t, F: dict) -> dict:
    alg = M.alg
    fld = alg.field
    out = mat_mul(N.D, F)
    if alg.has_derivation:
        extra = {}
        for (k, i), v in F.items():
            dv = alg.apply_derivation(v)
            if dv:
                extra[k, i] = dv.scale(fld(_sign(N.shift(k))))
        out = mat_add(out, extra)
    return mat_add(out, mat_mul(F, M.D), -_sign(t))


def solve_factor(alg, row_gens, mid_gens, U: dict, col_gens, R: dict, t=0):
    """A matrix ``X`` with ``U X = R`` (``X[s, r]`` of degree ``m_s - c_r + t``), or None."""
    F = alg.field
    X = {}
    ucols: dict = {}
    for (j, s), v in U.items():
        ucols.setdefault(s, []).append((j, v))
    rcols: dict = {}
    for (j, r), v in R.items():
        rcols.setdefault(r, []).append((j, v))
    for r in range(len(col_gens)):
        unknowns = []
        for s in range(len(mid_gens)):
            d, y, x = entry_slot(alg, mid_gens, col_gens, s, r, t)
            if d < 0 or d > alg.degree_cap:
                continue
            for b in alg.component(y, x, d):
                unknowns.append((s, b, d, y, x))
        index: dict = {}
        cols = []
        for s, b, d, y, x in unknowns:
            u = AlgebraElement(alg, d, y, x, {b: F.one})
            col = {}
            for j, a in ucols.get(s, ()):
                p = a * u
                for k, c in p.coeffs.items():
                    key = index.setdefault((j, k), len(index))
                    col[key] = col.get(key, F.zero) + c
            cols.append({k: c for k, c in col.items() if c != 0})
        rhs = {}
        for j, v in rcols.get(r, ()):
            for k, c in v.coeffs.items():
                rhs[index.setdefault((j, k), len(index))] = c
        if not unknowns:
            if any(c != 0 for c in rhs.values()):
                return None
            continue
        sol = linalg.solve(F, linalg.transpose(cols, len(index)), len(unknowns), rhs)
        if sol is None:
            return None
        ent: dict = {}
        for k, c in sol.items():
            if c != 0:
                s, b, d, y, x = unknowns[k]
                ent.setdefault(s, (d, y, x, {}))[3][b] = c
        for s, (d, y, x, coeffs) in ent.items():
            X[s, r] = AlgebraElement(alg, d, y, x, coeffs)
    return X


def is_chain_map(f: ChainMap) -> bool:
    return f.is_chain()


# -- Hom spaces as coordinate vector spaces -----------------------------------


class HomSpace:
    """Coordinates on the degree-``t`` maps ``M -> N``: one slot per (row, col, basis index)."""

    def __init__(self, M, N, t):
        self.M, self.N, self.t = M, N, t
        alg = M.alg
        self.slots = []
        for j in range(N.n):
            for i in range(M.n):
                d, y, x = entry_slot(alg, N.gens, M.gens, j, i, t)
                if d < 0:
                    continue
                if d > alg.degree_cap:
                    if alg.finite:
                        continue
                    raise CapExceeded(f"Hom component of degree {d} exceeds degree_cap {alg.degree_cap}")
                for b in alg.component(y, x, d):
                    self.slots.append((j, i, b))
        self.index = {s: k for k, s in enumerate(self.slots)}

    @property
    def dim(self):
        return len(self.slots)

    def to_entries(self, vec: dict) -> dict:
        alg = self.M.alg
        ent: dict = {}
        for k, c in vec.items():
            if c == 0:
                continue
            j, i, b = self.slots[k]
            ent.setdefault((j, i), {})[b] = c
        out = {}
        for (j, i), coeffs in ent.items():
            d, y, x = entry_slot(alg, self.N.gens, self.M.gens, j, i, self.t)
            out[j, i] = AlgebraElement(alg, d, y, x, coeffs)
        return out

    def to_map(self, vec: dict) -> ChainMap:
        cls = Homotopy if self.t == -1 else ChainMap
        return cls(self.M, self.N, self.t, self.to_entries(vec), check=False)

    def to_vector(self, entries: dict) -> dict:
        vec = {}
        for (j, i), v in entries.items():
            for b, c in v.coeffs.items():
                k = self.index.get((j, i, b))
                if k is None:
                    raise DegreeMismatch(f"entry ({j}, {i}) outside the Hom space")
                vec[k] = c
        return vec


def differential_matrix(src: HomSpace, dst: HomSpace):
    """Columns of the Hom-complex differential ``src -> dst`` as sparse dicts."""
    M, N, t = src.M, src.N, src.t
    alg = M.alg
    F = alg.field
    cols = []
    n_rows_of_N: dict = {}
    for (k, j), v in N.D.items():
        n_rows_of_N.setdefault(j, []).append((k, v))
    m_rows_of_M: dict = {}
    for (i, p), v in M.D.items():
        m_rows_of_M.setdefault(i, []).append((p, v))
    st = F(-_sign(t))
    for (j, i, b) in src.slots:
        d, y, x = entry_slot(alg, N.gens, M.gens, j, i, t)
        u = AlgebraElement(alg, d, y, x, {b: F.one})
        img: dict = {}

        def add(key, el):
            cur = img.get(key)
            img[key] = el if cur is None else cur + el

        for k, a in n_rows_of_N.get(j, ()):
            p = a * u
            if p:
                add((k, i), p)
        if alg.has_derivation:
            du = alg.apply_derivation(u)
            if du:
                add((j, i), du.scale(F(_sign(N.shift(j)))))
        for p_, a in m_rows_of_M.get(i, ()):
            p = u * a
            if p:
                add((j, p_), p.scale(st))
        cols.append(dst.to_vector({k: v for k, v in img.items() if v}))
    return cols


class ChainMapSpace:
    """The degree-``t`` chain maps ``M -> N`` with a basis and exact coordinates.

    The basis comes from a reduced echelon nullspace, so each basis vector
    is 1 on its own free column and 0 on the others; coordinates of a cycle
    are read off at those columns.
    """

    def __init__(self, M, N, t=0):
        self.space = HomSpace(M, N, t)
        dst = HomSpace(M, N, t + 1)
        rows = linalg.transpose(differential_matrix(self.space, dst), dst.dim)
        self.vectors, self.free = linalg.nullspace_with_free(M.field, rows, self.space.dim)
        self.basis = [self.space.to_map(v) for v in self.vectors]
        self.field = M.field

    @property
    def dim(self):
        return len(self.basis)

    def coords(self, f: ChainMap):
        vec = self.space.to_vector(f.entries)
        return [vec.get(k, self.field.zero) for k in self.free]

    def combine(self, coeffs) -> ChainMap:
        vec = {}
        for c, v in zip(coeffs, self.vectors):
            if c == 0:
                continue
            for k, x in v.items():
                vec[k] = vec.get(k, 0) + c * x
        return self.space.to_map({k: x for k, x in vec.items() if x != 0})


def chain_maps_basis(M, N, t=0):
    """Basis of the degree-``t`` chain maps ``M -> N``."""
    return ChainMapSpace(M, N, t).basis


@dataclass
class HomotopyClasses:
    dim: int
    representatives: list


def hom_homotopy_classes(M, N, t=0) -> HomotopyClasses:
    F = M.field
    Z = chain_maps_basis(M, N, t)
    if not Z:
        return HomotopyClasses(0, [])
    space = HomSpace(M, N, t)
    prev = HomSpace(M, N, t - 1)
    B = differential_matrix(prev, space)
    red, piv = linalg.rref(F, B, space.dim)
    reps = []
    current = list(red)
    r0 = len(piv)
    for z in Z:
        v = space.to_vector(z.entries)
        trial = current + [v]
        r = linalg.rank(F, trial, space.dim)
        if r > r0:
            reps.append(z)
            current = trial
            r0 = r
    return HomotopyClasses(len(reps), reps)


def homotopy_solve(target: ChainMap):
    """A map ``h`` of degree ``t - 1`` with ``D(h) = target``, or None."""
    M, N, t = target.source, target.target, target.degree
    F = M.field
    space = HomSpace(M, N, t)
    prev = HomSpace(M, N, t - 1)
    cols = differential_matrix(prev, space)
    rows = linalg.transpose(cols, space.dim)
    sol = linalg.solve(F, rows, prev.dim, space.to_vector(target.entries))
    if sol is None:
        return None
    return prev.to_map(sol)


def is_homotopic(f: ChainMap, g: ChainMap):
    """``(True, h)`` with ``f - g = D(h)``, or ``(False, None)``."""
    diff = f - g
    if diff.is_zero():
        return True, (Homotopy if f.degree == 0 else ChainMap)(f.source, f.target, f.degree - 1, {}, check=False)
    h = homotopy_solve(diff)
    return (h is not None), h


def is_dgmod_iso(f: ChainMap) -> bool:
    """For Filt source and target: invertibility of the scalar part."""
    if f.degree != 0 or f.source.n != f.target.n:
        return False
    if f.source.n == 0:
        return True
    return linalg.inverse(f.alg.field, f.bar()) is not None


# -- graded pieces and cohomology ----------------------------------------------


def graded_piece(M, n):
    """Basis ``(generator, basis index)`` of the degree-``n`` part of ``M``."""
    alg = M.alg
    out = []
    for j, (l, x) in enumerate(M.gens):
        d = n + l
        if d < 0:
            continue
        if d > alg.degree_cap:
            if alg.finite:
                continue
            raise CapExceeded(f"degree {n} part of the module needs A^{d}")
        for y in range(len(alg.vertices)):
            for b in alg.component(x, y, d):
                out.append((j, b))
    return out


def piece_differential(M, n):
    """Columns of ``d: M^n -> M^{n+1}`` in :func:`graded_piece` coordinates."""
    alg = M.alg
    F = alg.field
    src = graded_piece(M, n)
    dst = graded_piece(M, n + 1)
    index = {s: k for k, s in enumerate(dst)}
    cols = []
    for (j, b) in src:
        u = AlgebraElement(alg, alg.deg[b], alg.lv[b], alg.rv[b], {b: F.one})
        vec: dict = {}
        for k, a in M.column(j):
            for bb, c in (a * u).coeffs.items():
                key = index[k, bb]
                vec[key] = vec.get(key, 0) + c
        if alg.has_derivation:
            du = alg.apply_derivation(u)
            s = _sign(M.shift(j))
            for bb, c in du.coeffs.items():
                key = index[j, bb]
                vec[key] = vec.get(key, 0) + s * c
        cols.append({k: v for k, v in vec.items() if v != 0})
    return src, dst, cols


@dataclass
class Cohomology:
    degree: int
    dim: int
    basis: list  # vectors in graded_piece coordinates
    piece: list


def cohomology(M, i) -> Cohomology:
    F = M.field
    piece, nxt, cols = piece_differential(M, i)
    _, _, prev_cols = piece_differential(M, i - 1)
    Z = linalg.nullspace(F, linalg.transpose(cols, len(nxt)), len(piece))
    red, piv = linalg.rref(F, prev_cols, len(piece))
    basis, current, r0 = [], list(red), len(piv)
    for z in Z:
        trial = current + [z]
        r = linalg.rank(F, trial, len(piece))
        if r > r0:
            basis.append(z)
            current, r0 = trial, r
    return Cohomology(i, len(basis), basis, piece)


def degree_range(M):
    """Degrees where the module can be nonzero inside the stored window."""
    if not M.n:
        return range(0)
    lo = min(-l for l, _ in M.gens)
    hi = max(-l for l, _ in M.gens) + M.alg.degree_cap
    return range(lo, hi + 1)


# -- the reduced complex -------------------------------------------------------


@dataclass
class ReducedModule:
    degrees: dict  # degree -> generator indices
    differential: list  # dense scalar matrix
    cohomology: dict  # degree -> dim H
    cohomology_by_vertex: dict  # (degree, vertex index) -> dim H
    support: list

    @property
    def total(self):
        return sum(self.cohomology.values())


def reduced_differential(M):
    F = M.field
    out = [[F.zero] * M.n for _ in range(M.n)]
    for (j, i), v in M.D.items():
        if v.degree == 0:
            out[j][i] = v.scalar()
    return out


def reduced_module(M) -> ReducedModule:
    F = M.field
    Dbar = reduced_differential(M)
    degrees: dict = {}
    for i, (l, x) in enumerate(M.gens):
        degrees.setdefault(-l, []).append(i)
    coh, cohv = {}, {}
    for x in range(len(M.alg.vertices)):
        for d, idx in degrees.items():
            here = [i for i in idx if M.vertex(i) == x]
            if not here:
                continue
            nxt = [j for j in degrees.get(d + 1, []) if M.vertex(j) == x]
            prv = [j for j in degrees.get(d - 1, []) if M.vertex(j) == x]
            r_out = linalg.dense_rank(F, [[Dbar[j][i] for i in here] for j in nxt]) if nxt else 0
            r_in = linalg.dense_rank(F, [[Dbar[i][j] for j in prv] for i in here]) if prv else 0
            h = len(here) - r_out - r_in
            if h:
                cohv[d, x] = h
                coh[d] = coh.get(d, 0) + h
    return ReducedModule(
        {d: v for d, v in sorted(degrees.items())}, Dbar, dict(sorted(coh.items())), cohv, sorted(coh)
    )


def lam(M) -> int:
    """Generator count, i.e. the length of the reduced module."""
    return M.n


# -- changes of basis ----------------------------------------------------------


def invert_matrix(alg, old_gens, new_gens, P: dict) -> dict:
    """Inverse of a degree-0 change of generators ``P`` (rows: old, columns: new).

    ``P`` must have invertible scalar part.  With ``P = B(1 + N)`` and ``N``
    raising degree, the Neumann series terminates.
    """
    F = alg.field
    n = len(old_gens)
    if len(new_gens) != n:
        raise DegreeMismatch("change of basis between different generator counts")
    bar = [[F.zero] * n for _ in range(n)]
    for (j, i), v in P.items():
        if v.degree == 0:
            bar[j][i] = v.scalar()
    binv = linalg.inverse(F, bar)
    if binv is None:
        raise DegreeMismatch("change of basis is not invertible")
    Binv = {}
    for i in range(n):
        for j in range(n):
            if binv[i][j] != 0:
                if new_gens[i] != old_gens[j]:
                    raise DegreeMismatch("scalar part mixes generators of different type")
                Binv[i, j] = alg.scalar_element(new_gens[i][1], binv[i][j])
    Nmat = mat_mul(Binv, {k: v for k, v in P.items() if v.degree > 0})
    result = dict(Binv)
    term = dict(Binv)
    for _ in range(n + 1):
        term = mat_scale(mat_mul(Nmat, term), F(-1))
        if not term:
            break
        result = mat_add(result, term)
    return result


def conjugate(M, P: dict, new_gens=None):
    """Rewrite ``M`` in the generators ``g'_i = sum_j g_j P[j, i]``.

    ``new_gens`` lists the (shift, vertex) of the ``g'_i`` (default: those of
    ``M``).  Returns ``(M', iso: M' -> M, inverse: M -> M')``.
    """
    alg = M.alg
    F = alg.field
    new_gens = tuple(new_gens) if new_gens is not None else M.gens
    C = mat_mul(M.D, P)
    if alg.has_derivation:
        extra = {}
        for (k, i), v in P.items():
            dv = alg.apply_derivation(v)
            if dv:
                extra[k, i] = dv.scale(F(_sign(M.shift(k))))
        C = mat_add(C, extra)
    Pinv = invert_matrix(alg, M.gens, new_gens, P)
    N = make_module(alg, new_gens, mat_mul(Pinv, C))
    return N, ChainMap(N, M, 0, P), ChainMap(M, N, 0, Pinv)
