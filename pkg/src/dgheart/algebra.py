"""Graded (dg) algebras presented by structure constants.

An algebra is stored degreewise up to ``degree_cap``.  Its degree-zero part is
spanned by orthogonal idempotents ``e_x``, one per vertex, and every basis
element ``b`` lies in a component ``e_x A^d e_y`` (``x = left``, ``y = right``).
When ``finite`` is set the algebra is known to vanish above the cap, so
products leaving the window are zero instead of an error.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product as iproduct

from . import linalg
from .errors import (
    AssocViolation,
    CapExceeded,
    CapInconsistent,
    DegreeMismatch,
    DSquareViolation,
    InconsistentRelation,
    LeibnizViolation,
    P1Violation,
    P2Violation,
    P3Violation,
    VertexMismatch,
)
from .field import Field


@dataclass(frozen=True)
class BasisElement:
    name: str
    degree: int
    left: str
    right: str


@dataclass
class AlgebraSpec:
    """Unvalidated, name-based description of a graded algebra."""

    field: Field
    vertices: list
    degree_cap: int
    basis: list  # of BasisElement
    products: dict  # (name, name) -> {name: scalar}
    derivation: dict | None = None  # name -> {name: scalar}
    finite: bool = False


class AlgebraElement:
    """Homogeneous element of ``e_left A^degree e_right``.

    ``coeffs`` maps basis indices to nonzero scalars.  Instances are treated
    as immutable.
    """

    __slots__ = ("alg", "degree", "left", "right", "coeffs")

    def __init__(self, alg, degree, left, right, coeffs=None):
        self.alg = alg
        self.degree = degree
        self.left = left
        self.right = right
        self.coeffs = {k: v for k, v in (coeffs or {}).items() if v != 0}

    def is_zero(self):
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def _check_slot(self, other):
        if (self.degree, self.left, self.right) != (other.degree, other.left, other.right):
            raise DegreeMismatch(
                f"adding elements of different components {self.slot()} and {other.slot()}"
            )

    def slot(self):
        return (self.degree, self.left, self.right)

    def __add__(self, other):
        if other == 0:
            return self
        self._check_slot(other)
        c = dict(self.coeffs)
        for k, v in other.coeffs.items():
            c[k] = c.get(k, 0) + v
        return AlgebraElement(self.alg, self.degree, self.left, self.right, c)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return AlgebraElement(
            self.alg, self.degree, self.left, self.right, {k: -v for k, v in self.coeffs.items()}
        )

    def scale(self, c):
        if c == 0:
            return AlgebraElement(self.alg, self.degree, self.left, self.right)
        return AlgebraElement(
            self.alg, self.degree, self.left, self.right, {k: c * v for k, v in self.coeffs.items()}
        )

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return self.alg.multiply(self, other)
        return NotImplemented

    def __rmul__(self, c):
        return self.scale(c)

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.coeffs
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.slot() == other.slot() and self.coeffs == other.coeffs

    __hash__ = None

    def scalar(self):
        """Coefficient of the idempotent of a degree-zero element."""
        if self.degree != 0:
            return self.alg.field.zero
        return self.coeffs.get(self.alg.idempotent_index[self.left], self.alg.field.zero)

    def vector(self):
        """Coordinates relative to the component basis, as ``{position: scalar}``."""
        comp = self.alg.component(self.left, self.right, self.degree)
        pos = {b: i for i, b in enumerate(comp)}
        return {pos[k]: v for k, v in self.coeffs.items()}

    def __repr__(self):
        if not self.coeffs:
            return "0"
        F = self.alg.field
        parts = []
        for k in sorted(self.coeffs):
            v = self.coeffs[k]
            name = self.alg.basis[k].name
            parts.append(name if v == 1 else f"{F.format(v)}*{name}")
        return " + ".join(parts)


class GradedAlgebra:
    """A validated graded algebra; build with :func:`validate_algebra`."""

    def __init__(self, spec: AlgebraSpec):
        self.field = spec.field
        self.vertices = tuple(spec.vertices)
        self.vindex = {v: i for i, v in enumerate(self.vertices)}
        self.degree_cap = spec.degree_cap
        self.finite = bool(spec.finite)
        self.basis = tuple(spec.basis)
        self.bindex = {b.name: i for i, b in enumerate(self.basis)}
        self.deg = [b.degree for b in self.basis]
        self.lv = [self.vindex.get(b.left, -1) for b in self.basis]
        self.rv = [self.vindex.get(b.right, -1) for b in self.basis]
        F = self.field
        self.products = {}
        for (a, b), terms in spec.products.items():
            ia, ib = self.bindex.get(a), self.bindex.get(b)
            if ia is None or ib is None:
                raise CapInconsistent(f"product entry ({a}, {b}) names an unknown basis element")
            t = {}
            for n, c in terms.items():
                if n not in self.bindex:
                    raise CapInconsistent(f"product ({a}, {b}) names unknown basis element {n}")
                c = F(c)
                if c != 0:
                    t[self.bindex[n]] = c
            self.products[ia, ib] = t
        self.derivation = None
        if spec.derivation:
            self.derivation = {}
            for a, terms in spec.derivation.items():
                if a not in self.bindex:
                    raise LeibnizViolation(f"derivation given for unknown basis element {a}")
                t = {}
                for n, c in terms.items():
                    if n not in self.bindex:
                        raise LeibnizViolation(f"derivation of {a} names unknown element {n}")
                    c = F(c)
                    if c != 0:
                        t[self.bindex[n]] = c
                if t:
                    self.derivation[self.bindex[a]] = t
            if not self.derivation:
                self.derivation = None
        self.idempotent_index = {}
        self._components: dict = {}
        for i, b in enumerate(self.basis):
            self._components.setdefault((self.lv[i], self.rv[i], b.degree), []).append(i)
            if b.degree == 0 and self.lv[i] == self.rv[i]:
                self.idempotent_index.setdefault(self.lv[i], i)
        self._components = {k: tuple(v) for k, v in self._components.items()}

    # -- basic structure ---------------------------------------------------

    @property
    def has_derivation(self):
        return self.derivation is not None

    def in_window(self, d):
        """Whether degree ``d`` is known (stored, or zero because finite)."""
        return 0 <= d <= self.degree_cap or (d > self.degree_cap and self.finite)

    def require(self, d, what="component"):
        if d > self.degree_cap and not self.finite:
            raise CapExceeded(f"{what} of degree {d} exceeds degree_cap {self.degree_cap}")

    def component(self, x: int, y: int, d: int):
        """Basis indices of ``e_x A^d e_y`` in input order."""
        if d < 0:
            return ()
        self.require(d)
        return self._components.get((x, y, d), ())

    def component_basis(self, x, y, d):
        return [self.basis[i].name for i in self.component(self.vindex[x], self.vindex[y], d)]

    def dim(self, d=None):
        if d is None:
            return len(self.basis)
        return sum(1 for b in self.basis if b.degree == d)

    # -- elements ----------------------------------------------------------

    def zero(self, d, x, y):
        return AlgebraElement(self, d, x, y)

    def idempotent(self, x: int):
        return AlgebraElement(self, 0, x, x, {self.idempotent_index[x]: self.field.one})

    def scalar_element(self, x, c):
        return AlgebraElement(self, 0, x, x, {self.idempotent_index[x]: self.field(c)})

    def basis_element(self, name):
        i = self.bindex[name]
        return AlgebraElement(self, self.deg[i], self.lv[i], self.rv[i], {i: self.field.one})

    def element(self, terms: dict, degree=None, left=None, right=None):
        """Element from ``{name: coeff}``; the slot must be given when ``terms`` is empty."""
        F = self.field
        coeffs = {}
        for name, c in terms.items():
            if name not in self.bindex:
                raise VertexMismatch(f"unknown basis element {name!r}")
            i = self.bindex[name]
            slot = (self.deg[i], self.lv[i], self.rv[i])
            if degree is None:
                degree, left, right = slot
            elif slot != (degree, left, right):
                raise DegreeMismatch(f"{name} does not lie in component {(degree, left, right)}")
            coeffs[i] = coeffs.get(i, 0) + F(c)
        if degree is None:
            raise ValueError("empty element needs an explicit slot")
        return AlgebraElement(self, degree, left, right, coeffs)

    def from_vector(self, x, y, d, vec):
        comp = self.component(x, y, d)
        return AlgebraElement(self, d, x, y, {comp[i]: v for i, v in vec.items()})

    def multiply(self, a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
        if a.right != b.left:
            raise VertexMismatch(
                f"cannot multiply e_{self.vertices[a.left]}..e_{self.vertices[a.right]} by "
                f"e_{self.vertices[b.left]}..e_{self.vertices[b.right]}"
            )
        d = a.degree + b.degree
        out = AlgebraElement(self, d, a.left, b.right)
        if not a.coeffs or not b.coeffs:
            if d > self.degree_cap and not self.finite:
                raise CapExceeded(f"product of degree {d} exceeds degree_cap {self.degree_cap}")
            return out
        if d > self.degree_cap:
            if self.finite:
                return out
            raise CapExceeded(f"product of degree {d} exceeds degree_cap {self.degree_cap}")
        c = out.coeffs
        prods = self.products
        for i, u in a.coeffs.items():
            for j, v in b.coeffs.items():
                t = prods.get((i, j))
                if not t:
                    continue
                uv = u * v
                for k, w in t.items():
                    nv = c.get(k, 0) + uv * w
                    if nv == 0:
                        c.pop(k, None)
                    else:
                        c[k] = nv
        return out

    def apply_derivation(self, a: AlgebraElement) -> AlgebraElement:
        d = a.degree + 1
        out = AlgebraElement(self, d, a.left, a.right)
        if self.derivation is None or not a.coeffs:
            return out
        if d > self.degree_cap:
            if self.finite:
                return out
            raise CapExceeded(f"derivative of degree {d} exceeds degree_cap {self.degree_cap}")
        c = out.coeffs
        for i, u in a.coeffs.items():
            for k, w in self.derivation.get(i, {}).items():
                nv = c.get(k, 0) + u * w
                if nv == 0:
                    c.pop(k, None)
                else:
                    c[k] = nv
        return out

    def to_spec(self) -> AlgebraSpec:
        names = [b.name for b in self.basis]
        products = {
            (names[i], names[j]): {names[k]: v for k, v in t.items()}
            for (i, j), t in self.products.items()
        }
        der = None
        if self.derivation:
            der = {names[i]: {names[k]: v for k, v in t.items()} for i, t in self.derivation.items()}
        return AlgebraSpec(
            self.field, list(self.vertices), self.degree_cap, list(self.basis), products, der, self.finite
        )

    def __repr__(self):
        return (
            f"GradedAlgebra({self.field}, vertices={list(self.vertices)}, dim={len(self.basis)}, "
            f"cap={self.degree_cap}{', finite' if self.finite else ''})"
        )


def multiply(a, b):
    return a.alg.multiply(a, b)


def apply_derivation(a):
    return a.alg.apply_derivation(a)


def component_basis(alg, x, y, d):
    return alg.component_basis(x, y, d)


def _composable_pairs(alg):
    n = len(alg.basis)
    for i in range(n):
        for j in range(n):
            if alg.rv[i] == alg.lv[j] and alg.deg[i] + alg.deg[j] <= alg.degree_cap:
                yield i, j


def validate_algebra(spec: AlgebraSpec) -> GradedAlgebra:
    """Build a :class:`GradedAlgebra` and check every structural invariant exhaustively."""
    if not spec.vertices or len(set(spec.vertices)) != len(spec.vertices):
        raise P2Violation("vertex list must be nonempty with distinct names")
    if spec.degree_cap < 0:
        raise CapInconsistent("degree_cap must be nonnegative")
    names = [b.name for b in spec.basis]
    if len(set(names)) != len(names):
        raise CapInconsistent("duplicate basis names")
    for b in spec.basis:
        if b.degree < 0:
            raise P1Violation(f"basis element {b.name} has negative degree {b.degree}")
        if b.degree > spec.degree_cap:
            raise CapInconsistent(f"basis element {b.name} lies above degree_cap")
        if b.left not in spec.vertices or b.right not in spec.vertices:
            raise VertexMismatch(f"basis element {b.name} uses an unknown vertex")
    alg = GradedAlgebra(spec)
    F = alg.field
    n = len(alg.basis)

    deg0 = [i for i in range(n) if alg.deg[i] == 0]
    if len(deg0) != len(alg.vertices) or set(alg.idempotent_index) != set(range(len(alg.vertices))):
        raise P2Violation("degree-0 part must be spanned by exactly one idempotent per vertex")
    for i in deg0:
        if alg.lv[i] != alg.rv[i]:
            raise P2Violation(f"degree-0 element {alg.basis[i].name} is not a vertex idempotent")

    for i, j in iproduct(range(n), repeat=2):
        composable = alg.rv[i] == alg.lv[j]
        in_cap = alg.deg[i] + alg.deg[j] <= alg.degree_cap
        if (i, j) in alg.products and not composable:
            raise VertexMismatch(
                f"product {alg.basis[i].name}*{alg.basis[j].name} given for non-composable pair"
            )
        if (i, j) in alg.products and not in_cap:
            raise CapInconsistent(
                f"product {alg.basis[i].name}*{alg.basis[j].name} given above degree_cap"
            )
        if composable and in_cap and (i, j) not in alg.products:
            raise CapInconsistent(f"product {alg.basis[i].name}*{alg.basis[j].name} missing")
    for (i, j), t in alg.products.items():
        d, x, y = alg.deg[i] + alg.deg[j], alg.lv[i], alg.rv[j]
        for k in t:
            if (alg.deg[k], alg.lv[k], alg.rv[k]) != (d, x, y):
                raise DegreeMismatch(
                    f"product {alg.basis[i].name}*{alg.basis[j].name} has term {alg.basis[k].name} "
                    "in the wrong component"
                )

    for i in deg0:
        for j in deg0:
            if alg.rv[i] != alg.lv[j]:
                continue
            expect = {i: F.one} if i == j else {}
            if alg.products[i, j] != expect:
                raise P2Violation("vertex idempotents are not orthogonal idempotents")
    for b in range(n):
        el = alg.basis_element(alg.basis[b].name)
        if alg.idempotent(alg.lv[b]) * el != el or el * alg.idempotent(alg.rv[b]) != el:
            raise P2Violation(f"unit law fails for {alg.basis[b].name}")

    for i, j in _composable_pairs(alg):
        for k in range(n):
            if alg.rv[j] != alg.lv[k] or alg.deg[i] + alg.deg[j] + alg.deg[k] > alg.degree_cap:
                continue
            a, b, c = (alg.basis_element(alg.basis[t].name) for t in (i, j, k))
            if (a * b) * c != a * (b * c):
                raise AssocViolation(
                    f"({alg.basis[i].name}*{alg.basis[j].name})*{alg.basis[k].name} differs"
                )

    if alg.derivation is not None:
        for i, t in alg.derivation.items():
            if alg.deg[i] == 0:
                raise P3Violation(f"derivation is nonzero on idempotent {alg.basis[i].name}")
            for k in t:
                if (alg.deg[k], alg.lv[k], alg.rv[k]) != (alg.deg[i] + 1, alg.lv[i], alg.rv[i]):
                    raise DegreeMismatch(
                        f"derivation of {alg.basis[i].name} leaves its component"
                    )
        els = [alg.basis_element(b.name) for b in alg.basis]
        for i, j in _composable_pairs(alg):
            if alg.deg[i] + alg.deg[j] + 1 > alg.degree_cap and not alg.finite:
                continue
            a, b = els[i], els[j]
            lhs = alg.apply_derivation(a * b)
            sign = -1 if a.degree % 2 else 1
            rhs = alg.apply_derivation(a) * b + (a * alg.apply_derivation(b)).scale(F(sign))
            if lhs != rhs:
                raise LeibnizViolation(
                    f"Leibniz rule fails on {alg.basis[i].name}, {alg.basis[j].name}"
                )
        for a in els:
            if a.degree + 2 > alg.degree_cap and not alg.finite:
                continue
            if alg.apply_derivation(alg.apply_derivation(a)):
                raise DSquareViolation(f"d_A(d_A({a!r})) is nonzero")
    return alg


# -- path algebras modulo homogeneous relations ------------------------------



def _word_name(word, arrow_names):
    out = []
    i = 0
    while i < len(word):
        j = i
        while j < len(word) and word[j] == word[i]:
            j += 1
        name = arrow_names[word[i]]
        out.append(name if j - i == 1 else f"{name}^{j - i}")
        i = j
    return "*".join(out)


def parse_polynomial(F: Field, text: str, arrow_index: dict):
    """Parse ``"2*x*y - 3/2*y*x + x^3"`` into ``[(coeff, word)]``."""
    text = text.strip()
    if not text:
        raise InconsistentRelation("empty relation")
    if text[0] not in "+-":
        text = "+" + text
    terms = []
    pos = 0
    for m in re.finditer(r"([+-])([^+-]+)", text):
        if m.start() != pos:
            raise InconsistentRelation(f"cannot parse relation {text!r}")
        pos = m.end()
        sign = -1 if m.group(1) == "-" else 1
        coeff = F(sign)
        word = []
        for factor in m.group(2).split("*"):
            factor = factor.strip()
            if not factor:
                raise InconsistentRelation(f"empty factor in {text!r}")
            if re.fullmatch(r"\d+(/\d+)?", factor):
                coeff = coeff * F(factor)
                continue
            fm = re.fullmatch(r"([A-Za-z_][A-Za-z_0-9']*)(?:\^(\d+))?", factor)
            if not fm or fm.group(1) not in arrow_index:
                raise InconsistentRelation(f"unknown factor {factor!r} in {text!r}")
            word.extend([arrow_index[fm.group(1)]] * int(fm.group(2) or 1))
        terms.append((coeff, tuple(word)))
    if pos != len(text):
        raise InconsistentRelation(f"cannot parse relation {text!r}")
    return terms


def build_quotient_algebra(
    field: Field,
    vertices,
    arrows,
    relations=(),
    degree_cap=3,
    derivation=None,
    finite=None,
) -> GradedAlgebra:
    """Path algebra of a quiver modulo a homogeneous ideal, computed degreewise.

    ``arrows`` is a list of ``(name, degree, left, right)``; ``relations`` are
    strings or ``[(coeff, word)]`` lists.  ``derivation`` optionally maps
    arrow names to polynomials and is extended by the graded Leibniz rule.
    ``finite=None`` detects whether the quotient vanishes above the cap.
    """
    F = field
    vertices = list(vertices)
    vidx = {v: i for i, v in enumerate(vertices)}
    arrow_names = [a[0] for a in arrows]
    if len(set(arrow_names)) != len(arrow_names) or set(arrow_names) & {f"e_{v}" for v in vertices}:
        raise InconsistentRelation("arrow names must be distinct")
    adeg, aleft, aright = [], [], []
    for name, d, l, r in arrows:
        if d < 1:
            raise P1Violation(f"arrow {name} must have degree >= 1")
        if l not in vidx or r not in vidx:
            raise VertexMismatch(f"arrow {name} uses an unknown vertex")
        adeg.append(d)
        aleft.append(vidx[l])
        aright.append(vidx[r])
    aindex = {n: i for i, n in enumerate(arrow_names)}
    max_adeg = max(adeg) if adeg else 1
    top = degree_cap + (max_adeg if finite is None else 0)

    # paths by degree: list of (left, right, word)
    paths = {0: [(x, x, ()) for x in range(len(vertices))]}
    for d in range(1, top + 1):
        out = []
        for a in range(len(arrows)):
            if adeg[a] > d:
                continue
            for (l, r, w) in paths[d - adeg[a]]:
                if r == aleft[a]:
                    out.append((l, aright[a], w + (a,)))
        out.sort(key=lambda p: p[2])
        paths[d] = out
    pindex = {d: {p[2] if p[2] else ("v", p[0]): i for i, p in enumerate(ps)} for d, ps in paths.items()}

    def ends(word):
        return aleft[word[0]], aright[word[-1]]

    def wdeg(word):
        return sum(adeg[a] for a in word)

    rel_components = []
    for rel in relations:
        terms = parse_polynomial(F, rel, aindex) if isinstance(rel, str) else [
            (F(c), tuple(aindex[a] if isinstance(a, str) else a for a in w)) for c, w in rel
        ]
        degs = {wdeg(w) for _, w in terms}
        if any(not w for _, w in terms):
            raise InconsistentRelation("relations must lie in degree >= 1")
        if len(degs) != 1:
            raise InconsistentRelation(f"relation {rel!r} is not homogeneous")
        d = degs.pop()
        if d > degree_cap:
            raise CapExceeded(f"relation {rel!r} of degree {d} exceeds degree_cap {degree_cap}")
        byends = {}
        for c, w in terms:
            for k in range(len(w) - 1):
                if aright[w[k]] != aleft[w[k + 1]]:
                    raise InconsistentRelation(f"term {w} of {rel!r} is not a path")
            byends.setdefault(ends(w), {})
            byends[ends(w)][w] = byends[ends(w)].get(w, 0) + c
        for (l, r), t in byends.items():
            t = {w: c for w, c in t.items() if c != 0}
            if t:
                rel_components.append((d, l, r, t))

    # degreewise ideal and normal forms
    normal = {}  # d -> list of path indices that survive
    reduce_map = {}  # d -> {path index: {normal path index: coeff}}
    for d in range(0, top + 1):
        ps = paths[d]
        n = len(ps)
        rows = []
        for (dr, l, r, t) in rel_components:
            if dr > d:
                continue
            for d1 in range(0, d - dr + 1):
                d2 = d - dr - d1
                pre = [p for p in paths[d1] if p[1] == l]
                post = [q for q in paths[d2] if q[0] == r]
                for p in pre:
                    for q in post:
                        row = {}
                        for w, c in t.items():
                            full = p[2] + w + q[2]
                            k = pindex[d][full]
                            row[k] = row.get(k, 0) + c
                        row = {k: v for k, v in row.items() if v != 0}
                        if row:
                            # reversed columns: the pivot is the largest path
                            rows.append({n - 1 - k: v for k, v in row.items()})
        red, piv = linalg.rref(F, rows, n)
        pivot_paths = {n - 1 - c for c in piv}
        normal[d] = [k for k in range(n) if k not in pivot_paths]
        rmap = {k: {k: F.one} for k in normal[d]}
        for row, c in zip(red, piv):
            k = n - 1 - c
            rmap[k] = {n - 1 - cc: -v for cc, v in row.items() if cc != c}
        reduce_map[d] = rmap

    if finite is None:
        finite = all(not normal[d] for d in range(degree_cap + 1, top + 1))

    names, basis = {}, []
    for d in range(0, degree_cap + 1):
        for k in normal[d]:
            l, r, w = paths[d][k]
            name = f"e_{vertices[l]}" if not w else _word_name(w, arrow_names)
            names[d, k] = name
            basis.append(BasisElement(name, d, vertices[l], vertices[r]))

    def reduce_word(word_with_ends):
        l, r, w = word_with_ends
        d = wdeg(w)
        k = pindex[d][w if w else ("v", l)]
        return {names[d, kk]: c for kk, c in reduce_map[d][k].items()}

    products = {}
    by_deg = {d: [(k, paths[d][k]) for k in normal[d]] for d in range(degree_cap + 1)}
    for d1 in range(degree_cap + 1):
        for d2 in range(degree_cap + 1 - d1):
            for k1, (l1, r1, w1) in by_deg[d1]:
                for k2, (l2, r2, w2) in by_deg[d2]:
                    if r1 != l2:
                        continue
                    products[names[d1, k1], names[d2, k2]] = reduce_word((l1, r2, w1 + w2))

    der_table = None
    if derivation:
        arrow_d = {}
        for aname, poly in derivation.items():
            a = aindex[aname]
            terms = parse_polynomial(F, poly, aindex) if isinstance(poly, str) else [
                (F(c), tuple(aindex[x] if isinstance(x, str) else x for x in w)) for c, w in poly
            ]
            for c, w in terms:
                if not w or wdeg(w) != adeg[a] + 1 or ends(w) != (aleft[a], aright[a]):
                    raise LeibnizViolation(f"derivative of arrow {aname} is not homogeneous of degree +1")
            arrow_d[a] = terms

        def d_word(w):
            out = {}
            sign_deg = 0
            for pos, a in enumerate(w):
                sgn = -1 if sign_deg % 2 else 1
                for c, dw in arrow_d.get(a, []):
                    full = w[:pos] + dw + w[pos + 1:]
                    out[full] = out.get(full, 0) + c * sgn
                sign_deg += adeg[a]
            return out

        def reduce_poly(poly, d):
            out = {}
            for w, c in poly.items():
                for kk, cc in reduce_map[d][pindex[d][w]].items():
                    out[kk] = out.get(kk, 0) + c * cc
            return {k: v for k, v in out.items() if v != 0}

        for (dr, l, r, t) in rel_components:
            if dr + 1 > top:
                continue
            acc = {}
            for w, c in t.items():
                for w2, c2 in d_word(w).items():
                    acc[w2] = acc.get(w2, 0) + c * c2
            if reduce_poly(acc, dr + 1):
                raise LeibnizViolation("derivation does not preserve the ideal of relations")
        der_table = {}
        for d in range(1, degree_cap):
            for k, (l, r, w) in by_deg[d]:
                red = reduce_poly(d_word(w), d + 1)
                if red:
                    der_table[names[d, k]] = {names[d + 1, kk]: c for kk, c in red.items()}

    spec = AlgebraSpec(F, vertices, degree_cap, basis, products, der_table, finite)
    return validate_algebra(spec)
