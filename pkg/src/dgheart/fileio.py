"""JSON documents for algebras, modules and maps.

Scalars are strings (``"3"``, ``"-2/7"``); fields are ``"Q"`` or ``"F<p>"``.
Emission is canonical: fixed key order, entries sorted, coefficients in
lowest terms, two-space indentation and a trailing newline.
"""

from __future__ import annotations

import json
from pathlib import Path

from .algebra import AlgebraElement, AlgebraSpec, BasisElement, GradedAlgebra, validate_algebra
from .dgmod import ChainMap, ModuleSpec, entry_slot, validate_module
from .errors import DgError, ParseError, ValidationError
from .field import Field

ALGEBRA_KEYS = ("field", "vertices", "degree_cap", "finite", "basis", "products", "derivation")
MODULE_KEYS = ("algebra_ref", "generators", "differential")
MAP_KEYS = ("source_ref", "target_ref", "degree", "entries")


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"malformed JSON: {e.msg} at line {e.lineno}") from None


def document_kind(doc) -> str:
    if not isinstance(doc, dict):
        raise ParseError("document must be an object")
    if "basis" in doc:
        return "algebra"
    if "generators" in doc:
        return "module"
    if "entries" in doc:
        return "map"
    raise ParseError("cannot tell whether this is an algebra, module or map")


# -- low-level readers ------------------------------------------------------------


def _keys(doc, allowed, required, path):
    if not isinstance(doc, dict):
        raise ParseError("expected an object", path)
    extra = sorted(set(doc) - set(allowed))
    if extra:
        raise ParseError(f"unknown key {extra[0]!r}", path + (extra[0],))
    for k in required:
        if k not in doc:
            raise ParseError(f"missing key {k!r}", path)


def _list(doc, key, path):
    v = doc[key]
    if not isinstance(v, list):
        raise ParseError("expected an array", path + (key,))
    return v


def _int(doc, key, path):
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParseError("expected an integer", path + (key,))
    return v


def _str(doc, key, path):
    v = doc[key]
    if not isinstance(v, str):
        raise ParseError("expected a string", path + (key,))
    return v


def _scalar(F, text, path):
    if not isinstance(text, str):
        raise ParseError("scalars must be strings", path)
    try:
        return F(text)
    except (ValueError, ZeroDivisionError) as e:
        raise ParseError(str(e), path) from None


def _terms(F, doc, path, names=None):
    out = {}
    for k, t in enumerate(doc):
        p = path + (k,)
        _keys(t, ("basis", "coeff"), ("basis", "coeff"), p)
        b = _str(t, "basis", p)
        if names is not None and b not in names:
            raise ValidationError(_unknown_basis(b))
        if b in out:
            raise ParseError(f"repeated basis element {b!r}", p)
        c = _scalar(F, t["coeff"], p + ("coeff",))
        if c != 0:
            out[b] = c
    return out


def _unknown_basis(b):
    from .errors import VertexMismatch

    return VertexMismatch(f"unknown basis element {b!r}")


def _emit_terms(F, names, coeffs: dict):
    return [{"basis": names[k], "coeff": F.format(c)} for k, c in sorted(coeffs.items()) if c != 0]


def _validated(fn, *args):
    try:
        return fn(*args)
    except ParseError:
        raise
    except DgError as e:
        raise ValidationError(e) from e


# -- algebras ---------------------------------------------------------------------


def parse_algebra(doc) -> GradedAlgebra:
    path = ()
    _keys(doc, ALGEBRA_KEYS, ("field", "vertices", "degree_cap", "basis", "products"), path)
    try:
        F = Field.parse(_str(doc, "field", path))
    except ValueError as e:
        raise ParseError(str(e), ("field",)) from None
    vertices = _list(doc, "vertices", path)
    for k, v in enumerate(vertices):
        if not isinstance(v, str):
            raise ParseError("vertex names must be strings", ("vertices", k))
    cap = _int(doc, "degree_cap", path)
    finite = doc.get("finite", False)
    if not isinstance(finite, bool):
        raise ParseError("expected true or false", ("finite",))
    basis = []
    for k, b in enumerate(_list(doc, "basis", path)):
        p = ("basis", k)
        _keys(b, ("name", "degree", "left", "right"), ("name", "degree", "left", "right"), p)
        basis.append(BasisElement(_str(b, "name", p), _int(b, "degree", p), _str(b, "left", p), _str(b, "right", p)))
    names = {b.name for b in basis}
    products = {}
    for k, e in enumerate(_list(doc, "products", path)):
        p = ("products", k)
        _keys(e, ("left", "right", "terms"), ("left", "right", "terms"), p)
        a, b = _str(e, "left", p), _str(e, "right", p)
        for nm in (a, b):
            if nm not in names:
                raise ValidationError(_unknown_basis(nm))
        products[a, b] = _terms(F, _list(e, "terms", p), p + ("terms",), names)
    derivation = None
    if "derivation" in doc:
        derivation = {}
        for k, e in enumerate(_list(doc, "derivation", path)):
            p = ("derivation", k)
            _keys(e, ("basis", "terms"), ("basis", "terms"), p)
            b = _str(e, "basis", p)
            if b not in names:
                raise ValidationError(_unknown_basis(b))
            derivation[b] = _terms(F, _list(e, "terms", p), p + ("terms",), names)
    spec = AlgebraSpec(F, list(vertices), cap, basis, products, derivation, finite)
    return _validated(validate_algebra, spec)


def emit_algebra(alg: GradedAlgebra) -> dict:
    F = alg.field
    names = [b.name for b in alg.basis]
    doc = {
        "field": repr(F),
        "vertices": list(alg.vertices),
        "degree_cap": alg.degree_cap,
    }
    if alg.finite:
        doc["finite"] = True
    doc["basis"] = [{"name": b.name, "degree": b.degree, "left": b.left, "right": b.right} for b in alg.basis]
    doc["products"] = [
        {"left": names[i], "right": names[j], "terms": _emit_terms(F, names, alg.products.get((i, j), {}))}
        for i in range(len(names))
        for j in range(len(names))
        if alg.rv[i] == alg.lv[j] and alg.deg[i] + alg.deg[j] <= alg.degree_cap
    ]
    if alg.derivation:
        doc["derivation"] = [
            {"basis": names[i], "terms": _emit_terms(F, names, t)}
            for i, t in sorted(alg.derivation.items())
            if any(c != 0 for c in t.values())
        ]
    return doc


# -- modules ----------------------------------------------------------------------


def parse_module(doc, alg: GradedAlgebra):
    path = ()
    _keys(doc, MODULE_KEYS, ("generators", "differential"), path)
    F = alg.field
    gens = []
    for k, g in enumerate(_list(doc, "generators", path)):
        p = ("generators", k)
        _keys(g, ("shift", "vertex"), ("shift", "vertex"), p)
        gens.append((_int(g, "shift", p), _str(g, "vertex", p)))
    names = {b.name for b in alg.basis}
    diff = {}
    for k, e in enumerate(_list(doc, "differential", path)):
        p = ("differential", k)
        _keys(e, ("row", "col", "terms"), ("row", "col", "terms"), p)
        key = (_int(e, "row", p), _int(e, "col", p))
        if key in diff:
            raise ParseError("repeated differential entry", p)
        diff[key] = _terms(F, _list(e, "terms", p), p + ("terms",), names)
    return _validated(validate_module, ModuleSpec(alg, gens, diff))


def _emit_matrix(alg, ent: dict):
    F = alg.field
    names = [b.name for b in alg.basis]
    return [
        {"row": j, "col": i, "terms": _emit_terms(F, names, v.coeffs)}
        for (j, i), v in sorted(ent.items())
        if v
    ]


def emit_module(M, algebra_ref: str | None = None) -> dict:
    doc = {}
    if algebra_ref is not None:
        doc["algebra_ref"] = algebra_ref
    doc["generators"] = [{"shift": l, "vertex": M.alg.vertices[x]} for l, x in M.gens]
    doc["differential"] = _emit_matrix(M.alg, M.D)
    return doc


# -- maps -------------------------------------------------------------------------


def parse_map(doc, source, target) -> ChainMap:
    path = ()
    _keys(doc, MAP_KEYS, ("degree", "entries"), path)
    alg = source.alg
    F = alg.field
    t = _int(doc, "degree", path)
    names = {b.name: i for i, b in enumerate(alg.basis)}
    ent = {}
    for k, e in enumerate(_list(doc, "entries", path)):
        p = ("entries", k)
        _keys(e, ("row", "col", "terms"), ("row", "col", "terms"), p)
        j, i = _int(e, "row", p), _int(e, "col", p)
        if not (0 <= j < target.n and 0 <= i < source.n):
            raise ParseError("entry outside the generator range", p)
        coeffs = _terms(F, _list(e, "terms", p), p + ("terms",), set(names))
        d, y, x = entry_slot(alg, target.gens, source.gens, j, i, t)
        ent[j, i] = AlgebraElement(alg, d, y, x, {names[b]: c for b, c in coeffs.items()})
    for (j, i), v in ent.items():
        for b in v.coeffs:
            B = alg.basis[b]
            d, y, x = entry_slot(alg, target.gens, source.gens, j, i, t)
            if B.degree != d or alg.vindex[B.left] != y or alg.vindex[B.right] != x:
                from .errors import DegreeMismatch

                raise ValidationError(DegreeMismatch(f"entry ({j}, {i}) has a term outside its slot"))
    return _validated(ChainMap, source, target, t, ent)


def emit_map(f: ChainMap, source_ref=None, target_ref=None) -> dict:
    doc = {}
    if source_ref is not None:
        doc["source_ref"] = source_ref
    if target_ref is not None:
        doc["target_ref"] = target_ref
    doc["degree"] = f.degree
    doc["entries"] = _emit_matrix(f.alg, f.entries)
    return doc


# -- files ------------------------------------------------------------------------


def read_document(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror}") from None
    return loads(text)


def _resolve(base: Path, ref, key):
    if not isinstance(ref, str):
        raise ParseError("references must be strings", (key,))
    return base.parent / ref


def load(path, alg=None):
    """Load any document: returns ``(kind, object)`` with references resolved."""
    path = Path(path)
    doc = read_document(path)
    kind = document_kind(doc)
    if kind == "algebra":
        return kind, parse_algebra(doc)
    if kind == "module":
        if alg is None:
            if "algebra_ref" not in doc:
                raise ParseError("module needs an algebra_ref", ("algebra_ref",))
            _, alg = load(_resolve(path, doc["algebra_ref"], "algebra_ref"))
        return kind, parse_module(doc, alg)
    for key in ("source_ref", "target_ref"):
        if key not in doc:
            raise ParseError(f"map needs a {key}", (key,))
    _, src = load(_resolve(path, doc["source_ref"], "source_ref"), alg)
    _, tgt = load(_resolve(path, doc["target_ref"], "target_ref"), src.alg)
    return kind, parse_map(doc, src, tgt)


def write_document(path, doc):
    Path(path).write_text(dumps(doc), encoding="utf-8")
