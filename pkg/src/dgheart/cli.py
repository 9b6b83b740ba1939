"""Command-line driver: ``dgheart <command> ...``.

Exit codes: 0 success, 1 domain error (the error class is named in the
report), 2 usage error.
"""

from __future__ import annotations

import argparse
import sys

from . import fileio
from .errors import DgError, ValidationError


def _module_doc(M):
    return fileio.emit_module(M)


def _map_doc(f):
    return fileio.emit_map(f)


def _load(path, kind=None, alg=None):
    got, obj = fileio.load(path, alg)
    if kind is not None and got != kind:
        raise fileio.ParseError(f"expected a {kind} document, got a {got}")
    return obj


def _dims_by_degree(alg):
    out = {}
    for b in alg.basis:
        out[b.degree] = out.get(b.degree, 0) + 1
    return [out.get(d, 0) for d in range(max(out, default=-1) + 1)]


# -- commands ---------------------------------------------------------------------


def cmd_validate(args):
    kind, obj = fileio.load(args.file)
    if kind == "algebra":
        return {"kind": kind, "valid": True, "dims": _dims_by_degree(obj), "finite": obj.finite}
    if kind == "module":
        return {"kind": kind, "valid": True, "filt": obj.is_filt, "flag": obj.is_flag, "generators": obj.n}
    return {"kind": kind, "valid": True, "chain_map": obj.is_chain(), "degree": obj.degree}


def cmd_info(args):
    from .dgmod import reduced_module

    kind, obj = fileio.load(args.file)
    if kind == "algebra":
        return {
            "kind": kind,
            "field": repr(obj.field),
            "vertices": list(obj.vertices),
            "degree_cap": obj.degree_cap,
            "finite": obj.finite,
            "dims": _dims_by_degree(obj),
            "derivation": obj.has_derivation,
        }
    if kind == "module":
        red = reduced_module(obj)
        return {
            "kind": kind,
            "generators": obj.n,
            "filt": obj.is_filt,
            "flag": obj.is_flag,
            "reduced_cohomology": {str(k): v for k, v in sorted(red.cohomology.items()) if v},
            "lambda": red.total,
        }
    return {"kind": kind, "degree": obj.degree, "chain_map": obj.is_chain(), "entries": len(obj.entries)}


def cmd_cone(args):
    from .triang import cone

    f = _load(args.map, "map")
    return {"module": _module_doc(cone(f))}


def cmd_minimize(args):
    from .triang import minimize

    M = _load(args.module, "module")
    tr = minimize(M)
    return {
        "module": _module_doc(tr.result),
        "eliminations": [{"source": i, "target": j} for i, j in tr.eliminations],
        "verified": tr.verify(),
    }


def cmd_normalize(args):
    from .triang import normal_form

    M = _load(args.module, "module")
    N, _, _, tr = normal_form(M)
    return {"module": _module_doc(N), "eliminations": len(tr.eliminations)}


def cmd_truncate(args):
    from .triang import t_bounds, tau_ge, tau_le

    M = _load(args.module, "module")
    b = t_bounds(M)
    return {
        "at": args.at,
        "t_bounds": None if b is None else list(b),
        "le": _module_doc(tau_le(M, args.at)),
        "ge": _module_doc(tau_ge(M, args.at + 1)),
    }


def cmd_hom(args):
    from .dgmod import chain_maps_basis, hom_homotopy_classes

    M = _load(args.source, "module")
    N = _load(args.target, "module", M.alg)
    return {
        "degree": args.degree,
        "chain_maps": len(chain_maps_basis(M, N, args.degree)),
        "homotopy_classes": hom_homotopy_classes(M, N, args.degree).dim,
    }


def cmd_heart(args):
    from . import heart

    if args.op in ("kernel", "cokernel", "image"):
        if not args.map:
            raise _Usage("heart kernel|cokernel|image needs -f <map>")
        f = _load(args.map, "map")
        if args.op == "kernel":
            r = heart.heart_kernel(f)
            return {"module": _module_doc(r.module), "inclusion": _map_doc(r.inclusion)}
        if args.op == "cokernel":
            r = heart.heart_cokernel(f)
            return {"module": _module_doc(r.module), "projection": _map_doc(r.projection)}
        r = heart.heart_image(f)
        return {"module": _module_doc(r.module), "inclusion": _map_doc(r.inclusion)}
    if not args.module:
        raise _Usage(f"heart {args.op} needs a module file")
    M = _load(args.module, "module")
    if args.op == "socle":
        s = heart.socle_filtration(M)
        return {
            "layers": [dict(sorted(m.items())) for m in s.multiplicities],
            "sizes": [L.n for L in s.layers],
            "module": _module_doc(s.normal),
        }
    if args.op == "jh":
        return {"multiplicities": dict(sorted(heart.jh_multiplicities(M).items()))}
    return {"injective": heart.is_injective_heart(M)}


def cmd_fitting(args):
    from .fda import fitting

    M = _load(args.module, "module")
    f = _load(args.map, "map")
    r = fitting(M, f)
    return {
        "n": r.n,
        "kernel_part": _module_doc(r.kernel_part.module),
        "image_part": _module_doc(r.image_part.module),
    }


def cmd_decompose(args):
    from .fda import krs_decompose, modules_isomorphic

    M = _load(args.module, "module")
    d = krs_decompose(M, args.seed)
    k = len(d.summands)
    iso = [[modules_isomorphic(d.summands[a], d.summands[b], args.seed) for b in range(k)] for a in range(k)]
    return {
        "summands": [_module_doc(S) for S in d.summands],
        "certificates": d.certificates,
        "isomorphic": iso,
        "verified": d.verify(M),
    }


def cmd_koszul(args):
    from . import koszul

    alg = _load(args.algebra, "algebra")
    if args.op == "verify":
        rep = koszul.verify_koszul_duality(alg, args.length, args.cap)
        return {
            "ext_dims": rep.ext_dims,
            "end_dims": rep.end_dims,
            "checks": dict(sorted(rep.checks.items())),
            "isomorphism": "verified" if rep.verified else "failed",
        }
    res = koszul.minimal_resolution(alg, args.length, args.cap)
    if args.op == "resolve":
        return {
            "terms": [[{"vertex": alg.vertices[x], "degree": d} for x, d in t] for t in res.terms],
            "finite": res.finite,
            "window": res.window,
        }
    if args.op == "check":
        v = koszul.is_koszul(res)
        out = {"koszul": v.is_koszul, "complete": v.complete}
        if v.offending is not None:
            out["offending_term"] = v.offending[0]
            out["generator_degrees"] = v.offending[1]
        return out
    if args.op == "module":
        return {"module": _module_doc(koszul.koszul_module(res))}
    E = koszul.ext_algebra(res)
    F = alg.field
    return {
        "dims": E.dims,
        "grading": E.grading,
        "products": [
            {"left": a, "right": b, "terms": [{"basis": c, "coeff": F.format(x)} for c, x in sorted(t.items())]}
            for (a, b), t in sorted(E.table.items())
        ],
    }


# -- parser and output ------------------------------------------------------------


class _Usage(Exception):
    pass


def _global_options(p, suppress):
    kw = {"default": argparse.SUPPRESS} if suppress else {}
    p.add_argument("--output", choices=("text", "structured"), **({"default": "text"} if not suppress else kw))
    p.add_argument("--seed", type=int, **({"default": 0} if not suppress else kw))
    p.add_argument("--cap", type=int, **({"default": None} if not suppress else kw))


def build_parser():
    parser = argparse.ArgumentParser(prog="dgheart", description="Perfect dg modules over positively graded dg algebras.")
    _global_options(parser, False)
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, True)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=fn)
        return p

    add("validate", cmd_validate, "validate an algebra, module or map file").add_argument("file")
    add("info", cmd_info, "summarize a file").add_argument("file")
    add("cone", cmd_cone, "mapping cone of a degree-0 map").add_argument("-f", "--map", required=True)
    add("minimize", cmd_minimize, "Gaussian elimination to a minimal module").add_argument("module")
    add("normalize", cmd_normalize, "minimize, then put in filtered normal form").add_argument("module")
    p = add("truncate", cmd_truncate, "t-structure truncations")
    p.add_argument("--at", type=int, required=True)
    p.add_argument("module")
    p = add("hom", cmd_hom, "chain maps and homotopy classes")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--degree", type=int, default=0)
    p = add("heart", cmd_heart, "abelian structure of the heart")
    p.add_argument("op", choices=("kernel", "cokernel", "image", "socle", "jh", "injective"))
    p.add_argument("module", nargs="?")
    p.add_argument("-f", "--map")
    p = add("fitting", cmd_fitting, "Fitting decomposition of an endomorphism")
    p.add_argument("module")
    p.add_argument("-f", "--map", required=True)
    add("decompose", cmd_decompose, "decomposition into indecomposables").add_argument("module")
    p = add("koszul", cmd_koszul, "resolutions, K(A), Ext-algebra and duality")
    p.add_argument("op", choices=("resolve", "check", "module", "ext", "verify"))
    p.add_argument("algebra")
    p.add_argument("--length", type=int, default=4)
    return parser


def _render_text(obj, indent=0, out=None):
    out = [] if out is None else out
    pad = "  " * indent
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _flat(v):
                out.append(f"{pad}{k}:")
                _render_text(v, indent + 1, out)
            else:
                out.append(f"{pad}{k}: {_inline(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and not _flat(v):
                out.append(f"{pad}-")
                _render_text(v, indent + 1, out)
            else:
                out.append(f"{pad}- {_inline(v)}")
    else:
        out.append(f"{pad}{_inline(obj)}")
    return out


def _flat(v):
    items = v.values() if isinstance(v, dict) else v
    return all(not isinstance(x, (dict, list)) for x in items)


def _inline(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "none"
    if isinstance(v, list):
        return "[" + ", ".join(_inline(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_inline(x)}" for k, x in v.items()) + "}"
    return str(v)


def emit(report, mode, stream):
    if mode == "structured":
        stream.write(fileio.dumps(report))
    else:
        stream.write("\n".join(_render_text(report)) + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        result = args.func(args)
    except _Usage as e:
        parser.print_usage(sys.stderr)
        print(f"dgheart: error: {e}", file=sys.stderr)
        return 2
    except DgError as e:
        cause = e.cause if isinstance(e, ValidationError) else e
        report = {"command": args.command, "error": type(cause).__name__, "message": str(cause)}
        emit(report, args.output, sys.stdout)
        return 1
    emit({"command": args.command, "result": result}, args.output, sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
