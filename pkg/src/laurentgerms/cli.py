"""Command-line interface.

Every command reads expressions in the x1..xk syntax, prints one JSON
object to stdout, and is deterministic for a fixed configuration.

Exit codes: 0 success; 2 parse or format error in an expression or input
file; 3 mathematical precondition violated (nonlinear pole, improper
support, non-smooth cone, ...); 4 ambient/refinement dimension cap hit.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import (
    DimensionCapExceeded,
    ExprSyntaxError,
    FormatError,
    LaurentGermsError,
    UnknownVariable,
)
from .exact import ONE, AmbientSpace, mat, solve, vec
from .germs import decompose, germ_equal
from .cones import (
    DEFAULT_DIMENSION_CAP,
    ConeFamily,
    common_refinement,
    cones_meet_along_face,
    union_contains_line,
)
from .expand import laurent_expand
from .residues import (
    brion_vergne_split,
    coproduct,
    graded_split,
    jk_residue,
    make_arrangement,
    p_order,
    p_res,
    pi_minus,
    pi_plus,
)
from .latticeexp import (
    DEFAULT_TRUNCATION,
    evaluate_truncated,
    exp_integral,
    exp_sum_smooth,
    is_smooth,
    lattice_sum_numeric,
    make_lattice_cone,
    p_res_exp_sum,
)
from .exprio import (
    SessionConfig,
    frac_str,
    load_cone_family,
    load_rows,
    parse_germ,
    serialize,
)

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="laurentgerms",
        description="Exact Laurent expansions, residues, and lattice-cone "
                    "exponential sums for germs with linear poles.")
    top.add_argument("--dim", type=int, default=2, metavar="K",
                     help="ambient dimension (default 2)")
    top.add_argument("--gram", metavar="FILE",
                     help="JSON file with a KxK rational inner-product matrix "
                          "(default: identity)")
    top.add_argument("--seed", type=int, default=0,
                     help="seed recorded in the session config")
    top.add_argument("--trunc", type=int, default=DEFAULT_TRUNCATION,
                     metavar="N", help="truncation order for exponential sums")
    top.add_argument("--dim-cap", type=int, default=DEFAULT_DIMENSION_CAP,
                     metavar="D", help="refinement dimension cap")
    sub = top.add_subparsers(dest="command", required=True)

    def expr_cmd(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("expr", metavar="EXPR")
        return p

    expr_cmd("decompose", "polar/holomorphic decomposition of EXPR")
    p = expr_cmd("laurent", "Laurent expansion of EXPR")
    p.add_argument("--support", metavar="FILE",
                   help="cone family file fixing the expansion support")
    expr_cmd("project-plus", "holomorphic projection of EXPR")
    expr_cmd("project-minus", "polar projection of EXPR")
    expr_cmd("grade", "split EXPR by pole span and order")
    p = expr_cmd("jk", "iterated residue of EXPR on a subspace")
    p.add_argument("--subspace", metavar="FILE",
                   help="file of spanning rows (default: span of the poles)")
    p = expr_cmd("brion-vergne", "split EXPR relative to an arrangement")
    p.add_argument("--arrangement", metavar="FILE", required=True)
    expr_cmd("p-order", "maximal total pole order of EXPR")
    expr_cmd("p-res", "highest-order residue of EXPR")
    expr_cmd("coproduct", "numerator/denominator coproduct of EXPR")

    cone = sub.add_parser("cone", help="cone family operations")
    cone_sub = cone.add_subparsers(dest="cone_command", required=True)
    p = cone_sub.add_parser("refine", help="common simplicial refinement")
    p.add_argument("family", metavar="FILE")
    p = cone_sub.add_parser("check", help="test proper positioning")
    p.add_argument("family", metavar="FILE")

    p = sub.add_parser("exp-sum",
                       help="exponential sum on a lattice cone")
    p.add_argument("--cone", metavar="FILE", required=True,
                   help="file of generator rows")
    p.add_argument("--lattice", metavar="FILE",
                   help="file of lattice basis rows (default: standard)")

    p = sub.add_parser("verify", help="exact equality of two expressions")
    p.add_argument("expr1", metavar="EXPR1")
    p.add_argument("expr2", metavar="EXPR2")
    return top


def _config(args) -> SessionConfig:
    k = args.dim
    if k < 1:
        raise FormatError("--dim must be a positive integer")
    if args.gram:
        rows = load_rows(args.gram)
        gram = mat(rows)
    else:
        gram = AmbientSpace.standard(k).gram
    return SessionConfig(k, gram, truncation=args.trunc,
                         dim_cap=args.dim_cap, seed=args.seed)


def _emit(payload: dict):
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _span_rows(span) -> list[list[str]]:
    return [[frac_str(c) for c in row] for row in span]


def _run(args) -> int:
    cfg = _config(args)
    space = cfg.space()
    k = cfg.dimension

    if args.command == "decompose":
        _emit(serialize(decompose(space, parse_germ(args.expr, k))))
    elif args.command == "laurent":
        support = None
        if args.support:
            support = load_cone_family(args.support)
        g = parse_germ(args.expr, k)
        _emit(serialize(laurent_expand(space, g, support=support)))
    elif args.command == "project-plus":
        _emit(serialize(pi_plus(space, parse_germ(args.expr, k))))
    elif args.command == "project-minus":
        _emit(serialize(pi_minus(space, parse_germ(args.expr, k))))
    elif args.command == "grade":
        split = graded_split(space, parse_germ(args.expr, k))
        components = []
        for key in sorted(split, key=lambda key: (key.span_dim, key.p_order,
                                                  key.support_span)):
            components.append({"span": _span_rows(key.support_span),
                               "p_order": key.p_order,
                               "component": serialize(split[key])})
        _emit({"kind": "graded-split", "dim": k, "components": components})
    elif args.command == "jk":
        subspace = load_rows(args.subspace) if args.subspace else None
        g = parse_germ(args.expr, k)
        _emit(serialize(jk_residue(space, g, subspace=subspace)))
    elif args.command == "brion-vergne":
        arr = make_arrangement(load_rows(args.arrangement))
        gen, rest = brion_vergne_split(space, parse_germ(args.expr, k), arr)
        _emit({"kind": "brion-vergne", "dim": k,
               "generating": serialize(gen), "rest": serialize(rest)})
    elif args.command == "p-order":
        _emit({"kind": "p-order", "dim": k,
               "p_order": p_order(space, parse_germ(args.expr, k))})
    elif args.command == "p-res":
        _emit(serialize(p_res(space, parse_germ(args.expr, k))))
    elif args.command == "coproduct":
        terms = []
        for t in coproduct(space, parse_germ(args.expr, k)):
            right = None if t.right is None else serialize(t.right)
            terms.append({"left": t.left.to_string(), "right": right})
        _emit({"kind": "coproduct", "dim": k, "terms": terms})
    elif args.command == "cone":
        return _run_cone(args, cfg)
    elif args.command == "exp-sum":
        return _run_exp_sum(args, cfg)
    elif args.command == "verify":
        g1 = parse_germ(args.expr1, k)
        g2 = parse_germ(args.expr2, k)
        _emit({"kind": "verify", "dim": k, "equal": germ_equal(g1, g2)})
    return 0


def _run_cone(args, cfg: SessionConfig) -> int:
    cones = load_cone_family(args.family)
    if args.cone_command == "refine":
        pieces, index_sets = common_refinement(cones, dim_cap=cfg.dim_cap)
        _emit({"kind": "refinement",
               "dim": pieces[0].ambient if pieces else 0,
               "pieces": serialize(ConeFamily(tuple(pieces)))["cones"],
               "index_sets": [sorted(s) for s in index_sets]})
        return 0
    witness = None
    for i in range(len(cones)):
        for j in range(i, len(cones)):
            if union_contains_line([cones[i], cones[j]]):
                witness = {"pair": [i, j], "reason": "union contains a line"}
                break
        if witness:
            break
    if witness is None:
        for i in range(len(cones)):
            for j in range(i + 1, len(cones)):
                if not cones_meet_along_face(cones[i], cones[j]):
                    witness = {"pair": [i, j],
                               "reason": "intersection is not a common face"}
                    break
            if witness:
                break
    _emit({"kind": "positioning-check",
           "properly_positioned": witness is None,
           "witness": witness})
    return 0


def _run_exp_sum(args, cfg: SessionConfig) -> int:
    space = cfg.space()
    gens = load_rows(args.cone)
    basis = load_rows(args.lattice) if args.lattice else None
    lc = make_lattice_cone(gens, basis)

    pres = p_res_exp_sum(lc, space=space)
    integral = exp_integral(lc, dim_cap=cfg.dim_cap)
    order = max((t.p_order for t in pres.terms), default=0)
    report = {"kind": "exp-sum", "dim": lc.ambient,
              "generators": _span_rows(lc.rays),
              "smooth": is_smooth(lc),
              "p_order": order,
              "p_res": serialize(pres),
              "exp_integral": serialize(integral)}

    if report["smooth"]:
        ts = exp_sum_smooth(lc, trunc=cfg.truncation, space=space)
        report["truncation"] = ts.truncation_order
        report["polar"] = serialize(ts.polar_part)
        report["tail"] = ts.taylor_tail.to_string()
        report["numeric_check"] = _numeric_check(lc, ts)
    else:
        report["truncation"] = None
        report["polar"] = None
        report["tail"] = None
        report["numeric_check"] = None
    _emit(report)
    return 0


def _numeric_check(lc, ts) -> dict:
    """Compare the truncated sum against direct lattice summation.

    The test point has pairing -1 with every generator, so the defining
    series converges fast and the comparison is meaningful.
    """
    rows = mat(lc.rays)
    point = solve(rows, vec([-ONE] * len(lc.rays)))
    direct = lattice_sum_numeric(lc, point, height=40)
    value = float(evaluate_truncated(ts, point))
    return {"point": [frac_str(c) for c in point],
            "height": 40,
            "lattice_sum": direct,
            "truncated_value": value,
            "residual": abs(direct - value)}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _run(args)
    except (ExprSyntaxError, UnknownVariable, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DimensionCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (LaurentGermsError, ZeroDivisionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
