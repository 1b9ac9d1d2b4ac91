"""
Command-line interface: ``ybd <command> <action> [options]``.

Human-readable results go to standard output, structured reports to
``--out``.  Exit codes: 0 success, 1 a check failed, 2 usage or input error.
"""
import argparse
import logging
import random
import sys

from app import codec
from app.classical_limit import (
    build_delta_r,
    build_r0,
    check_bd,
    check_cybe,
    compare_up_to_flip,
    r_from_R_jet,
)
from app.deformations import (
    DeformationSpec,
    build_P1,
    check_constraints,
    gauge_fix,
    second_order_obstruction,
    solve_constraints,
    solve_first_order,
)
from app.errors import ScalarError, YBDError
from app.esoteric import EsotericSpec, build_esoteric_R, check_esoteric, esoteric_relations
from app.relations import antiplane_relations, cross_relations, degree3_dims, plane_relations, render_relation
from app.scalars import format_scalar, parse_scalar
from app.standard_p import (
    build_standard_P,
    check_braid,
    check_hecke,
    check_sl_condition,
    check_theorem2,
    convert_P_R,
    r_params,
    random_params,
)
from app.tensorspace import flip_transpose

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


class UsageError(YBDError):
    """Invalid combination of command-line options."""


def _scalar(text: str):
    try:
        return parse_scalar(text)
    except ScalarError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _verdict(args, label: str, passed: bool, doc: dict, detail: str | None = None) -> int:
    print(f"{label}: {'PASS' if passed else 'FAIL'}")
    if detail:
        print(detail)
    _write(args, doc)
    logger.info("%s verdict: %s", label, passed)
    return EXIT_OK if passed else EXIT_FAILED


def _write(args, doc) -> None:
    if getattr(args, "out", None):
        codec.write_json(args.out, doc)


def _params(args):
    if not args.params:
        raise UsageError("--params is required")
    return codec.load("params", args.params)


def _operator_and_a(args, need_a: bool = True):
    """The operator under test with its Hecke parameter."""
    if getattr(args, "operator", None):
        op = codec.load("operator", args.operator)
        if need_a and args.a is None:
            raise UsageError("--a is required with --operator")
        return op, args.a
    params = _params(args)
    return build_standard_P(params), params.a


def _spec_from_args(args) -> DeformationSpec:
    if getattr(args, "spec", None):
        return codec.load("spec", args.spec)
    if getattr(args, "principal", False):
        if None in (args.case, args.i, args.j):
            raise UsageError("--principal needs --case, --i and --j")
        return DeformationSpec.principal(args.case, args.i, args.j, args.amplitude or 1)
    if getattr(args, "exceptional", None):
        if None in (args.i, args.k):
            raise UsageError("--exceptional needs --i and --k")
        return DeformationSpec.exceptional(args.exceptional, args.i, args.k, args.amplitude or 1)
    raise UsageError("give --spec, --principal or --exceptional")


def _esoteric_from_args(args) -> EsotericSpec:
    if getattr(args, "esoteric", None):
        return codec.load("esoteric", args.esoteric)
    if args.n is None or args.q is None:
        raise UsageError("give --esoteric or --n and --q")
    return EsotericSpec(args.n, args.q, tuple(args.mu or ()))


# -- params -----------------------------------------------------------------

def cmd_params_validate(args) -> int:
    params = _params(args)
    print(f"params: OK (n = {params.n})")
    _write(args, params.to_json())
    return EXIT_OK


def cmd_params_show(args) -> int:
    params = _params(args)
    print(params.describe())
    for (i, j), r in r_params(params).items():
        print(f"r{i}{j} = {format_scalar(r)}")
    sl = check_sl_condition(params)
    print(f"sl condition: {'holds' if sl.passed else 'does not hold'}")
    _write(args, {"params": params.to_json(), "sl": sl.to_dict()})
    return EXIT_OK


# -- build ------------------------------------------------------------------

def cmd_build_standard(args) -> int:
    P = build_standard_P(_params(args))
    print(f"standard P: n = {P.n}, {len(P)} entries")
    _write(args, P.to_json())
    return EXIT_OK


def cmd_build_esoteric(args) -> int:
    spec = _esoteric_from_args(args)
    R = build_esoteric_R(spec, args.placement)
    op = convert_P_R(R, "r_to_p") if args.frame == "p" else R
    print(f"esoteric {args.frame.upper()}: N = {op.n}, {len(op)} entries")
    _write(args, op.to_json())
    return EXIT_OK


# -- check ------------------------------------------------------------------

def cmd_check_hecke(args) -> int:
    P, a = _operator_and_a(args)
    report = check_hecke(P, a)
    return _verdict(args, "hecke", report.passed, report.to_dict())


def cmd_check_braid(args) -> int:
    P, _ = _operator_and_a(args, need_a=False)
    if args.form == "qybe" and not getattr(args, "operator", None):
        P = convert_P_R(P)
    report = check_braid(P, args.form)
    return _verdict(args, args.form, report.passed, report.to_dict())


def cmd_check_theorem2(args) -> int:
    P, a = _operator_and_a(args)
    report = check_theorem2(P, a)
    return _verdict(args, "theorem2", report.passed, report.to_dict())


def cmd_check_sl(args) -> int:
    report = check_sl_condition(_params(args))
    detail = "\n".join(f"j={j}: ratio {format_scalar(r)}" for j, r in report.ratios.items())
    return _verdict(args, "sl", report.passed, report.to_dict(), detail)


def cmd_check_cybe(args) -> int:
    if getattr(args, "operator", None):
        r = codec.load("operator", args.operator)
    elif args.classical:
        spec = codec.load("spec", args.spec) if args.spec else None
        r = r_from_R_jet(codec.load("classical", args.classical), spec)
    else:
        raise UsageError("give --operator or --classical")
    report = check_cybe(r)
    return _verdict(args, "cybe", report.passed, report.to_dict())


def cmd_check_bd(args) -> int:
    if not args.classical or not args.spec:
        raise UsageError("--classical and --spec are required")
    report = check_bd(codec.load("classical", args.classical), codec.load("spec", args.spec))
    detail = "\n".join(f"m={m}: residual {format_scalar(v)}" for m, v in report.residuals.items())
    return _verdict(args, "bd", report.passed, report.to_dict(), detail)


# -- relations --------------------------------------------------------------

def cmd_relations(args) -> int:
    P, a = _operator_and_a(args)
    doc = {}
    sectors = ("plane", "antiplane", "cross") if args.sector == "all" else (args.sector,)
    for sector in sectors:
        if sector == "plane":
            relations = plane_relations(P)
        elif sector == "antiplane":
            relations = antiplane_relations(P, a)
        else:
            relations = cross_relations(P, a)
        texts = [render_relation(r) for r in relations]
        print(f"# {sector}")
        print("\n".join(texts))
        doc[sector] = texts
    if args.degree3:
        plane_dim, antiplane_dim = degree3_dims(P, a)
        print(f"degree 3: plane {plane_dim}, antiplane {antiplane_dim}")
        doc["degree3"] = {"plane": plane_dim, "antiplane": antiplane_dim}
    _write(args, doc)
    return EXIT_OK


# -- deform -----------------------------------------------------------------

def cmd_deform_build(args) -> int:
    P1 = build_P1(_params(args), _spec_from_args(args))
    print(f"P1: {len(P1)} entries")
    for (inp, out), value in P1.items():
        print(f"  {inp} -> {out}: {format_scalar(value)}")
    _write(args, P1.to_json())
    return EXIT_OK


def cmd_deform_check(args) -> int:
    params = _params(args)
    spec = _spec_from_args(args)
    constraints = check_constraints(params, spec)
    doc = {"constraints": constraints.to_dict()}
    passed = constraints.passed
    if passed:
        P = build_standard_P(params) + build_P1(params, spec)
        braid = check_braid(P)
        hecke = check_hecke(P, params.a)
        doc["braid"] = braid.to_dict()
        doc["hecke"] = hecke.to_dict()
        passed = braid.passed and hecke.passed
    detail = ", ".join(f"m={m}: {format_scalar(r)}" for m, r in constraints.ratios.items())
    return _verdict(args, "deformation", passed, doc, f"constraint ratios: {detail}")


def cmd_deform_solve(args) -> int:
    if args.n is None:
        raise UsageError("--n is required")
    family = solve_constraints(args.n, _spec_from_args(args))
    print(family.describe())
    _write(args, family.to_json())
    return EXIT_OK


def cmd_deform_first_order(args) -> int:
    result = solve_first_order(_params(args))
    print(f"braid solutions: {result.solution_dim}")
    print(f"hecke-compatible: {result.hecke_solution_dim}")
    print(f"trivial: {result.trivial_dim}")
    print(f"essential: {result.essential_dim}")
    print(f"hecke for free: {'yes' if result.hecke_free else 'no'}")
    _write(args, result.to_dict())
    return EXIT_OK


def cmd_deform_gauge_fix(args) -> int:
    if not args.operator:
        raise UsageError("--operator is required")
    fixed = gauge_fix(_params(args), codec.load("operator", args.operator))
    print(f"gauge-fixed P1: {len(fixed)} entries")
    _write(args, fixed.to_json())
    return EXIT_OK


def cmd_deform_obstruction(args) -> int:
    if not args.operator:
        raise UsageError("--operator is required")
    report = second_order_obstruction(_params(args), codec.load("operator", args.operator))
    return _verdict(args, "second order", report.solvable, report.to_dict())


# -- classical --------------------------------------------------------------

def _classical(args):
    if not args.classical:
        raise UsageError("--classical is required")
    return codec.load("classical", args.classical)


def cmd_classical_r0(args) -> int:
    r0 = build_r0(_classical(args))
    print(f"r0: {len(r0)} entries")
    _write(args, r0.to_json())
    return EXIT_OK


def cmd_classical_delta_r(args) -> int:
    delta = build_delta_r(_spec_from_args(args), args.n)
    print(f"delta r: {len(delta)} entries")
    _write(args, delta.to_json())
    return EXIT_OK


def cmd_classical_extract(args) -> int:
    cp = _classical(args)
    spec = codec.load("spec", args.spec) if args.spec else None
    r = r_from_R_jet(cp, spec)
    comparison = compare_up_to_flip(r, build_r0(cp))
    print(f"r: {len(r)} entries")
    print(f"against r0: {comparison.verdict}" + (f" ({comparison.frame})" if comparison.frame else ""))
    _write(args, {"r": r.to_json(), "matrix_unit_frame": flip_transpose(r).to_json(), "r0": comparison.to_dict()})
    return EXIT_OK


# -- esoteric ---------------------------------------------------------------

def cmd_esoteric_check(args) -> int:
    spec = _esoteric_from_args(args)
    report = check_esoteric(spec, args.placement)
    doc = {"check": report.to_dict()}
    passed = report.passed
    if args.relations:
        relations = esoteric_relations(spec, args.placement)
        doc["relations"] = relations.to_dict()
        passed = passed and relations.passed
    return _verdict(args, f"esoteric gl({spec.dimension})", passed, doc)


# -- sample -----------------------------------------------------------------

def cmd_sample_params(args) -> int:
    if args.n is None:
        raise UsageError("--n is required")
    params = random_params(args.n, random.Random(args.seed), args.a)
    print(params.describe())
    _write(args, params.to_json())
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def _add_params(parser, required=False):
    parser.add_argument("--params", required=required, help="parameter file {n, a, q}")


def _add_operator(parser):
    parser.add_argument("--operator", help="operator file {n, entries}")
    parser.add_argument("--a", type=_scalar, help="Hecke parameter a (with --operator)")


def _add_spec(parser):
    parser.add_argument("--spec", help="deformation spec file")
    parser.add_argument("--principal", action="store_true", help="principal series")
    parser.add_argument("--exceptional", choices=["upper", "lower"], help="exceptional series side")
    parser.add_argument("--case", type=int, choices=[1, 2])
    parser.add_argument("--i", type=int)
    parser.add_argument("--j", type=int)
    parser.add_argument("--k", type=int)
    parser.add_argument("--amplitude", type=_scalar)


def _add_esoteric(parser):
    parser.add_argument("--esoteric", help="esoteric spec file {n, q, mu}")
    parser.add_argument("--n", type=int)
    parser.add_argument("--q", type=_scalar)
    parser.add_argument("--mu", type=_scalar, nargs="*")
    parser.add_argument("--placement", choices=["hecke", "printed"], default="hecke",
                        help="placement of the lambda terms")


def _action(group, name, handler, help_text):
    parser = group.add_parser(name, help=help_text, description=help_text)
    parser.add_argument("--out", help="write the structured report here")
    parser.set_defaults(handler=handler)
    return parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ybd",
        description="Exact multiparameter R-matrices, their deformations and classical limits.",
    )
    parser.add_argument("--log-level", default="WARNING",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized commands")
    commands = parser.add_subparsers(dest="command", required=True)

    group = commands.add_parser("params", help="parameter files").add_subparsers(dest="action", required=True)
    _add_params(_action(group, "validate", cmd_params_validate,
                        "validate q^{ij} q^{ji} = 1, q^{ii} = 1 and a != 0, -1"), True)
    _add_params(_action(group, "show", cmd_params_show,
                        "show q^{ij}, r^{ij} = a q^{ij} and the sl condition"), True)

    group = commands.add_parser("build", help="operator construction").add_subparsers(dest="action", required=True)
    _add_params(_action(group, "standard", cmd_build_standard,
                        "standard P with xx(P - 1) = 0 giving x^i x^j = q^{ij} x^j x^i"), True)
    parser_eso = _action(group, "esoteric", cmd_build_esoteric,
                         "esoteric R = R0 + sum mu_i M_i^n (x) M_{i'}^n + ...")
    _add_esoteric(parser_eso)
    parser_eso.add_argument("--frame", choices=["r", "p"], default="r")

    group = commands.add_parser("check", help="exact checks").add_subparsers(dest="action", required=True)
    sub = _action(group, "hecke", cmd_check_hecke, "Hecke condition (P - 1)(P + a) = 0")
    _add_params(sub)
    _add_operator(sub)
    sub = _action(group, "braid", cmd_check_braid,
                  "braid relation P12 P23 P12 = P23 P12 P23 (or R12 R13 R23 = R23 R13 R12)")
    _add_params(sub)
    _add_operator(sub)
    sub.add_argument("--form", choices=["braid", "qybe"], default="braid")
    sub = _action(group, "theorem2", cmd_check_theorem2,
                  "(braid)_123 (P12 - 1) = 0 and (braid)_123 (P12 + a) = 0")
    _add_params(sub)
    _add_operator(sub)
    _add_params(_action(group, "sl", cmd_check_sl,
                        "sl reduction (prod_i q^{ij})^2 a^{2j} = a^{N+1}"), True)
    sub = _action(group, "cybe", cmd_check_cybe,
                  "classical Yang-Baxter [r12, r13] + [r12, r23] + [r13, r23] = 0")
    sub.add_argument("--operator", help="r-matrix operator file")
    sub.add_argument("--classical", help="classical parameter file; r is extracted from R(h)")
    sub.add_argument("--spec", help="deformation spec file")
    sub = _action(group, "bd", cmd_check_bd,
                  "Belavin-Drinfeld condition p^{lm} + p^{km} + p^{mi} + p^{mj} = delta_m^j - delta_m^i")
    sub.add_argument("--classical", help="classical parameter file")
    sub.add_argument("--spec", help="deformation spec file")

    sub = commands.add_parser("relations", help="quantum plane relations xx(P - 1) = 0, θθ(P + a) = 0, a xθ = θx P",
                              description="quantum plane relations xx(P - 1) = 0, θθ(P + a) = 0, a xθ = θx P")
    sub.set_defaults(handler=cmd_relations)
    sub.add_argument("--out", help="write the structured report here")
    _add_params(sub)
    _add_operator(sub)
    sub.add_argument("--sector", choices=["plane", "antiplane", "cross", "all"], default="all")
    sub.add_argument("--degree3", action="store_true", help="also report degree-3 dimensions")

    group = commands.add_parser("deform", help="elementary deformations").add_subparsers(dest="action", required=True)
    sub = _action(group, "build", cmd_deform_build, "elementary P1 of P + eps P1 (two entries)")
    _add_params(sub, True)
    _add_spec(sub)
    sub = _action(group, "check", cmd_deform_check,
                  "constraints q^{im} q^{jm} q^{mk} q^{ml} = a^{delta_m^i - delta_m^j} and exactness of P + P1")
    _add_params(sub, True)
    _add_spec(sub)
    sub = _action(group, "solve", cmd_deform_solve, "solve the multiplicative constraints on q for a spec")
    sub.add_argument("--n", type=int)
    _add_spec(sub)
    _add_params(_action(group, "first-order", cmd_deform_first_order,
                        "all P1 with d/d eps braid(P + eps P1) = 0, modulo trivial deformations"), True)
    sub = _action(group, "gauge-fix", cmd_deform_gauge_fix,
                  "representative of P1 with no entries on at most two distinct indices")
    _add_params(sub, True)
    sub.add_argument("--operator", help="first-order deformation file")
    sub = _action(group, "obstruction", cmd_deform_obstruction,
                  "second-order braid equation L(P2) = -Q(P1)")
    _add_params(sub, True)
    sub.add_argument("--operator", help="first-order deformation file")

    group = commands.add_parser("classical", help="classical limits").add_subparsers(dest="action", required=True)
    sub = _action(group, "r0", cmd_classical_r0,
                  "r0 = sum_{i<j} M_j^i (x) M_i^j + p^{ij} M_j^j (x) M_i^i - (1 + p^{ij}) M_i^i (x) M_j^j")
    sub.add_argument("--classical", help="classical parameter file")
    sub = _action(group, "delta-r", cmd_classical_delta_r, "delta r = M_k^i (x) M_l^j - M_l^j (x) M_k^i")
    sub.add_argument("--n", type=int)
    _add_spec(sub)
    sub = _action(group, "extract", cmd_classical_extract, "r from R = 1 - h r + O(h^2)")
    sub.add_argument("--classical", help="classical parameter file")
    sub.add_argument("--spec", help="deformation spec file")

    group = commands.add_parser("esoteric", help="esoteric gl(2n-1)").add_subparsers(dest="action", required=True)
    sub = _action(group, "check", cmd_esoteric_check,
                  "braid and Hecke with a = q^2 for R0 + R1, mu'_i = -q^{2(i-n)} mu_i")
    _add_esoteric(sub)
    sub.add_argument("--relations", action="store_true", help="also compare the quadratic relations")

    group = commands.add_parser("sample", help="random inputs").add_subparsers(dest="action", required=True)
    sub = _action(group, "params", cmd_sample_params, "seeded random parameter set")
    sub.add_argument("--n", type=int)
    sub.add_argument("--a", type=_scalar)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=args.log_level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    logger.info("dispatching %s %s", args.command, getattr(args, "action", ""))
    try:
        return args.handler(args)
    except YBDError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
