"""Command-line front end.

Every command reads one JSON problem file (``--input`` or stdin), validates it
against a schema, runs the computation and writes a JSON report holding the
inputs, outputs, a verification section and timing.

Exit codes: 0 success, 1 infeasible or singular, 2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from fractions import Fraction

import jsonschema

from . import chains as chains_mod
from . import divdiff, interp, series, vandermonde
from .qmatrix import SingularMatrixError
from .qpoly import QPolynomial
from .scalar import EXACT, FLOAT, Tolerance
from .serialize import (chain_from_json, family_from_json, matrix_to_json, poly_from_json,
                        poly_to_json, quaternion_to_json, parse_quaternion)

COMMANDS = ("solve", "rank", "vandermonde", "divdiff", "repmat", "gram", "minnorm", "check")
VERSION = 1

EXIT_OK, EXIT_INFEASIBLE, EXIT_MALFORMED = 0, 1, 2

_QUAT = {
    "oneOf": [
        {"type": "array", "items": {"type": ["number", "string"]}, "minItems": 4, "maxItems": 4},
        {"type": "string"},
        {"type": "number"},
    ]
}
_CHAIN = {"type": "array", "items": _QUAT, "minItems": 1}
_FAMILY = {
    "type": "array",
    "minItems": 1,
    "items": {
        "oneOf": [
            _CHAIN,
            {"type": "object", "additionalProperties": False, "required": ["nodes"],
             "properties": {"label": {"type": "string"}, "nodes": _CHAIN}},
        ]
    },
}
_POLY = {"type": "array", "items": _QUAT}
_TARGETS = {"type": "array", "items": {"type": "array", "items": _QUAT}}
_COMMON = {
    "version": {"const": VERSION},
    "backend": {"enum": [EXACT, FLOAT]},
    "tolerance": {"type": "number", "exclusiveMinimum": 0},
    "order": {"type": "integer", "minimum": 1},
}
_SIDE = {"enum": ["left", "right"]}


def _schema(required, **props):
    return {"type": "object", "additionalProperties": False, "required": list(required),
            "properties": {**_COMMON, **props}}


SCHEMAS = {
    "solve": _schema(["chains", "targets"], chains=_FAMILY, targets=_TARGETS, side=_SIDE,
                     m={"type": "integer", "minimum": 1}),
    "rank": _schema(["chains", "m"], chains=_FAMILY, m={"type": "integer", "minimum": 1}),
    "vandermonde": _schema(["chains", "m"], chains=_FAMILY, m={"type": "integer", "minimum": 1},
                           side={"enum": ["left", "right", "both"]}),
    "divdiff": _schema(["chain", "polynomial"], chain=_CHAIN, polynomial=_POLY, side=_SIDE),
    "repmat": _schema(["chains"], chains={**_FAMILY, "minItems": 3, "maxItems": 3},
                      method={"enum": ["general", "equal-length", "both"]}),
    "gram": _schema(["chains"], chains=_FAMILY, mode={"enum": ["stein", "truncated", "both"]}),
    "minnorm": _schema(["chains", "targets"], chains=_FAMILY, targets=_TARGETS),
    "check": {
        "oneOf": [
            _schema(["chains", "targets", "polynomial"], chains=_FAMILY, targets=_TARGETS,
                    polynomial=_POLY, side=_SIDE),
            _schema(["report"], report={"type": "object"}),
        ]
    },
}


class Infeasible(Exception):
    """Computation finished but the problem has no answer (certificate in the report)."""

    def __init__(self, report):
        super().__init__("infeasible")
        self.report = report


# JSON helpers -------------------------------------------------------------

def _scalar(x):
    if isinstance(x, float):
        if math.isinf(x):
            return "inf"
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return str(x)
    return x


def _jsonable(obj):
    from .qmatrix import QMatrix
    from .scalar import Quaternion

    if isinstance(obj, Quaternion):
        return quaternion_to_json(obj)
    if isinstance(obj, QPolynomial):
        return poly_to_json(obj)
    if isinstance(obj, QMatrix):
        return matrix_to_json(obj)
    if isinstance(obj, chains_mod.SphericalChain):
        return [quaternion_to_json(a) for a in obj.nodes]
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    return _scalar(obj)


def _text(obj):
    return str(obj)


# command implementations ----------------------------------------------------

def _family(payload, backend):
    return family_from_json(payload["chains"], backend)


def _problem(payload, backend):
    fam = _family(payload, backend)
    targets = [[parse_quaternion(t, backend) for t in ts] for ts in payload["targets"]]
    return interp.InterpolationProblem(fam, targets)


def _float_extra(backend, tol, residual):
    if backend != FLOAT:
        return {}
    return {"tolerance": {"rel": tol.rel, "abs": tol.abs}, "max_residual": residual}


def cmd_solve(payload, backend, tol, order):
    prob = _problem(payload, backend)
    side = payload.get("side", "left")
    sol = (interp.solve_right if side == "right" else interp.solve)(prob, tol)
    outputs = {"solvable": sol.solvable, "modulus": sol.modulus, "modulus_text": _text(sol.modulus),
               "rank_report": {"rank_V": sol.rank_report[0], "rank_VC": sol.rank_report[1]},
               "kappa": sol.kappa, "method": sol.method, "side": side}
    verification = {}
    if sol.solvable:
        outputs["particular"] = sol.particular
        outputs["particular_text"] = _text(sol.particular)
        check = interp.verify(prob, sol.particular, side, tol)
        verification = {"all_match": check["all_match"], "mismatches": check["mismatches"],
                        **_float_extra(backend, tol, check.get("max_deviation", 0.0))}
    if "m" in payload:
        kb = interp.kernel_basis(prob.family, payload["m"], tol)
        outputs["kernel"] = {"m": payload["m"], "dimension": kb["dimension"],
                             "basis": kb["basis"]}
        verification["kernel_dimension_matches"] = kb["consistent"]
    report = {"outputs": outputs, "verification": verification}
    if not sol.solvable:
        raise Infeasible(report)
    return report


def cmd_rank(payload, backend, tol, order):
    fam = _family(payload, backend)
    m = payload["m"]
    kr = chains_mod.kappa_report(fam, tol)
    rr = vandermonde.rank_report(fam, m, tol)
    derivation = [{"trace": c["trace"], "norm": c["norm"], "chains": c["chains"], "mu": c["mu"]}
                  for c in kr["classes"]]
    outputs = {"rank": rr["formula"], "kappa": kr["kappa"], "m": m, "classes": derivation,
               "lrcm": kr["lrcm"], "lrcm_text": _text(kr["lrcm"])}
    verification = {"rank_left": rr["rank_left"], "rank_right": rr["rank_right"],
                    "formula_matches_elimination": rr["agree"],
                    "kappa_equals_lrcm_degree": kr["consistent"]}
    return {"outputs": outputs, "verification": verification}


def cmd_vandermonde(payload, backend, tol, order):
    fam = _family(payload, backend)
    m = payload["m"]
    side = payload.get("side", "left")
    outputs, verification = {}, {}
    for s in (("left", "right") if side == "both" else (side,)):
        build = vandermonde.build_left if s == "left" else vandermonde.build_right
        v = build(fam, m)
        outputs[s] = v.matrix
        res = vandermonde.stein_residual(v)
        verification[f"{s}_constructions_agree"] = (
            _close_matrix(v.matrix, build(fam, m, "divided").matrix, tol))
        verification[f"{s}_stein_residual_max"] = res.max_abs()
    rr = vandermonde.rank_report(fam, m, tol)
    outputs["rank"] = rr["formula"]
    outputs["kappa"] = rr["kappa"]
    verification["rank_left"] = rr["rank_left"]
    verification["rank_right"] = rr["rank_right"]
    verification["rank_formula_matches"] = rr["agree"]
    if fam.is_exact():
        verification["adjoint_duality"] = vandermonde.adjoint_duality_check(fam, m)
    if fam.total_length == m:
        verification["invertible_by_leading_nodes"] = vandermonde.invertibility_check(fam, tol)
    return {"outputs": outputs, "verification": verification}


def _close_matrix(a, b, tol):
    if a.is_exact() and b.is_exact():
        return a == b
    return (a - b).max_abs() <= tol.abs + tol.rel * max(a.max_abs(), b.max_abs(), 1.0)


def cmd_divdiff(payload, backend, tol, order):
    chain = [parse_quaternion(x, backend) for x in payload["chain"]]
    f = poly_from_json(payload["polynomial"], backend)
    side = payload.get("side", "left")
    dd = divdiff.divided_difference_left if side == "left" else divdiff.divided_difference_right
    col = dd(chain, f)
    outputs = {"side": side, "values": list(col.values), "values_text": [_text(v) for v in col.values]}
    verification = {}
    if side == "left":
        g = divdiff.newton_reconstruct(chain, col)
        back = divdiff.divided_difference_left(chain, g).values
        verification["newton_reconstruction"] = g
        verification["newton_round_trip"] = all(
            (a == b) if (a.is_exact() and b.is_exact()) else (a - b).abs() <= tol.abs + tol.rel * max(a.abs(), 1.0)
            for a, b in zip(back, col.values))
    return {"outputs": outputs, "verification": verification}


def cmd_repmat(payload, backend, tol, order):
    fam = _family(payload, backend)
    a1, a2, a3 = fam.chains
    method = payload.get("method", "general")
    outputs, verification = {}, {}
    try:
        if method in ("general", "both"):
            rep = divdiff.rep_matrices(a1, a2, a3, tol)
            outputs["A"], outputs["B"] = rep.A, rep.B
        if method in ("equal-length", "both"):
            closed = divdiff.rep_matrices_equal_length(a1, a2, a3, tol)
            outputs["A_closed_form"], outputs["B_closed_form"] = closed.A, closed.B
            if method == "both":
                verification["methods_agree"] = (_close_matrix(rep.A, closed.A, tol)
                                                  and _close_matrix(rep.B, closed.B, tol))
            else:
                rep = closed
    except divdiff.RepPreconditionError as exc:
        raise Infeasible({"outputs": {"error": str(exc)}, "verification": {}}) from None
    worst = 0.0
    one = a1.nodes[0] ** 0
    for d in range(max(len(a1) + len(a2), 2) + 2):
        worst = max(worst, divdiff.check_representation(rep, QPolynomial.monomial(d, one)).max_abs())
    verification["representation_residual_max"] = worst
    verification["representation_holds"] = worst <= (0 if fam.is_exact() else tol.abs + tol.rel)
    return {"outputs": outputs, "verification": verification}


def cmd_gram(payload, backend, tol, order):
    fam = _family(payload, backend)
    mode = payload.get("mode", "stein")
    outputs, verification = {}, {}
    if mode in ("stein", "both"):
        g = series.gram_matrix(fam, "stein")
        outputs["gram"] = g.matrix
        outputs["rank"] = g.matrix.rank(tol)
        outputs["kappa"] = chains_mod.kappa(fam, tol)
        verification["stein_residual_max"] = series.gram_stein_residual(g).max_abs()
        verification["hermitian"] = _close_matrix(g.matrix, g.matrix.conj_transpose(), tol)
        verification["rank_equals_kappa"] = outputs["rank"] == outputs["kappa"]
    if mode in ("truncated", "both"):
        t = series.gram_matrix(fam, "truncated", order)
        outputs["gram_truncated"] = t.matrix
        outputs["order"] = t.order
    if mode == "both":
        cmp = series.gram_comparison(fam, order)
        verification["truncation_within_bound"] = cmp["within_bound"]
        verification["truncation_max_residual"] = cmp["max_residual"]
        verification["truncation_max_bound"] = cmp["max_bound"]
    return {"outputs": outputs, "verification": verification}


def cmd_minnorm(payload, backend, tol, order):
    prob = _problem(payload, backend)
    try:
        sol = series.minimal_norm_solve(prob, order)
    except SingularMatrixError as exc:
        raise Infeasible({"outputs": {"error": str(exc)}, "verification": {}}) from None
    check = series.verify_minimal_norm(prob, sol, tol)
    outputs = {"f_min": {"coeffs": list(sol.f_min.coeffs), "order": sol.f_min.order,
                         "tail_bound": sol.f_min.tail_bound},
               "norm_sq": sol.norm_sq, "weights": sol.weights, "modulus": sol.modulus,
               "norm_constraint_feasible": sol.norm_sq <= 1}
    trunc = sol.f_min.norm2_truncated()
    verification = {"conditions_within_bound": check["all_within_bound"],
                    "max_condition_deviation": check["max_deviation"],
                    "norm_sq_quadratic_form": sol.extra["dstar_p_d"],
                    "truncated_norm_sq": trunc,
                    "norm_gap_within_tail": 0 <= (sol.norm_sq - trunc) <= sol.f_min.tail_bound
                    if backend == EXACT else abs(float(sol.norm_sq - trunc)) <= float(sol.f_min.tail_bound) + 1e-10,
                    **_float_extra(backend, tol, check["max_deviation"])}
    return {"outputs": outputs, "verification": verification}


def cmd_check(payload, backend, tol, order):
    if "report" in payload:
        return _check_report(payload["report"], tol)
    prob = _problem(payload, backend)
    f = poly_from_json(payload["polynomial"], backend)
    res = interp.verify(prob, f, payload.get("side", "left"), tol)
    report = {"outputs": {"all_match": res["all_match"]},
              "verification": {"mismatches": res["mismatches"],
                               **_float_extra(backend, tol, res.get("max_deviation", 0.0))}}
    if not res["all_match"]:
        raise Infeasible(report)
    return report


def _check_report(rep, tol):
    command = rep.get("command")
    backend = rep.get("backend", EXACT)
    inputs = rep.get("inputs", {})
    outputs = rep.get("outputs", {})
    if command == "solve":
        if not outputs.get("solvable"):
            return {"outputs": {"checked": "solve", "all_match": None,
                                "note": "report records an unsolvable problem"},
                    "verification": {}}
        prob = _problem(inputs, backend)
        f = poly_from_json(outputs["particular"], backend)
        res = interp.verify(prob, f, outputs.get("side", "left"), tol)
        report = {"outputs": {"checked": "solve", "all_match": res["all_match"]},
                  "verification": {"mismatches": res["mismatches"]}}
    elif command == "minnorm":
        prob = _problem(inputs, backend)
        fm = outputs["f_min"]
        tail = fm["tail_bound"]
        tail = math.inf if tail == "inf" else (Fraction(tail) if backend == EXACT else float(Fraction(str(tail))))
        coeffs = [parse_quaternion(c, backend) for c in fm["coeffs"]]
        s = series.TruncatedSeries(coeffs, fm["order"], tail)

        class _Holder:
            f_min = s
        res = series.verify_minimal_norm(prob, _Holder, tol)
        report = {"outputs": {"checked": "minnorm", "all_match": res["all_within_bound"]},
                  "verification": {"max_condition_deviation": res["max_deviation"]}}
    else:
        raise ValueError(f"check accepts solve or minnorm reports, got {command!r}")
    if not report["outputs"]["all_match"]:
        raise Infeasible(report)
    return report


HANDLERS = {
    "solve": cmd_solve, "rank": cmd_rank, "vandermonde": cmd_vandermonde,
    "divdiff": cmd_divdiff, "repmat": cmd_repmat, "gram": cmd_gram,
    "minnorm": cmd_minnorm, "check": cmd_check,
}


def _schema_error_text(err: jsonschema.ValidationError) -> str:
    path = "/".join(str(p) for p in err.absolute_path) or "<root>"
    return f"{path}: {err.message}"


def run(command: str, payload: dict, backend: str | None = None, order: int | None = None,
        tolerance: float | None = None):
    """Run one command on a parsed problem; returns ``(exit_code, report)``."""
    start = time.perf_counter()
    report = {"command": command, "version": VERSION}
    try:
        if command not in HANDLERS:
            raise ValueError(f"unknown command {command!r}")
        jsonschema.validate(payload, SCHEMAS[command])
        backend = backend or payload.get("backend", EXACT)
        order = order or payload.get("order")
        tol_value = tolerance or payload.get("tolerance")
        tol = Tolerance(rel=tol_value) if tol_value else Tolerance()
        report["backend"] = backend
        report["inputs"] = payload
        body = HANDLERS[command](payload, backend, tol, order)
        code = EXIT_OK
    except jsonschema.ValidationError as exc:
        body = {"error": "schema", "message": _schema_error_text(exc)}
        code = EXIT_MALFORMED
    except chains_mod.SphericalChainError as exc:
        body = {"error": "chain", "message": str(exc)}
        code = EXIT_MALFORMED
    except Infeasible as exc:
        body = exc.report
        code = EXIT_INFEASIBLE
    except SingularMatrixError as exc:
        body = {"error": "singular", "message": str(exc)}
        code = EXIT_INFEASIBLE
    except series.OutsideUnitBall as exc:
        body = {"error": "domain", "message": str(exc)}
        code = EXIT_MALFORMED
    except (ValueError, KeyError, TypeError, ZeroDivisionError) as exc:
        body = {"error": "input", "message": str(exc)}
        code = EXIT_MALFORMED
    report.update(body)
    report["exit_code"] = code
    report["timing"] = {"seconds": time.perf_counter() - start}
    return code, _jsonable(report)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quatherm", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--input", "-i", help="problem file (default: stdin)")
    parser.add_argument("--output", "-o", help="report file (default: stdout)")
    parser.add_argument("--backend", choices=[EXACT, FLOAT])
    parser.add_argument("--order", type=int, help="series truncation order")
    parser.add_argument("--tolerance", type=float, help="relative tolerance for the float backend")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.input:
            with open(args.input) as fh:
                payload = json.load(fh)
        else:
            payload = json.load(sys.stdin)
    except (OSError, json.JSONDecodeError) as exc:
        code, report = EXIT_MALFORMED, {"command": args.command, "error": "input",
                                        "message": str(exc), "exit_code": EXIT_MALFORMED}
    else:
        code, report = run(args.command, payload, args.backend, args.order, args.tolerance)
    text = json.dumps(report, indent=2)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if code == EXIT_MALFORMED and "message" in report:
        print(f"error: {report['message']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
