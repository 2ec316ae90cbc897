"""Command-line interface.

Subcommands: project | kii | priority | check | generate | compare.
Reports are JSON on stdout by default (17-significant-digit floats for
lossless round trips); --human prints tables rounded to 6 digits.
Exit codes: 0 success, 2 parse/validation error, 3 solver did not converge
(the report is still emitted).  Set PCC_LOG=debug for iteration traces.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import core, inconsistency, io as docio, nonlinear, subspace
from .closed_form import WeightVector, closed_form_sigma, weighted_gm_priority
from .core import (
    ADDITIVE,
    FIRST_COORDINATE_ONE,
    GEOMETRIC_MEAN_ONE,
    MULTIPLICATIVE,
    SUM_ONE,
    PCMatrix,
    PriorityVector,
)
from .errors import PCError
from .products import Frobenius, WeightedFrobenius, validate
from .subspace import ProjectionResult

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NO_CONVERGENCE = 3


def _matrix_list(arr) -> list:
    return [[float(v) for v in row] for row in np.asarray(arr, dtype=float)]


def _all_normalizations(v: PriorityVector) -> dict:
    mult = v.to_multiplicative()
    return {
        "geometric_mean_one": [float(x) for x in mult.normalized(GEOMETRIC_MEAN_ONE).values],
        "first_coordinate_one": [float(x) for x in mult.normalized(FIRST_COORDINATE_ONE).values],
        "sum_one": [float(x) for x in mult.normalized(SUM_ONE).values],
    }


def _load_pc_matrix(path: str, repair: bool) -> tuple[PCMatrix, dict]:
    doc = docio.load_matrix_document(path)
    matrix = doc.to_matrix(repair_reciprocity=repair)
    if doc.domain == ADDITIVE:
        matrix = core.exp_transform(matrix)
    summary = {"source": str(path), "n": doc.n, "domain": doc.domain}
    if repair:
        summary["reciprocity_repaired"] = True
    return matrix, summary


def _kii_quiet(M: PCMatrix) -> float:
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", inconsistency.NoTriadsWarning)
        return inconsistency.kii(M)


def _weights_or_none(args) -> WeightVector | None:
    if getattr(args, "weights", None):
        return WeightVector(np.array(args.weights, dtype=float))
    return None


def _select_product(args, n: int):
    """Resolve --product/--frobenius/--weights into a spec plus summary."""
    if getattr(args, "product", None):
        spec, summary = docio.load_product_document(args.product)
        return spec, summary
    weights = _weights_or_none(args)
    if weights is not None:
        return WeightedFrobenius(weights.rho), {"kind": "weighted", "rho": [float(r) for r in weights.rho]}
    return Frobenius(), {"kind": "frobenius"}


def _print_report(report: docio.RunReport, human: bool, out=None) -> None:
    out = out or sys.stdout
    if not human:
        out.write(report.to_json())
        return
    d = {k: v for k, v in report.__dict__.items() if v is not None}
    for key in ("input", "inner_product", "method", "kii_before", "kii_after",
                "residual_distance"):
        if key in d:
            out.write(f"{key}: {_round6(d[key])}\n")
    if report.coefficients is not None:
        out.write(f"coefficients: {_round6(report.coefficients)}\n")
    if report.priorities is not None:
        out.write("priorities:\n")
        for tag, vec in report.priorities.items():
            out.write(f"  {tag}: {_round6(vec)}\n")
    for key in ("additive_projection", "multiplicative_projection"):
        mat = getattr(report, key)
        if mat is not None:
            out.write(f"{key}:\n")
            for row in mat:
                out.write("  " + "  ".join(f"{v:.6g}" for v in row) + "\n")
    if report.solver is not None:
        out.write(f"solver: {_round6(report.solver)}\n")
    if report.triads is not None:
        out.write("triads (worst first):\n")
        for entry in report.triads:
            out.write(f"  {tuple(entry['triad'])}: local_index={entry['local_index']:.6g}\n")


def _round6(value):
    if isinstance(value, float):
        return float(f"{value:.6g}")
    if isinstance(value, list):
        return [_round6(v) for v in value]
    if isinstance(value, dict):
        return {k: _round6(v) for k, v in value.items()}
    return value


def _projection_report(M: PCMatrix, result: ProjectionResult, input_summary: dict,
                       product_summary: dict, method: str) -> docio.RunReport:
    return docio.RunReport(
        input=input_summary,
        inner_product=product_summary,
        method=method,
        kii_before=_kii_quiet(M),
        kii_after=_kii_quiet(result.multiplicative_projection),
        priorities=_all_normalizations(result.priority),
        coefficients=[float(c) for c in result.coefficients],
        residual_distance=float(result.residual_distance),
        additive_projection=_matrix_list(result.additive_projection.entries),
        multiplicative_projection=_matrix_list(result.multiplicative_projection.entries),
    )


def _cmd_project(args) -> int:
    M, input_summary = _load_pc_matrix(args.matrix, args.make_reciprocal)
    spec, product_summary = _select_product(args, M.n)
    method = args.method
    if method in ("closed-form", "newton") and not isinstance(spec, (Frobenius, WeightedFrobenius)):
        raise PCError(f"--method {method} requires a frobenius or weighted inner product")
    if method == "gram-schmidt":
        result = subspace.approximate(M, validate(spec, M.n))
        report = _projection_report(M, result, input_summary, product_summary, method)
        _print_report(report, args.human)
        return EXIT_OK
    rho = WeightVector(spec.rho) if isinstance(spec, WeightedFrobenius) else WeightVector.uniform(M.n)
    if method == "closed-form":
        sigma = closed_form_sigma(core.log_transform(M), rho)
        additive = core.reconstruct_consistent(sigma, ADDITIVE)
        multiplicative = core.exp_transform(additive)
        from .products import distance as _distance

        vspec = validate(WeightedFrobenius(rho.rho), M.n)
        report = docio.RunReport(
            input=input_summary,
            inner_product=product_summary,
            method=method,
            kii_before=_kii_quiet(M),
            kii_after=_kii_quiet(multiplicative),
            priorities=_all_normalizations(sigma),
            residual_distance=float(_distance(vspec, core.log_transform(M), additive)),
            additive_projection=_matrix_list(additive.entries),
            multiplicative_projection=_matrix_list(multiplicative.entries),
        )
        _print_report(report, args.human)
        return EXIT_OK
    # newton
    opts = nonlinear.SolverOptions(multistart_count=args.multistart, rng_seed=args.seed)
    solve = nonlinear.newton_solve(M, rho, opts)
    ratio = solve.x[:, None] / solve.x[None, :]
    report = docio.RunReport(
        input=input_summary,
        inner_product=product_summary,
        method=method,
        kii_before=_kii_quiet(M),
        kii_after=_kii_quiet(PCMatrix(ratio)),
        priorities=_all_normalizations(PriorityVector(solve.x, MULTIPLICATIVE)),
        residual_distance=float(np.sqrt(solve.objective_value)),
        multiplicative_projection=_matrix_list(ratio),
        solver={
            "x": [float(v) for v in solve.x],
            "objective_value": float(solve.objective_value),
            "gradient_max_norm": float(solve.gradient_max_norm),
            "iterations": solve.iterations,
            "converged": solve.converged,
            "start_point": [float(v) for v in solve.start_point],
            "gradient_fallbacks": list(solve.gradient_fallbacks),
            "restart_index": solve.restart_index,
        },
    )
    _print_report(report, args.human)
    return EXIT_OK if solve.converged else EXIT_NO_CONVERGENCE


def _cmd_kii(args) -> int:
    M, input_summary = _load_pc_matrix(args.matrix, args.make_reciprocal)
    reports = inconsistency.triad_reports(M)
    report = docio.RunReport(
        input=input_summary,
        kii_before=_kii_quiet(M),
        triads=[
            {
                "triad": [r.triad.i, r.triad.j, r.triad.k],
                "ratio_forward": r.ratio_forward,
                "local_index": r.local_index,
            }
            for r in reports
        ],
    )
    _print_report(report, args.human)
    return EXIT_OK


def _cmd_priority(args) -> int:
    M, input_summary = _load_pc_matrix(args.matrix, args.make_reciprocal)
    rho = _weights_or_none(args) or WeightVector.uniform(M.n)
    priority = weighted_gm_priority(M, rho)
    report = docio.RunReport(
        input=input_summary,
        inner_product={"kind": "weighted", "rho": [float(r) for r in rho.rho]},
        kii_before=_kii_quiet(M),
        priorities=_all_normalizations(priority),
    )
    _print_report(report, args.human)
    return EXIT_OK


def _cmd_check(args) -> int:
    doc = docio.load_matrix_document(args.matrix)
    arr = doc.to_array()
    if doc.domain == ADDITIVE:
        matrix = core.exp_transform(core.AdditiveMatrix(arr))
        rec_defect = 0.0
    else:
        core._check_positive(arr, "matrix")
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise docio.DocumentError("matrix must be square")
        rec_defect = float(np.max(np.abs(np.log(arr * arr.T))))
        matrix = core.make_reciprocal(arr)
    cons_defect = core.max_consistency_defect(core.log_transform(matrix))
    diagnostics = {
        "n": matrix.n,
        "domain": doc.domain,
        "reciprocal": rec_defect <= core.TAU_REC,
        "max_reciprocity_defect": rec_defect,
        "consistent": cons_defect <= core.TAU_CONS,
        "max_consistency_defect": cons_defect,
        "kii": _kii_quiet(matrix),
    }
    if args.human:
        for key, val in diagnostics.items():
            sys.stdout.write(f"{key}: {_round6(val)}\n")
    else:
        sys.stdout.write(json.dumps(diagnostics, indent=2) + "\n")
    return EXIT_OK if diagnostics["reciprocal"] else EXIT_INVALID


def _cmd_generate(args) -> int:
    if args.n < 2:
        raise PCError(f"--n must be >= 2, got {args.n}")
    if args.noise < 0:
        raise PCError(f"--noise must be >= 0, got {args.noise}")
    rng = np.random.default_rng(args.seed)
    logw = rng.uniform(-2.0, 2.0, args.n)
    a = logw[:, None] - logw[None, :]
    delta = np.triu(rng.uniform(-args.noise, args.noise, (args.n, args.n)), 1)
    a = a + delta - delta.T
    doc = docio.matrix_document_from_array(np.exp(a), MULTIPLICATIVE)
    sys.stdout.write(docio.emit_matrix_document(doc))
    return EXIT_OK


def _cmd_compare(args) -> int:
    M, input_summary = _load_pc_matrix(args.matrix, args.make_reciprocal)
    base = core.gmm_priority(M).to_additive().values
    base = base - np.mean(base)
    rows = []
    for path in args.products:
        spec, summary = docio.load_product_document(path)
        result = subspace.approximate(M, validate(spec, M.n))
        sigma = result.priority.to_additive().values
        sigma = sigma - np.mean(sigma)
        rows.append({
            "product": summary,
            "source": str(path),
            "coefficients": [float(c) for c in result.coefficients],
            "residual_distance": float(result.residual_distance),
            "priority_geometric_mean_one": [float(v) for v in result.priority.values],
            "max_abs_log_divergence_from_gmm": float(np.max(np.abs(sigma - base))),
        })
    payload = {"input": input_summary, "gmm_priority": [float(v) for v in np.exp(base)], "rows": rows}
    if args.human:
        sys.stdout.write(f"matrix: {input_summary['source']} (n={input_summary['n']})\n")
        for row in rows:
            sys.stdout.write(
                f"  {row['source']} [{row['product']['kind']}]: "
                f"divergence={row['max_abs_log_divergence_from_gmm']:.6g} "
                f"distance={row['residual_distance']:.6g}\n"
            )
    else:
        sys.stdout.write(json.dumps(payload, indent=2) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pcc",
        description="Consistent approximations of pairwise-comparison matrices "
                    "by orthogonal projection under selectable inner products.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_matrix_arg(p):
        p.add_argument("matrix", help="matrix file (.json or .csv)")
        p.add_argument("--make-reciprocal", action="store_true",
                       help="repair non-reciprocal input by geometric means")
        p.add_argument("--human", action="store_true", help="tables instead of JSON")

    p_project = sub.add_parser("project", help="consistent approximation of a matrix")
    add_matrix_arg(p_project)
    p_project.add_argument("--product", help="inner-product JSON file")
    p_project.add_argument("--frobenius", action="store_true",
                           help="use the Frobenius product (default)")
    p_project.add_argument("--weights", type=float, nargs="+", metavar="W",
                           help="weighted Frobenius with these positive weights")
    p_project.add_argument("--method", choices=("gram-schmidt", "closed-form", "newton"),
                           default="gram-schmidt")
    p_project.add_argument("--multistart", type=int, default=0,
                           help="extra Newton restarts from perturbed starts")
    p_project.add_argument("--seed", type=int, default=None, help="rng seed for --multistart")

    p_kii = sub.add_parser("kii", help="inconsistency index and triad breakdown")
    add_matrix_arg(p_kii)

    p_priority = sub.add_parser("priority", help="weighted geometric-mean priority vector")
    add_matrix_arg(p_priority)
    p_priority.add_argument("--weights", type=float, nargs="+", metavar="W",
                            help="positive weights (default: uniform)")

    p_check = sub.add_parser("check", help="reciprocity/consistency diagnostics")
    p_check.add_argument("matrix", help="matrix file (.json or .csv)")
    p_check.add_argument("--human", action="store_true")

    p_generate = sub.add_parser("generate", help="random reciprocal matrix document")
    p_generate.add_argument("--n", type=int, required=True)
    p_generate.add_argument("--noise", type=float, default=0.0,
                            help="half-width of uniform log-noise (0 gives a consistent matrix)")
    p_generate.add_argument("--seed", type=int, default=None)

    p_compare = sub.add_parser("compare", help="one matrix under several inner products")
    add_matrix_arg(p_compare)
    p_compare.add_argument("--products", nargs="+", required=True,
                           help="inner-product JSON files")

    return parser


_COMMANDS = {
    "project": _cmd_project,
    "kii": _cmd_kii,
    "priority": _cmd_priority,
    "check": _cmd_check,
    "generate": _cmd_generate,
    "compare": _cmd_compare,
}


def main(argv=None) -> int:
    if os.environ.get("PCC_LOG", "").lower() == "debug":
        logging.basicConfig(level=logging.DEBUG, stream=sys.stderr,
                            format="%(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (PCError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
