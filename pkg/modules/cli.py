"""Command-line front end: solve, sensitivity, sweep and verify.

Reports go to stdout as JSON, diagnostics to stderr. Exit codes:
0 success, 1 input error, 2 FW iteration cap reached, 3 bounds unverified or
audit failed, 4 instance too large for the reference oracle.
"""
import argparse
import logging
import sys
from typing import Dict, List, Optional

import numpy as np

from .errors import FWSensError, SizeGuardError
from .fw_solver import FWConfig, FWResult, default_start, run_fw, trace_frame
from .problem_io import Problem, dump_json, load_problem, parse_vector, to_jsonable, write_csv
from .reference_oracle import check_guard, sandwich_audit
from .sensitivity import SweepSpec, analyze, certified_delta, sweep
from .settings import AUDIT_TOL, DEFAULT_GAP_TOL, DEFAULT_MAX_ITER, FEASIBILITY_TOL, LOG_LEVEL, configure_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_NOT_CONVERGED = 2
EXIT_UNVERIFIED = 3
EXIT_SIZE_GUARD = 4

FROM_SOLVE = "from-solve"


class CliInputError(Exception):
    """Invalid command line; reported with exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliInputError(message)


def _add_solver_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--epsilon", type=float, default=DEFAULT_GAP_TOL, help="Tolerancia del gap de Frank-Wolfe.")
    parser.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER, help="Máximo de iteraciones de FW (>= 1).")
    parser.add_argument("--tol", type=float, default=FEASIBILITY_TOL, help="Tolerancia de factibilidad.")


def _add_x_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--x", default=FROM_SOLVE, help="Punto de análisis: 'from-solve' o un vector explícito.")


def _add_point_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--b-prime", required=True, help="Nuevo lado derecho b': ruta JSON, lista JSON o '1.1,1,0,0'.")
    _add_x_flag(parser)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="app.py", description="Frank-Wolfe con precios duales y análisis de sensibilidad.")
    parser.add_argument("--log-level", default=LOG_LEVEL, help="Nivel de logging (stderr).")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    solve = commands.add_parser("solve", help="Resolver con Frank-Wolfe.")
    solve.add_argument("problem", help="Archivo JSON del problema.")
    _add_solver_flags(solve)
    solve.add_argument("--trace", help="CSV de traza (iteration, f, gap, lower_bound, best_lower_bound).")

    sensitivity = commands.add_parser("sensitivity", help="Cotas del valor óptimo para b'.")
    sensitivity.add_argument("problem")
    _add_point_flags(sensitivity)
    _add_solver_flags(sensitivity)

    sweep_cmd = commands.add_parser("sweep", help="Barrido de perturbaciones de b.")
    sweep_cmd.add_argument("problem")
    sweep_cmd.add_argument("--row", type=int, action="append", required=True, help="Fila de b a perturbar (base 0).")
    sweep_cmd.add_argument("--mode", choices=("single", "uniform"), default="single")
    sweep_cmd.add_argument("--delta-min", type=float, required=True)
    sweep_cmd.add_argument("--delta-max", type=float, required=True)
    sweep_cmd.add_argument("--steps", type=int, required=True, help="Número de puntos de la malla (>= 2).")
    sweep_cmd.add_argument("--out", required=True, help="Archivo CSV de salida.")
    sweep_cmd.add_argument("--no-exact", action="store_true", help="No calcular f* exacto con el oráculo.")
    _add_x_flag(sweep_cmd)
    _add_solver_flags(sweep_cmd)

    verify = commands.add_parser("verify", help="Auditar las cotas contra el oráculo exacto.")
    verify.add_argument("problem")
    _add_point_flags(verify)
    _add_solver_flags(verify)
    verify.add_argument("--smoothness-scale", type=float, default=1.0, help="Multiplica L antes de auditar.")
    verify.add_argument("--audit-tol", type=float, default=AUDIT_TOL)
    return parser


def _solve(problem: Problem, args) -> FWResult:
    cfg = FWConfig(max_iter=args.max_iter, gap_tol=args.epsilon, record_trace=bool(getattr(args, "trace", None)))
    x0 = problem.x0 if problem.x0 is not None else default_start(problem.polytope)
    return run_fw(problem.objective, problem.polytope, x0, cfg, tol=args.tol)


def _analysis_point(problem: Problem, args) -> np.ndarray:
    if args.x == FROM_SOLVE:
        result = _solve(problem, args)
        if not result.converged:
            logger.warning("el punto de análisis no alcanzó epsilon (gap=%.3e)", result.fw_gap)
        return np.array(result.x)
    return parse_vector(args.x, "x", problem.polytope.n)


def solve_report(problem: Problem, result: FWResult) -> Dict:
    return {
        "name": problem.name,
        "x": to_jsonable(result.x),
        "f_value": result.f_value,
        "fw_gap": result.fw_gap,
        "lower_bound": result.lower_bound,
        "best_lower_bound": result.best_lower_bound,
        "iterations": result.iterations,
        "converged": result.converged,
        "decomposition": [{"vertex": to_jsonable(v), "weight": w} for v, w in result.decomposition],
        "lambda": to_jsonable(result.last_pair.lam),
        "fw_vertex": to_jsonable(result.last_pair.v),
    }


def cmd_solve(args) -> int:
    problem = load_problem(args.problem)
    result = _solve(problem, args)
    sys.stdout.write(dump_json(solve_report(problem, result)))
    if args.trace:
        write_csv(trace_frame(result), args.trace)
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def cmd_sensitivity(args) -> int:
    problem = load_problem(args.problem)
    P = problem.polytope
    b_prime = parse_vector(args.b_prime, "b_prime", P.m)
    x = _analysis_point(problem, args)
    report = analyze(problem.objective, P, b_prime, x, args.tol)
    document = to_jsonable(report)
    document["verified"] = report.verified
    sys.stdout.write(dump_json(document))
    if not report.verified:
        logger.warning("hipótesis no verificadas; reduzca |b - b'| (violadas: %s)", list(report.violated_rows))
        return EXIT_UNVERIFIED
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.steps < 2:
        raise CliInputError(f"--steps debe ser >= 2, recibido {args.steps}")
    if not (np.isfinite(args.delta_min) and np.isfinite(args.delta_max)) or args.delta_min > args.delta_max:
        raise CliInputError("--delta-min debe ser finito y <= --delta-max")
    problem = load_problem(args.problem)
    P, f = problem.polytope, problem.objective
    spec = SweepSpec(
        row_indices=tuple(args.row),
        deltas=tuple(np.linspace(args.delta_min, args.delta_max, args.steps).tolist()),
        mode=args.mode,
    )
    direction = spec.direction(P.m)
    x = _analysis_point(problem, args)
    frame = sweep(f, P, x, spec, args.tol, exact=not args.no_exact)

    # Marca de bisección: mayor |delta| en cada sentido con ambas hipótesis verificadas
    upper = certified_delta(f, P, x, direction, args.delta_max, args.tol) if args.delta_max > 0 else 0.0
    lower = certified_delta(f, P, x, direction, args.delta_min, args.tol) if args.delta_min < 0 else 0.0
    low_mark = 0.0 if lower is None else lower
    high_mark = 0.0 if upper is None else upper
    frame["within_certified_range"] = (frame["delta"] >= low_mark) & (frame["delta"] <= high_mark)
    write_csv(frame, args.out)

    summary = {
        "out": args.out,
        "rows": list(spec.row_indices),
        "mode": spec.mode,
        "points": len(frame),
        "certified_delta_min": lower,
        "certified_delta_max": upper,
    }
    sys.stdout.write(dump_json(summary))
    return EXIT_OK


def cmd_verify(args) -> int:
    problem = load_problem(args.problem)
    P, f = problem.polytope, problem.objective
    check_guard(P)
    b_prime = parse_vector(args.b_prime, "b_prime", P.m)
    x = _analysis_point(problem, args)
    smoothness = None if args.smoothness_scale == 1.0 else args.smoothness_scale * f.smoothness_constant()
    audit = sandwich_audit(f, P, b_prime, x, tol=args.audit_tol, smoothness=smoothness, feasibility_tol=args.tol)
    document = {
        "passed": audit.passed,
        "f_star": audit.f_star,
        "f_star_prime": audit.f_star_prime,
        "checks": [
            {
                "name": check.name,
                "lhs": check.lhs,
                "rhs": check.rhs,
                "slack": check.slack,
                "evaluated": check.evaluated,
                "passed": check.passed,
            }
            for check in audit.checks
        ],
        "report": to_jsonable(audit.report),
    }
    sys.stdout.write(dump_json(document))
    return EXIT_OK if audit.passed else EXIT_UNVERIFIED


COMMANDS = {
    "solve": cmd_solve,
    "sensitivity": cmd_sensitivity,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Parses argv, runs one command and returns its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        configure_logging(args.log_level)
        return COMMANDS[args.command](args)
    except SizeGuardError as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return EXIT_SIZE_GUARD
    except (CliInputError, FWSensError, ValueError) as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
