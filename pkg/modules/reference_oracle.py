"""Brute-force reference solvers used to audit the bounds at desk scale.

Nothing here shares code paths with the simplex oracle beyond the Polytope
type: QPs are solved by enumerating KKT systems over row subsets and LPs by
enumerating vertices.
"""
import itertools
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .errors import InfeasibleError, NumericalBreakdownError, SizeGuardError, UnboundedError
from .geometry import Polytope, as_point, assert_bounded, classify_rows, contains, enumerate_vertices, perturb_rhs
from .lp_oracle import CertificateReport, PrimalDualPair, verify_certificate
from .objective import QuadraticObjective
from .sensitivity import SensitivityReport, analyze
from .settings import AUDIT_TOL, CERTIFICATE_TOL, FEASIBILITY_TOL, ORACLE_MAX_DIM, ORACLE_MAX_ROWS

logger = logging.getLogger(__name__)

MULTIPLIER_TOL = 1e-9
KKT_CONDITION_LIMIT = 1e12
TIE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ExactSolution:
    x_star: np.ndarray
    f_star: float
    active_rows: Tuple[int, ...]
    kkt_multipliers: np.ndarray


@dataclass(frozen=True, eq=False)
class LPEnumeration:
    value: float
    argmin_vertices: Tuple[np.ndarray, ...]


@dataclass(frozen=True)
class InequalityCheck:
    """One inequality lhs <= rhs of the sandwich; slack = rhs - lhs."""

    name: str
    lhs: Optional[float]
    rhs: Optional[float]
    evaluated: bool
    tol: float

    @property
    def slack(self) -> Optional[float]:
        if not self.evaluated:
            return None
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        return not self.evaluated or self.slack >= -self.tol


@dataclass(frozen=True, eq=False)
class AuditReport:
    report: SensitivityReport
    f_star: float
    f_star_prime: float
    checks: Tuple[InequalityCheck, ...]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def check(self, name: str) -> InequalityCheck:
        for item in self.checks:
            if item.name == name:
                return item
        raise KeyError(name)


def check_guard(P: Polytope) -> None:
    """Raises SizeGuardError when P exceeds the enumeration limits."""
    if P.n > ORACLE_MAX_DIM or P.m > ORACLE_MAX_ROWS:
        raise SizeGuardError(
            f"oráculo limitado a n <= {ORACLE_MAX_DIM}, m <= {ORACLE_MAX_ROWS}; recibido n={P.n}, m={P.m}"
        )


def _kkt_candidate(f: QuadraticObjective, P: Polytope, rows: Tuple[int, ...]):
    """Solves Qx + c = -A_S^T mu, A_S x = b_S; None when the system is singular."""
    n, k = P.n, len(rows)
    A_S = P.A[list(rows)]
    K = np.zeros((n + k, n + k))
    K[:n, :n] = f.Q
    K[:n, n:] = A_S.T
    K[n:, :n] = A_S
    rhs = np.concatenate([-f.c_lin, P.b[list(rows)]])
    if np.linalg.cond(K) > KKT_CONDITION_LIMIT:
        return None
    try:
        solution = np.linalg.solve(K, rhs)
    except np.linalg.LinAlgError:
        return None
    return solution[:n], solution[n:]


def kkt_residuals(f: QuadraticObjective, P: Polytope, solution: ExactSolution, tol: float = CERTIFICATE_TOL) -> CertificateReport:
    """Residuals of grad f(x*) = -lam A, lam >= 0, lam(b - Ax*) = 0, Ax* <= b.

    This is the LP certificate of x* for the linearization c = grad f(x*).
    """
    gradient = f.grad(solution.x_star)
    pair = PrimalDualPair(
        v=solution.x_star,
        lam=solution.kkt_multipliers,
        value=float(gradient @ solution.x_star),
    )
    return verify_certificate(P, gradient, pair, tol)


def exact_qp_solve(f: QuadraticObjective, P: Polytope, tol: float = FEASIBILITY_TOL) -> ExactSolution:
    """Exact minimizer of a convex quadratic over a small polytope by KKT enumeration.

    Every row subset S with |S| <= n is tried (larger subsets always give
    singular KKT systems); candidates feasible for P with multipliers >= -1e-9
    are kept and the one with least f wins, ties going to the lexicographically
    smallest x*.

    Raises:
        SizeGuardError: n > 8 or m > 16.
        InfeasibleError: P is empty.
        UnboundedError: P is not compact.
        NumericalBreakdownError: the winner fails its own KKT certificate.
    """
    check_guard(P)
    if f.dim != P.n:
        raise ValueError(f"el objetivo tiene dimensión {f.dim} y el poliedro {P.n}")
    if not assert_bounded(P):
        raise UnboundedError(f"el poliedro {P!r} no es acotado")

    best_x, best_value, best_rows, best_mu = None, np.inf, (), None
    for k in range(P.n + 1):
        for rows in itertools.combinations(range(P.m), k):
            candidate = _kkt_candidate(f, P, rows)
            if candidate is None:
                continue
            x, mu = candidate
            if np.any(mu < -MULTIPLIER_TOL) or not contains(P, x, tol):
                continue
            value = f.eval(x)
            better = value < best_value - TIE_TOL
            tie = abs(value - best_value) <= TIE_TOL and tuple(x.tolist()) < tuple(best_x.tolist())
            if better or tie:
                best_x, best_value, best_rows, best_mu = x, value, rows, mu

    if best_x is None:
        raise InfeasibleError(f"ningún punto KKT factible en {P!r}")

    multipliers = np.zeros(P.m)
    multipliers[list(best_rows)] = np.maximum(best_mu, 0.0)
    x_star = best_x + 0.0
    solution = ExactSolution(
        x_star=x_star,
        f_star=f.eval(x_star),
        active_rows=classify_rows(P, x_star, tol).equal_rows,
        kkt_multipliers=multipliers,
    )
    residuals = kkt_residuals(f, P, solution)
    if not residuals.valid:
        raise NumericalBreakdownError(f"el certificado KKT del óptimo exacto falla: {residuals}")
    return solution


def brute_force_lp(P: Polytope, c, tie_tol: float = 1e-9) -> LPEnumeration:
    """min c.v over the enumerated vertices, with every minimizing vertex."""
    c = as_point(P, c, "c")
    vertices = enumerate_vertices(P)
    if not vertices:
        raise InfeasibleError(f"el poliedro {P!r} no tiene vértices")
    values = [float(c @ v) for v in vertices]
    value = min(values)
    winners = tuple(v for v, val in zip(vertices, values) if val <= value + tie_tol)
    return LPEnumeration(value=value, argmin_vertices=winners)


def sandwich_audit(
    f: QuadraticObjective,
    P: Polytope,
    b_prime,
    x,
    tol: float = AUDIT_TOL,
    smoothness: Optional[float] = None,
    feasibility_tol: float = FEASIBILITY_TOL,
) -> AuditReport:
    """Substitutes the exact optima of P and P' into every inequality of the sandwich bounds.

    Inequalities whose hypotheses fail (x' not in P', no common dual solution)
    are reported as not evaluated. A check passes when its slack is >= -tol.
    """
    check_guard(P)
    report = analyze(f, P, b_prime, x, feasibility_tol, smoothness=smoothness)
    f_star = exact_qp_solve(f, P, feasibility_tol).f_star
    f_star_prime = exact_qp_solve(f, perturb_rhs(P, b_prime), feasibility_tol).f_star

    feasible = report.x_prime_feasible
    common = report.common_dual
    eq3 = report.eq3
    checks: List[InequalityCheck] = [
        InequalityCheck("eq1.lower", report.eq1.lower, f_star, True, tol),
        InequalityCheck("eq1.upper", f_star, report.eq1.upper, True, tol),
        InequalityCheck("eq2.lower", report.eq2.lower, f_star_prime, True, tol),
        InequalityCheck("eq2.middle", f_star_prime, report.f_x_prime, feasible, tol),
        InequalityCheck("eq2.upper", report.f_x_prime, report.eq2.upper, feasible, tol),
        InequalityCheck("eq3.lower", eq3.lower if common else None, f_star_prime, common, tol),
        InequalityCheck("eq3.middle", f_star_prime, report.f_x_prime, common and feasible, tol),
        InequalityCheck("eq3.upper", report.f_x_prime, eq3.upper if common else None, common and feasible, tol),
    ]
    audit = AuditReport(report=report, f_star=f_star, f_star_prime=f_star_prime, checks=tuple(checks))
    for check in audit.checks:
        if not check.passed:
            logger.warning("desigualdad %s violada: holgura %.3e", check.name, check.slack)
    return audit
