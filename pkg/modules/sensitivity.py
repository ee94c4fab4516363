"""Convex sensitivity analysis of min_{z in P} f(z) under right-hand-side perturbations.

Given x in P, the FW vertex v of P and the FW vertex v' of P' = {z : Az <= b'}
(both at c = grad f(x)), the optimal value over P' is sandwiched by

    f(x) - gap + grad f(x)(v' - v)  <=  min_{P'} f  <=  f(x')  <=  f(x) + grad f(x)(v' - v) + L/2 |v' - v|^2

with x' = x - v + v' (the upper part needs x' in P'). When the dual prices lam of
v in P also certify v' in P', grad f(x)(v' - v) = lam(b - b') and the same
interval is expressed through the dual prices.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import pandas as pd

from .errors import DimensionError, InfeasibleError, SizeGuardError, UnboundedError
from .fw_solver import fw_gap
from .geometry import Polytope, as_point, classify_rows, perturb_rhs
from .lp_oracle import PrimalDualPair, solve_lmo
from .objective import SmoothObjective
from .settings import FEASIBILITY_TOL

logger = logging.getLogger(__name__)

SWEEP_MODES = ("single", "uniform")


@dataclass(frozen=True)
class Interval:
    """Closed interval; upper is None when the hypothesis behind it failed."""

    lower: float
    upper: Optional[float]

    @property
    def width(self) -> Optional[float]:
        return None if self.upper is None else self.upper - self.lower

    def contains(self, value: float, tol: float = 0.0) -> bool:
        above = self.lower - tol <= value
        below = self.upper is None or value <= self.upper + tol
        return above and below


@dataclass(frozen=True)
class TranslationCheck:
    feasible: bool
    violated_rows: Tuple[int, ...]
    violated_equal_rows: Tuple[int, ...]
    violated_strict_rows: Tuple[int, ...]


@dataclass(frozen=True, eq=False)
class SensitivityReport:
    x: np.ndarray
    f_x: float
    gap: float
    v: np.ndarray
    lam: np.ndarray
    v_prime: np.ndarray
    lam_prime: np.ndarray
    b: np.ndarray
    b_prime: np.ndarray
    common_dual: bool
    x_prime: np.ndarray
    x_prime_feasible: bool
    violated_rows: Tuple[int, ...]
    minimal_face_ok: bool
    f_x_prime: float
    smoothness: float
    linear_shift: float
    predicted_change: float
    curvature_term: float
    eq1: Interval
    eq2: Interval
    eq3: Optional[Interval]

    @property
    def verified(self) -> bool:
        """Both hypotheses of the dual-price bounds hold."""
        return self.common_dual and self.x_prime_feasible


@dataclass(frozen=True)
class SweepSpec:
    """Grid of perturbations b' = b + delta * e_S for the rows S.

    mode "single" perturbs exactly one row; "uniform" adds delta to every selected row.
    """

    row_indices: Tuple[int, ...]
    deltas: Tuple[float, ...]
    mode: str = "single"

    def __post_init__(self):
        if self.mode not in SWEEP_MODES:
            raise ValueError(f"mode debe ser uno de {SWEEP_MODES}, recibido {self.mode!r}")
        if not self.row_indices:
            raise ValueError("row_indices no puede estar vacío")
        if self.mode == "single" and len(self.row_indices) != 1:
            raise ValueError("el modo 'single' perturba exactamente una fila")
        if not np.all(np.isfinite(self.deltas)):
            raise ValueError("deltas debe contener valores finitos")

    def direction(self, m: int) -> np.ndarray:
        for i in self.row_indices:
            if not 0 <= i < m:
                raise DimensionError(f"índice de fila {i} fuera de rango [0, {m})")
        direction = np.zeros(m)
        direction[list(self.row_indices)] = 1.0
        return direction


def check_translation(
    x,
    v,
    v_prime,
    P_prime: Polytope,
    tol: float = FEASIBILITY_TOL,
    P: Optional[Polytope] = None,
) -> TranslationCheck:
    """Tests x' = x - v + v' in P'; violated rows are classified by the rows tight at x in P.

    Rows tight at x can only be violated by rounding; rows with slack are
    violated when b' is too far from b. Without P the rows tight at x in P'
    are used for the classification.
    """
    x = as_point(P_prime, x)
    x_prime = x - as_point(P_prime, v, "v") + as_point(P_prime, v_prime, "v_prime")
    violated = tuple(int(i) for i in np.flatnonzero(P_prime.A @ x_prime - P_prime.b > tol))
    equal = set(classify_rows(P if P is not None else P_prime, x, tol).equal_rows)
    return TranslationCheck(
        feasible=not violated,
        violated_rows=violated,
        violated_equal_rows=tuple(i for i in violated if i in equal),
        violated_strict_rows=tuple(i for i in violated if i not in equal),
    )


def check_common_dual(pair: PrimalDualPair, P_prime: Polytope, v_prime, tol: float = FEASIBILITY_TOL) -> bool:
    """True iff pair.lam also certifies v' in P'.

    Stationarity c = -lam A does not involve b, so only feasibility of v' and
    complementary slackness lam(b' - Av') = 0 are checked.
    """
    v_prime = as_point(P_prime, v_prime, "v_prime")
    slack = P_prime.b - P_prime.A @ v_prime
    if np.any(slack < -tol):
        return False
    return bool(np.max(np.abs(pair.lam * slack)) <= tol)


def minimal_face_check(P: Polytope, x, v, tol: float = FEASIBILITY_TOL) -> bool:
    """True iff every row tight at x is tight at v, i.e. v lies in the minimal face of x."""
    tight_at_x = classify_rows(P, x, tol).equal_rows
    tight_at_v = set(classify_rows(P, v, tol).equal_rows)
    return all(i in tight_at_v for i in tight_at_x)


def certify_optimality(f: SmoothObjective, P: Polytope, x, tol: float = FEASIBILITY_TOL) -> Tuple[bool, PrimalDualPair]:
    """x is optimal iff it minimizes its own linearization; the LMO pair carries its dual prices."""
    gap, pair = fw_gap(f, P, x, tol)
    return gap <= tol, pair


def analyze(
    f: SmoothObjective,
    P: Polytope,
    b_prime,
    x,
    tol: float = FEASIBILITY_TOL,
    smoothness: Optional[float] = None,
) -> SensitivityReport:
    """Bounds min over P' = {z : Az <= b'} of f from an (approximately) optimal x in P.

    Every field is populated even when a hypothesis fails; bounds that depend on
    a failed hypothesis are left out (upper ends need x' in P', the dual-price
    interval needs a common dual solution).

    Args:
        smoothness: overrides f.smoothness_constant() as L.

    Raises:
        InfeasiblePointError: x is not in P.
        InfeasibleError, UnboundedError: P' is empty or not compact.
    """
    P_prime = perturb_rhs(P, b_prime)
    gap, pair = fw_gap(f, P, x, tol)
    x = as_point(P, x)
    gradient = f.grad(x)
    pair_prime = solve_lmo(P_prime, gradient)

    L = f.smoothness_constant() if smoothness is None else float(smoothness)
    f_x = f.eval(x)
    step = pair_prime.v - pair.v
    linear_shift = float(gradient @ step)
    predicted_change = float(pair.lam @ (P.b - P_prime.b))
    curvature = 0.5 * L * float(step @ step)
    x_prime = x - pair.v + pair_prime.v

    translation = check_translation(x, pair.v, pair_prime.v, P_prime, tol, P=P)
    common = check_common_dual(pair, P_prime, pair_prime.v, tol)
    face_ok = minimal_face_check(P, x, pair.v, tol)

    eq1 = Interval(f_x - gap, f_x)
    eq2 = Interval(
        f_x - gap + linear_shift,
        f_x + linear_shift + curvature if translation.feasible else None,
    )
    eq3 = None
    if common:
        eq3 = Interval(
            f_x - gap + predicted_change,
            f_x + predicted_change + curvature if translation.feasible else None,
        )
    if not translation.feasible:
        logger.info("x' fuera de P' (filas violadas %s); cota superior no verificada", translation.violated_rows)
    if not common:
        logger.info("lambda no es solución dual común para v'; se omite la cota con precios duales")

    return SensitivityReport(
        x=x,
        f_x=f_x,
        gap=gap,
        v=pair.v,
        lam=pair.lam,
        v_prime=pair_prime.v,
        lam_prime=pair_prime.lam,
        b=P.b,
        b_prime=P_prime.b,
        common_dual=common,
        x_prime=x_prime,
        x_prime_feasible=translation.feasible,
        violated_rows=translation.violated_rows,
        minimal_face_ok=face_ok,
        f_x_prime=f.eval(x_prime),
        smoothness=L,
        linear_shift=linear_shift,
        predicted_change=predicted_change,
        curvature_term=curvature,
        eq1=eq1,
        eq2=eq2,
        eq3=eq3,
    )


def _flags_hold(f: SmoothObjective, P: Polytope, x, direction: np.ndarray, delta: float, tol: float) -> bool:
    try:
        report = analyze(f, P, P.b + delta * direction, x, tol)
    except (InfeasibleError, UnboundedError) as e:
        logger.debug("delta=%.6g descartado: %s", delta, e)
        return False
    return report.verified


def certified_delta(
    f: SmoothObjective,
    P: Polytope,
    x,
    direction,
    delta: float,
    tol: float = FEASIBILITY_TOL,
    min_delta: float = 1e-6,
    refine_steps: int = 30,
) -> Optional[float]:
    """Largest step found along b + delta * direction at which both hypotheses hold.

    delta is halved until common_dual and x_prime_feasible hold, then the
    boundary between the last failing and first passing step is refined by
    bisection. The sign of delta is kept.

    Returns:
        float or None: None when no |delta| >= min_delta qualifies.
    """
    direction = np.asarray(direction, dtype=float)
    if delta == 0:
        return 0.0
    failing = None
    current = float(delta)
    while abs(current) >= min_delta:
        if _flags_hold(f, P, x, direction, current, tol):
            break
        failing = current
        current /= 2.0
    else:
        return None
    if failing is None:
        return current
    good, bad = current, failing
    for _ in range(refine_steps):
        middle = 0.5 * (good + bad)
        if _flags_hold(f, P, x, direction, middle, tol):
            good = middle
        else:
            bad = middle
    return good


def sweep(
    f: SmoothObjective,
    P: Polytope,
    x,
    spec: SweepSpec,
    tol: float = FEASIBILITY_TOL,
    exact: bool = True,
) -> pd.DataFrame:
    """Evaluates the dual-price bounds on the grid of spec, one row per delta in the given order.

    Columns: delta, gap, lambda_<i> per selected row, predicted_change,
    eq3_lower, eq3_upper, exact_fstar (empty when the oracle guard refuses or
    exact is False), common_dual, x_prime_feasible. A delta whose P' is empty
    or unbounded keeps its row with empty bounds and both flags False.
    """
    # Importación local: el oráculo de referencia importa este módulo
    from .objective import QuadraticObjective
    from .reference_oracle import exact_qp_solve

    direction = spec.direction(P.m)
    exact = exact and isinstance(f, QuadraticObjective)
    lambda_columns = [f"lambda_{i}" for i in spec.row_indices]
    columns = (
        ["delta", "gap"]
        + lambda_columns
        + ["predicted_change", "eq3_lower", "eq3_upper", "exact_fstar", "common_dual", "x_prime_feasible"]
    )
    rows = []
    for delta in spec.deltas:
        b_prime = P.b + float(delta) * direction
        row = dict.fromkeys(columns)
        row.update(delta=float(delta), common_dual=False, x_prime_feasible=False)
        try:
            report = analyze(f, P, b_prime, x, tol)
        except (InfeasibleError, UnboundedError) as e:
            logger.warning("delta=%.6g: %s", delta, e)
            rows.append(row)
            continue
        row["gap"] = report.gap
        for i, name in zip(spec.row_indices, lambda_columns):
            row[name] = float(report.lam[i])
        row["predicted_change"] = report.predicted_change
        if report.eq3 is not None:
            row["eq3_lower"] = report.eq3.lower
            row["eq3_upper"] = report.eq3.upper
        if exact:
            try:
                row["exact_fstar"] = exact_qp_solve(f, perturb_rhs(P, b_prime)).f_star
            except SizeGuardError:
                exact = False
                logger.info("instancia demasiado grande para el oráculo exacto; columna exact_fstar vacía")
        row["common_dual"] = report.common_dual
        row["x_prime_feasible"] = report.x_prime_feasible
        rows.append(row)
    return pd.DataFrame(rows, columns=columns)
