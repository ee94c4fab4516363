"""Vanilla Frank-Wolfe with exact line search, FW-gap stopping and vertex decompositions."""
import logging
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
import pandas as pd

from .errors import InfeasiblePointError
from .geometry import Polytope, as_point, contains
from .lp_oracle import PrimalDualPair, solve_lmo
from .objective import QuadraticObjective, SmoothObjective
from .settings import DEFAULT_GAP_TOL, DEFAULT_MAX_ITER, FEASIBILITY_TOL, WEIGHT_PRUNE_TOL

logger = logging.getLogger(__name__)

STEP_RULES = ("exact", "agnostic")
CURVATURE_TOL = 1e-14
TRACE_COLUMNS = ["iteration", "f", "gap", "lower_bound", "best_lower_bound"]


@dataclass(frozen=True)
class FWConfig:
    """Run configuration.

    Args:
        max_iter: cap on the number of FW updates (>= 1).
        gap_tol: stop once the FW gap is <= gap_tol (> 0).
        record_trace: keep one TraceRecord per visited iterate.
        step_rule: "exact" line search (quadratics) or the "agnostic" 2/(t+2) rule.
    """

    max_iter: int = DEFAULT_MAX_ITER
    gap_tol: float = DEFAULT_GAP_TOL
    record_trace: bool = False
    step_rule: str = "exact"

    def __post_init__(self):
        if isinstance(self.max_iter, bool) or not isinstance(self.max_iter, (int, np.integer)) or self.max_iter < 1:
            raise ValueError(f"max_iter debe ser un entero >= 1, recibido {self.max_iter!r}")
        if not np.isfinite(self.gap_tol) or self.gap_tol <= 0:
            raise ValueError(f"gap_tol debe ser positivo, recibido {self.gap_tol!r}")
        if self.step_rule not in STEP_RULES:
            raise ValueError(f"step_rule debe ser uno de {STEP_RULES}, recibido {self.step_rule!r}")


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    f: float
    gap: float
    lower_bound: float
    best_lower_bound: float


@dataclass(frozen=True, eq=False)
class FWResult:
    x: np.ndarray
    fw_gap: float
    lower_bound: float
    best_lower_bound: float
    f_value: float
    iterations: int
    converged: bool
    decomposition: Tuple[Tuple[np.ndarray, float], ...]
    last_pair: PrimalDualPair
    trace: Optional[Tuple[TraceRecord, ...]] = None


def _require_feasible(P: Polytope, x, tol: float, name: str = "x") -> np.ndarray:
    x = as_point(P, x, name)
    if not contains(P, x, tol):
        raise InfeasiblePointError(f"{name} no pertenece a P (tol={tol:.1e})")
    return x


def fw_gap(f: SmoothObjective, P: Polytope, x, tol: float = FEASIBILITY_TOL) -> Tuple[float, PrimalDualPair]:
    """Frank-Wolfe gap max_{z in P} grad f(x).(x - z) and the LMO certificate at grad f(x)."""
    x = _require_feasible(P, x, tol)
    gradient = f.grad(x)
    pair = solve_lmo(P, gradient)
    return float(gradient @ (x - pair.v)), pair


def exact_line_search(f: QuadraticObjective, x, d) -> float:
    """argmin over gamma in [0, 1] of f(x + gamma d) for a quadratic f."""
    x = np.asarray(x, dtype=float)
    d = np.asarray(d, dtype=float)
    slope = float(f.grad(x) @ d)
    curvature = f.curvature(d)
    if curvature > CURVATURE_TOL:
        return float(np.clip(-slope / curvature, 0.0, 1.0))
    return 1.0 if slope < 0 else 0.0


def default_start(P: Polytope) -> np.ndarray:
    """Vertex returned by the LMO for the zero objective; a deterministic x0."""
    return np.array(solve_lmo(P, np.zeros(P.n)).v)


def _step_size(f: SmoothObjective, x: np.ndarray, d: np.ndarray, t: int, cfg: FWConfig) -> float:
    if cfg.step_rule == "agnostic":
        return 2.0 / (t + 2.0)
    return exact_line_search(f, x, d)


def _update_weights(weights: Dict[tuple, float], atoms: Dict[tuple, np.ndarray], v: np.ndarray, gamma: float) -> None:
    key = tuple(v.tolist())
    for k in weights:
        weights[k] *= 1.0 - gamma
    weights[key] = weights.get(key, 0.0) + gamma
    atoms.setdefault(key, np.array(v))
    for k in [k for k, w in weights.items() if w < WEIGHT_PRUNE_TOL]:
        del weights[k]
        del atoms[k]
    total = sum(weights.values())
    for k in weights:
        weights[k] /= total


def run_fw(f: SmoothObjective, P: Polytope, x0, cfg: FWConfig = FWConfig(), tol: float = FEASIBILITY_TOL) -> FWResult:
    """Frank-Wolfe algorithm: v_t from the LMO at grad f(x_t), gamma_t by line search,
    x_{t+1} = x_t + gamma_t (v_t - x_t).

    Stops when the gap at the current iterate is <= cfg.gap_tol or after
    cfg.max_iter updates. The decomposition starts with x0 as its only atom
    (a vertex when x0 comes from default_start) and is updated as
    weights * (1 - gamma) plus gamma on v_t.

    Raises:
        InfeasiblePointError: x0 is not in P.
        ValueError: step_rule "exact" with a non-quadratic objective.
    """
    if cfg.step_rule == "exact" and not isinstance(f, QuadraticObjective):
        raise ValueError("la búsqueda lineal exacta requiere un QuadraticObjective; use step_rule='agnostic'")
    x = np.array(_require_feasible(P, x0, tol, "x0"))

    start_key = tuple(x.tolist())
    weights: Dict[tuple, float] = {start_key: 1.0}
    atoms: Dict[tuple, np.ndarray] = {start_key: x.copy()}
    trace = [] if cfg.record_trace else None
    best_lower = -np.inf
    iterations = 0

    while True:
        f_value = f.eval(x)
        gap, pair = fw_gap(f, P, x, tol)
        lower = f_value - gap
        best_lower = max(best_lower, lower)
        if trace is not None:
            trace.append(TraceRecord(iterations, f_value, gap, lower, best_lower))
        if iterations % 100 == 0:
            logger.debug("iteración %d: f=%.12g gap=%.3e", iterations, f_value, gap)
        converged = gap <= cfg.gap_tol
        if converged or iterations >= cfg.max_iter:
            break

        d = pair.v - x
        gamma = _step_size(f, x, d, iterations, cfg)
        x = pair.v.copy() if gamma == 1.0 else x + gamma * d
        if gamma > 0.0:
            _update_weights(weights, atoms, pair.v, gamma)
        iterations += 1

    if converged:
        logger.info("FW convergió en %d iteraciones (gap=%.3e)", iterations, gap)
    else:
        logger.warning("FW alcanzó max_iter=%d sin convergencia (gap=%.3e)", cfg.max_iter, gap)

    x.setflags(write=False)
    decomposition = tuple((atoms[k], weights[k]) for k in weights)
    return FWResult(
        x=x,
        fw_gap=gap,
        lower_bound=lower,
        best_lower_bound=best_lower,
        f_value=f_value,
        iterations=iterations,
        converged=converged,
        decomposition=decomposition,
        last_pair=pair,
        trace=tuple(trace) if trace is not None else None,
    )


def optimal_value_bounds(f: SmoothObjective, P: Polytope, x, tol: float = FEASIBILITY_TOL) -> Tuple[float, float]:
    """(f(x) - gap(x), f(x)), an interval containing min_{z in P} f(z)."""
    gap, _ = fw_gap(f, P, x, tol)
    value = f.eval(x)
    return value - gap, value


def trace_frame(result: FWResult) -> pd.DataFrame:
    """The run trace as a DataFrame with columns iteration, f, gap, lower_bound, best_lower_bound."""
    if result.trace is None:
        return pd.DataFrame(columns=TRACE_COLUMNS)
    return pd.DataFrame([vars(record) for record in result.trace], columns=TRACE_COLUMNS)
