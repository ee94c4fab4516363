"""Linear minimization oracle over {z : Az <= b} with dual prices.

The oracle runs a dense two-phase simplex method on the dual standard form

    min  b . lam   s.t.  A^T lam = -c,  lam >= 0

whose optimal basis B (n rows of A) gives both certificates at once: the dual
prices lam_B = A_B^{-T}(-c) and the vertex v = A_B^{-1} b_B of P. Bland's rule
chooses entering and leaving variables, so the method terminates and identical
inputs always produce identical (v, lam).
"""
import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .errors import DimensionError, InfeasibleError, NumericalBreakdownError, UnboundedError
from .geometry import Polytope, as_point
from .settings import CERTIFICATE_TOL, FEASIBILITY_TOL, PIVOT_TOL

logger = logging.getLogger(__name__)

MAX_PIVOTS = 10_000

OPTIMAL = "optimal"
DUAL_INFEASIBLE = "dual_infeasible"
DUAL_UNBOUNDED = "dual_unbounded"


@dataclass(frozen=True, eq=False)
class PrimalDualPair:
    """Vertex minimizer v, dual prices lam (one per row) and the optimal value c.v = -lam.b."""

    v: np.ndarray
    lam: np.ndarray
    value: float
    basis: Tuple[int, ...] = ()


@dataclass(frozen=True)
class CertificateReport:
    """Largest residual of each strong-duality condition for a candidate pair."""

    stationarity: float
    value_equation: float
    complementary_slackness: float
    primal_feasibility: float
    dual_nonnegativity: float
    tol: float

    @property
    def valid(self) -> bool:
        return max(
            self.stationarity,
            self.value_equation,
            self.complementary_slackness,
            self.primal_feasibility,
            self.dual_nonnegativity,
        ) <= self.tol


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    column = T[:, col].copy()
    column[row] = 0.0
    T -= np.outer(column, T[row])


def _run_simplex(T: np.ndarray, basis: List[int], cost: np.ndarray, pivot_tol: float) -> bool:
    """Minimizes cost over the tableau in place using Bland's rule.

    Returns:
        bool: True at optimality, False if the objective is unbounded below.
    """
    n_cols = T.shape[1] - 1
    for _ in range(MAX_PIVOTS):
        reduced = cost - cost[basis] @ T[:, :n_cols]
        entering = np.flatnonzero(reduced < -pivot_tol)
        if entering.size == 0:
            return True
        col = int(entering[0])
        column = T[:, col]
        rows = np.flatnonzero(column > pivot_tol)
        if rows.size == 0:
            return False
        ratios = T[rows, -1] / column[rows]
        tied = rows[ratios <= ratios.min() + pivot_tol]
        # Regla de Bland: ante empate sale la variable básica de menor índice
        leave = int(min(tied, key=lambda r: basis[r]))
        _pivot(T, leave, col)
        basis[leave] = col
        rhs = T[:, -1]
        rhs[(rhs < 0.0) & (rhs > -pivot_tol)] = 0.0
    raise NumericalBreakdownError(f"el simplex no terminó en {MAX_PIVOTS} pivotes")


def _two_phase(A: np.ndarray, b: np.ndarray, c: np.ndarray, pivot_tol: float) -> Tuple[str, List[int]]:
    """Solves min b.lam s.t. A^T lam = -c, lam >= 0 for an A with full column rank."""
    m, n = A.shape
    M = A.T.copy()
    r = -np.asarray(c, dtype=float)
    # Filas con lado derecho <= 0 se cambian de signo (incluidas las nulas):
    # esta convención fija qué vértice se devuelve cuando hay empates.
    flip = r <= 0.0
    M[flip] *= -1.0
    r = np.abs(r)

    T = np.hstack([M, np.eye(n), r[:, None]])
    basis = list(range(m, m + n))
    phase_one_cost = np.concatenate([np.zeros(m), np.ones(n)])
    _run_simplex(T, basis, phase_one_cost, pivot_tol)

    artificial_rows = [i for i, var in enumerate(basis) if var >= m]
    infeasibility = float(sum(T[i, -1] for i in artificial_rows))
    if infeasibility > FEASIBILITY_TOL * max(1.0, float(np.max(np.abs(r), initial=0.0))):
        return DUAL_INFEASIBLE, basis

    # Sacar de la base las artificiales que quedaron en nivel cero
    for i in artificial_rows:
        candidates = np.flatnonzero(np.abs(T[i, :m]) > pivot_tol)
        if candidates.size == 0:
            raise NumericalBreakdownError("no se pudo sacar una variable artificial de la base")
        col = int(candidates[0])
        _pivot(T, i, col)
        basis[i] = col

    T2 = np.hstack([T[:, :m], T[:, -1:]])
    if not _run_simplex(T2, basis, np.asarray(b, dtype=float), pivot_tol):
        return DUAL_UNBOUNDED, basis
    return OPTIMAL, basis


def _independent_columns(A: np.ndarray) -> List[int]:
    keep: List[int] = []
    for j in range(A.shape[1]):
        if np.linalg.matrix_rank(A[:, keep + [j]]) > len(keep):
            keep.append(j)
    return keep


def is_empty(P: Polytope, pivot_tol: float = PIVOT_TOL) -> bool:
    """Farkas test: P is empty iff some lam >= 0 has lam A = 0 and lam b < 0."""
    cols = _independent_columns(P.A)
    if not cols:
        return bool(np.any(P.b < -FEASIBILITY_TOL))
    A_reduced = P.A[:, cols]
    status, _ = _two_phase(A_reduced, P.b, np.zeros(len(cols)), pivot_tol)
    return status == DUAL_UNBOUNDED


def _raise_not_compact(P: Polytope, pivot_tol: float):
    if is_empty(P, pivot_tol):
        raise InfeasibleError(f"el poliedro {P!r} es vacío")
    raise UnboundedError(f"el poliedro {P!r} no es acotado")


def _pair_from_basis(P: Polytope, c: np.ndarray, basis: List[int]) -> PrimalDualPair:
    rows = list(basis)
    A_B = P.A[rows]
    try:
        v = np.linalg.solve(A_B, P.b[rows])
        lam_B = np.linalg.solve(A_B.T, -c)
    except np.linalg.LinAlgError as e:
        raise NumericalBreakdownError(f"base óptima singular: {e}") from e
    lam = np.zeros(P.m)
    lam[rows] = lam_B
    if np.any(lam < -CERTIFICATE_TOL):
        raise NumericalBreakdownError(f"precio dual negativo {lam.min():.3e} en la base final")
    lam = np.maximum(lam, 0.0)
    # + 0.0 normaliza los ceros negativos
    v = v + 0.0
    v.setflags(write=False)
    lam.setflags(write=False)
    return PrimalDualPair(v=v, lam=lam, value=float(c @ v) + 0.0, basis=tuple(int(i) for i in rows))


def solve_lmo(P: Polytope, c, pivot_tol: float = PIVOT_TOL) -> PrimalDualPair:
    """Returns a vertex v minimizing c.z over P together with dual prices lam.

    The pair satisfies c = -lam A, lam >= 0, c.v = -lam.b and lam(b - Av) = 0.

    Raises:
        InfeasibleError: P is empty.
        UnboundedError: c.z is unbounded below on P, or P contains a line.
        NumericalBreakdownError: no safe pivot or no termination.
    """
    c = as_point(P, c, "c")
    if not np.all(np.isfinite(c)):
        raise DimensionError("c contiene valores no finitos")
    if np.linalg.matrix_rank(P.A) < P.n:
        _raise_not_compact(P, pivot_tol)

    status, basis = _two_phase(P.A, P.b, c, pivot_tol)
    if status == DUAL_INFEASIBLE:
        _raise_not_compact(P, pivot_tol)
    if status == DUAL_UNBOUNDED:
        raise InfeasibleError(f"el poliedro {P!r} es vacío")
    return _pair_from_basis(P, c, basis)


def verify_certificate(P: Polytope, c, pair: PrimalDualPair, tol: float = CERTIFICATE_TOL) -> CertificateReport:
    """Measures how far (pair.v, pair.lam) is from a strong-duality certificate for min c.z over P."""
    c = as_point(P, c, "c")
    v = as_point(P, pair.v, "v")
    lam = np.asarray(pair.lam, dtype=float)
    if lam.shape != (P.m,):
        raise DimensionError(f"lambda debe tener {P.m} entradas, forma recibida {lam.shape}")
    slack = P.b - P.A @ v
    objective = float(c @ v)
    return CertificateReport(
        stationarity=float(np.max(np.abs(c + lam @ P.A))),
        value_equation=max(abs(objective - pair.value), abs(objective + float(lam @ P.b))),
        complementary_slackness=float(np.max(np.abs(lam * slack))),
        primal_feasibility=max(0.0, float(np.max(-slack))),
        dual_nonnegativity=max(0.0, float(np.max(-lam))),
        tol=tol,
    )


def complementarity_gap(P: Polytope, x, pair: PrimalDualPair) -> float:
    """lam.(b - Ax); equals c.(x - v) whenever pair certifies the LMO at c."""
    x = as_point(P, x)
    return float(pair.lam @ (P.b - P.A @ x))
