import itertools
import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .errors import DimensionError, InfeasiblePointError, SizeGuardError
from .settings import FEASIBILITY_TOL, ORACLE_MAX_DIM, ORACLE_MAX_ROWS, VERTEX_DEDUP_TOL

logger = logging.getLogger(__name__)


def _frozen_array(values, name: str, ndim: int) -> np.ndarray:
    array = np.array(values, dtype=float)
    if array.ndim != ndim:
        raise DimensionError(f"{name} debe tener {ndim} dimensiones, tiene {array.ndim}")
    if not np.all(np.isfinite(array)):
        raise DimensionError(f"{name} contiene valores no finitos")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Polytope:
    """Feasible region {z : Az <= b} stored as a dense inequality system.

    Args:
        A (array m x n): constraint matrix, row i is a_i.
        b (array m): right-hand side.

    Both arrays are copied and made read-only, so a Polytope can be shared freely.
    """

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = _frozen_array(self.A, "A", 2)
        b = _frozen_array(self.b, "b", 1)
        m, n = A.shape
        if m < 1 or n < 1:
            raise DimensionError(f"A debe tener al menos una fila y una columna, forma {A.shape}")
        if b.shape[0] != m:
            raise DimensionError(f"b tiene {b.shape[0]} entradas pero A tiene {m} filas")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    def __repr__(self):
        return f"Polytope(m={self.m}, n={self.n})"


@dataclass(frozen=True)
class ActiveSplit:
    """Partition of the rows into those tight at a point and those with slack."""

    equal_rows: Tuple[int, ...]
    strict_rows: Tuple[int, ...]


def as_point(P: Polytope, x, name: str = "x") -> np.ndarray:
    """Converts x to a float vector of dimension n, raising DimensionError otherwise."""
    point = np.asarray(x, dtype=float)
    if point.ndim != 1 or point.shape[0] != P.n:
        raise DimensionError(f"{name} debe tener dimensión {P.n}, forma recibida {point.shape}")
    return point


def slack(P: Polytope, x) -> np.ndarray:
    """Returns b - Ax."""
    return P.b - P.A @ as_point(P, x)


def contains(P: Polytope, x, tol: float = FEASIBILITY_TOL) -> bool:
    """True iff Ax <= b + tol componentwise."""
    if tol < 0:
        raise ValueError(f"tol debe ser no negativo, recibido {tol}")
    return bool(np.all(slack(P, x) >= -tol))


def classify_rows(P: Polytope, x, tol: float = FEASIBILITY_TOL) -> ActiveSplit:
    """Splits rows by |a_i x - b_i| <= tol without checking feasibility of x."""
    tight = np.abs(slack(P, x)) <= tol
    return ActiveSplit(
        equal_rows=tuple(int(i) for i in np.flatnonzero(tight)),
        strict_rows=tuple(int(i) for i in np.flatnonzero(~tight)),
    )


def active_split(P: Polytope, x, tol: float = FEASIBILITY_TOL) -> ActiveSplit:
    """Splits the constraint rows into the subsystem x satisfies with equality and the rest.

    Raises:
        InfeasiblePointError: x is not in P (within tol); this signals a caller bug.
    """
    if not contains(P, x, tol):
        worst = float(np.max(-slack(P, x)))
        raise InfeasiblePointError(f"el punto viola P por {worst:.3e} (tol={tol:.1e})")
    return classify_rows(P, x, tol)


def perturb_rhs(P: Polytope, b_new) -> Polytope:
    """Returns P' = {z : Az <= b_new}; P itself is left untouched.

    Construction never fails on an empty P'; emptiness surfaces at the first LP solve.
    """
    b_new = np.asarray(b_new, dtype=float)
    if b_new.ndim != 1 or b_new.shape[0] != P.m:
        raise DimensionError(f"b' debe tener {P.m} entradas, forma recibida {b_new.shape}")
    return Polytope(P.A, b_new)


def assert_bounded(P: Polytope) -> bool:
    """Checks compactness by minimizing and maximizing every coordinate over P.

    Returns:
        bool: True if all 2n coordinate LPs are bounded, False otherwise.

    Raises:
        InfeasibleError: P is empty (reported distinctly from unboundedness).
    """
    # Importación local: lp_oracle depende de este módulo
    from .errors import UnboundedError
    from .lp_oracle import solve_lmo

    for j in range(P.n):
        for sign in (1.0, -1.0):
            direction = np.zeros(P.n)
            direction[j] = sign
            try:
                solve_lmo(P, direction)
            except UnboundedError:
                logger.debug("coordenada %d no acotada en la dirección %+.0f", j, sign)
                return False
    return True


def enumerate_vertices(P: Polytope, tol: float = VERTEX_DEDUP_TOL) -> List[np.ndarray]:
    """Lists every vertex of a small polytope by solving each n-subset of rows as equalities.

    Singular subsystems are skipped; points infeasible for P are discarded and
    duplicates (Euclidean distance <= tol) are merged. The result is sorted
    lexicographically so repeated calls give the same order.

    Raises:
        SizeGuardError: n > 8 or m > 16.
    """
    if P.n > ORACLE_MAX_DIM or P.m > ORACLE_MAX_ROWS:
        raise SizeGuardError(
            f"enumeración limitada a n <= {ORACLE_MAX_DIM}, m <= {ORACLE_MAX_ROWS}; "
            f"recibido n={P.n}, m={P.m}"
        )
    vertices: List[np.ndarray] = []
    for rows in itertools.combinations(range(P.m), P.n):
        A_sub = P.A[list(rows)]
        if np.linalg.matrix_rank(A_sub) < P.n:
            continue
        point = np.linalg.solve(A_sub, P.b[list(rows)])
        if not contains(P, point, tol):
            continue
        if any(np.linalg.norm(point - known) <= tol for known in vertices):
            continue
        vertices.append(point)
    vertices.sort(key=lambda v: tuple(v.tolist()))
    logger.debug("enumerados %d vértices (n=%d, m=%d)", len(vertices), P.n, P.m)
    return vertices
