import logging
from abc import ABC, abstractmethod
from typing import Tuple

import numpy as np

from .errors import DimensionError, NotConvexError

logger = logging.getLogger(__name__)

PSD_TOL = 1e-9
SYMMETRY_TOL = 1e-12
POWER_ITERATION_RTOL = 1e-8
POWER_ITERATION_MAX_STEPS = 10_000
SMOOTHNESS_RTOL = 1e-6


class SmoothObjective(ABC):
    """Smooth convex function accessed through values and gradients (row vectors).

    Subclasses provide eval, grad and smoothness_constant (Euclidean norm).
    """

    dim: int

    @abstractmethod
    def eval(self, x) -> float:
        ...

    @abstractmethod
    def grad(self, x) -> np.ndarray:
        ...

    @abstractmethod
    def smoothness_constant(self) -> float:
        ...

    def _point(self, x) -> np.ndarray:
        point = np.asarray(x, dtype=float)
        if point.shape != (self.dim,):
            raise DimensionError(f"x debe tener dimensión {self.dim}, forma recibida {point.shape}")
        return point


def _power_iteration(Q: np.ndarray) -> Tuple[float, bool]:
    """Upper estimate of the largest eigenvalue of a PSD matrix by power iteration.

    Returns rho + ||Q v - rho v|| for the final unit vector v and its Rayleigh
    quotient rho; some eigenvalue of Q lies within the residual of rho.
    Stops once the residual is below POWER_ITERATION_RTOL * rho.
    """
    n = Q.shape[0]
    vec = np.ones(n) + np.arange(n) / (10.0 * n)
    vec /= np.linalg.norm(vec)
    rho, residual = 0.0, np.inf
    for _ in range(POWER_ITERATION_MAX_STEPS):
        image = Q @ vec
        rho = float(vec @ image)
        residual = float(np.linalg.norm(image - rho * vec))
        if residual <= POWER_ITERATION_RTOL * abs(rho):
            return rho + residual, True
        norm = np.linalg.norm(image)
        if norm == 0.0:
            return 0.0, True
        vec = image / norm
    return rho + residual, False


def gershgorin_upper_bound(Q: np.ndarray) -> float:
    """max_i Q_ii + sum_{j != i} |Q_ij|, an upper bound on every eigenvalue."""
    off_diagonal = np.sum(np.abs(Q), axis=1) - np.abs(np.diag(Q))
    return float(np.max(np.diag(Q) + off_diagonal))


class QuadraticObjective(SmoothObjective):
    """f(x) = 1/2 x^T Q x + c_lin^T x + r with Q symmetric positive semidefinite.

    Q is symmetrized at construction; a smallest eigenvalue below -1e-9 raises
    NotConvexError since every downstream bound assumes convexity.
    """

    def __init__(self, Q, c_lin, r: float = 0.0):
        Q = np.array(Q, dtype=float)
        c_lin = np.array(c_lin, dtype=float)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise DimensionError(f"Q debe ser cuadrada, forma recibida {Q.shape}")
        if c_lin.shape != (Q.shape[0],):
            raise DimensionError(f"c debe tener {Q.shape[0]} entradas, forma recibida {c_lin.shape}")
        if not (np.all(np.isfinite(Q)) and np.all(np.isfinite(c_lin)) and np.isfinite(r)):
            raise DimensionError("el objetivo contiene valores no finitos")
        Q = 0.5 * (Q + Q.T)
        eigenvalues = np.linalg.eigvalsh(Q)
        if eigenvalues[0] < -PSD_TOL:
            raise NotConvexError(f"Q no es semidefinida positiva (autovalor mínimo {eigenvalues[0]:.3e})")
        Q.setflags(write=False)
        c_lin.setflags(write=False)
        self.Q = Q
        self.c_lin = c_lin
        self.r = float(r)
        self.dim = Q.shape[0]
        self._lambda_max = float(eigenvalues[-1])

    def __repr__(self):
        return f"QuadraticObjective(n={self.dim})"

    def eval(self, x) -> float:
        x = self._point(x)
        return float(0.5 * x @ self.Q @ x + self.c_lin @ x + self.r)

    def grad(self, x) -> np.ndarray:
        x = self._point(x)
        return self.Q @ x + self.c_lin

    def curvature(self, d) -> float:
        """d^T Q d, the second derivative of f along d."""
        d = self._point(d)
        return float(d @ self.Q @ d)

    def smoothness_constant(self) -> float:
        """Largest eigenvalue of Q, the tight Euclidean smoothness constant.

        Power iteration gives the value. It is accepted when it lies in
        [lambda_max, lambda_max * (1 + 1e-6)] for the eigvalsh value computed at
        construction; otherwise the eigvalsh value capped by Gershgorin is used.
        """
        if self._lambda_max <= 0.0:
            return 0.0
        estimate, converged = _power_iteration(self.Q)
        if converged and self._lambda_max <= estimate <= self._lambda_max * (1.0 + SMOOTHNESS_RTOL):
            return estimate
        logger.debug(
            "iteración de potencia rechazada (%.12g vs %.12g, convergió=%s), se usa el valor certificado",
            estimate,
            self._lambda_max,
            converged,
        )
        return min(gershgorin_upper_bound(self.Q), self._lambda_max)


def check_gradient_fd(f: SmoothObjective, x, h: float = 1e-5) -> float:
    """Max componentwise error between grad f(x) and central finite differences."""
    if h <= 0:
        raise ValueError(f"h debe ser positivo, recibido {h}")
    x = np.asarray(x, dtype=float)
    gradient = np.asarray(f.grad(x), dtype=float)
    worst = 0.0
    for i in range(x.shape[0]):
        step = np.zeros_like(x)
        step[i] = h
        estimate = (f.eval(x + step) - f.eval(x - step)) / (2.0 * h)
        worst = max(worst, abs(estimate - gradient[i]))
    return worst
