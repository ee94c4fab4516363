import json

import numpy as np
import pytest

from modules.geometry import Polytope
from modules.lp_oracle import solve_lmo
from modules.objective import QuadraticObjective

# Filas del cuadrado unidad: z0 <= 1, z1 <= 1, -z0 <= 0, -z1 <= 0
SQUARE_A = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]
SQUARE_B = [1.0, 1.0, 0.0, 0.0]


@pytest.fixture
def square():
    return Polytope(SQUARE_A, SQUARE_B)


@pytest.fixture
def box():
    """[-1, 1]^2."""
    return Polytope(SQUARE_A, [1.0, 1.0, 1.0, 1.0])


@pytest.fixture
def simplex():
    return Polytope([[1.0, 1.0], [-1.0, 0.0], [0.0, -1.0]], [1.0, 0.0, 0.0])


@pytest.fixture
def worked_objective():
    """f(x) = 1/2 |x - (2, 0.5)|^2, minimized over the unit square at (1, 0.5) with value 0.5."""
    return QuadraticObjective(np.eye(2), [-2.0, -0.5], 2.125)


@pytest.fixture
def worked_problem_file(tmp_path):
    path = tmp_path / "square.json"
    path.write_text(
        json.dumps(
            {
                "name": "square",
                "A": SQUARE_A,
                "b": SQUARE_B,
                "objective": {"Q": [[1.0, 0.0], [0.0, 1.0]], "c": [-2.0, -0.5], "r": 2.125},
            }
        ),
        encoding="utf-8",
    )
    return str(path)


def make_polytope(rng, n, m):
    """Bounded nonempty polytope with entries in [-1, 1] and an interior point x_bar.

    The first n rows R are random, the next row is a negative combination of R,
    so the rows positively span R^n; b = A x_bar + s with s > 0.
    """
    while True:
        R = rng.uniform(-1.0, 1.0, size=(n, n))
        if np.linalg.cond(R) < 50.0:
            break
    closing = -(rng.uniform(0.2, 1.0, size=n) @ R)
    closing /= np.max(np.abs(closing))
    extra = rng.uniform(-1.0, 1.0, size=(m - n - 1, n))
    A = np.vstack([R, closing, extra])
    x_bar = rng.uniform(-0.5, 0.5, size=n)
    b = A @ x_bar + rng.uniform(0.1, 1.0, size=m)
    return Polytope(A, b), x_bar


def make_quadratic(rng, n):
    B = rng.uniform(-1.0, 1.0, size=(n, n))
    Q = B @ B.T + 0.1 * np.eye(n)
    return QuadraticObjective(Q, rng.uniform(-2.0, 2.0, size=n), 0.0)


def feasible_points(rng, P, x_bar, count):
    """Convex combinations of x_bar with random LMO vertices of P."""
    points = []
    for _ in range(count):
        v = solve_lmo(P, rng.normal(size=P.n)).v
        alpha = rng.uniform(0.0, 1.0)
        points.append(alpha * x_bar + (1.0 - alpha) * v)
    return points


@pytest.fixture
def random_instance():
    """Factory: random_instance(seed, n_range, m_max) -> (P, x_bar, f, rng)."""

    def build(seed, n_range=(2, 6), m_max=12):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        m = int(rng.integers(n + 1, max(n + 1, m_max) + 1))
        P, x_bar = make_polytope(rng, n, m)
        return P, x_bar, make_quadratic(rng, n), rng

    return build
