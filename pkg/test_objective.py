import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings
from hypothesis import strategies as st

from modules import objective
from modules.errors import DimensionError, NotConvexError
from modules.objective import QuadraticObjective, SmoothObjective, check_gradient_fd, gershgorin_upper_bound


def test_eval():
    f = QuadraticObjective(np.eye(2), [-2.0, 0.0], 2.0)
    assert f.eval([0.0, 0.0]) == 2.0
    assert f.eval([1.0, 0.0]) == 0.5
    assert QuadraticObjective(np.zeros((2, 2)), [0.0, 0.0]).eval([3.0, -4.0]) == 0.0


def test_grad():
    f = QuadraticObjective(np.eye(2), [-2.0, 0.0], 2.0)
    assert f.grad([0.0, 0.0]).tolist() == [-2.0, 0.0]
    assert f.grad([1.0, 0.5]).tolist() == [-1.0, 0.5]
    g = QuadraticObjective(np.zeros((2, 2)), [0.25, -1.0])
    assert g.grad([7.0, 7.0]).tolist() == [0.25, -1.0]


@pytest.mark.parametrize(
    "Q, expected",
    [
        (np.eye(2), 1.0),
        (np.diag([4.0, 1.0]), 4.0),
        (np.array([[2.0, 1.0], [1.0, 2.0]]), 3.0),
        (np.zeros((3, 3)), 0.0),
    ],
)
def test_smoothness_constant(Q, expected):
    L = QuadraticObjective(Q, np.zeros(Q.shape[0])).smoothness_constant()
    assert L == pytest.approx(expected, rel=1e-7)
    assert expected * (1.0 - 1e-15) <= L <= expected * (1.0 + 1e-6)


def test_smoothness_constant_comes_from_power_iteration():
    f = QuadraticObjective(np.diag([4.0, 1.0]), [0.0, 0.0])
    estimate, converged = objective._power_iteration(f.Q)
    assert converged
    assert f.smoothness_constant() == estimate
    assert 4.0 <= estimate <= 4.0 * (1.0 + 1e-6)


def test_smoothness_constant_falls_back_to_eigensolver(monkeypatch):
    f = QuadraticObjective(np.array([[2.0, 1.0], [1.0, 2.0]]), [0.0, 0.0])
    monkeypatch.setattr(objective, "_power_iteration", lambda Q: (2.5, False))
    assert f.smoothness_constant() == pytest.approx(3.0, rel=1e-12)
    # una estimación convergida pero por debajo de lambda_max también se rechaza
    monkeypatch.setattr(objective, "_power_iteration", lambda Q: (2.9, True))
    assert f.smoothness_constant() == pytest.approx(3.0, rel=1e-12)


def test_gershgorin_bounds_spectrum():
    Q = np.array([[2.0, 1.0], [1.0, 2.0]])
    assert gershgorin_upper_bound(Q) == 3.0


def test_rejects_indefinite():
    with pytest.raises(NotConvexError):
        QuadraticObjective(np.diag([1.0, -1.0]), [0.0, 0.0])


def test_symmetrizes():
    f = QuadraticObjective([[1.0, 2.0], [0.0, 1.0]], [0.0, 0.0])
    assert f.Q.tolist() == [[1.0, 1.0], [1.0, 1.0]]


def test_dimension_checks():
    with pytest.raises(DimensionError):
        QuadraticObjective(np.eye(2), [0.0, 0.0, 0.0])
    with pytest.raises(DimensionError):
        QuadraticObjective(np.eye(2), [0.0, 0.0]).eval([1.0])


class _BrokenGradient(SmoothObjective):
    """Quadratic with 0.1 added to the first gradient component."""

    def __init__(self):
        self.inner = QuadraticObjective(np.eye(2), [1.0, -1.0])
        self.dim = 2

    def eval(self, x):
        return self.inner.eval(x)

    def grad(self, x):
        return self.inner.grad(x) + np.array([0.1, 0.0])

    def smoothness_constant(self):
        return 1.0


def test_check_gradient_fd():
    f = QuadraticObjective(np.array([[2.0, 0.5], [0.5, 1.0]]), [1.0, -3.0], 0.7)
    assert check_gradient_fd(f, [0.3, -1.2]) <= 1e-8
    assert check_gradient_fd(QuadraticObjective(np.eye(2), [0.0, 0.0]), [0.0, 0.0], h=0.1) <= 1e-15
    assert check_gradient_fd(_BrokenGradient(), [0.2, 0.4]) == pytest.approx(0.1, abs=1e-6)
    with pytest.raises(ValueError):
        check_gradient_fd(f, [0.0, 0.0], h=0.0)


@st.composite
def quadratic_and_points(draw):
    n = draw(st.integers(1, 5))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    B = rng.uniform(-1.0, 1.0, size=(n, n))
    f = QuadraticObjective(B @ B.T, rng.uniform(-1.0, 1.0, size=n), rng.uniform(-1.0, 1.0))
    return f, rng.uniform(-2.0, 2.0, size=(200, 2, n))


@hyp_settings(max_examples=25, deadline=None)
@given(quadratic_and_points())
def test_convexity_and_smoothness_inequalities(case):
    f, pairs = case
    L = f.smoothness_constant()
    assert check_gradient_fd(f, pairs[0, 0]) <= 1e-7
    for x, y in pairs:
        linear = f.eval(x) + float(f.grad(x) @ (y - x))
        assert f.eval(y) - linear >= -1e-9
        assert linear + 0.5 * L * float((y - x) @ (y - x)) - f.eval(y) >= -1e-9


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(10))
def test_inequalities_on_random_instances(seed, random_instance):
    _, _, f, rng = random_instance(seed)
    L = f.smoothness_constant()
    for _ in range(1000):
        x, y = rng.uniform(-2.0, 2.0, size=(2, f.dim))
        linear = f.eval(x) + float(f.grad(x) @ (y - x))
        assert f.eval(y) - linear >= -1e-9
        assert linear + 0.5 * L * float((y - x) @ (y - x)) - f.eval(y) >= -1e-9
