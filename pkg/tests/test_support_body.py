import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from normalfan.bodies import (Ball, Ellipsoid, HarmonicPerturbedBall, body_from_spec,
                              boundary_point, shifted_support, support_eval)
from normalfan.errors import NotConvexError
from normalfan.sphere import random_directions

unit3 = st.lists(st.floats(-1, 1), min_size=3, max_size=3).filter(
    lambda v: np.linalg.norm(v) > 1e-3).map(lambda v: np.array(v) / np.linalg.norm(v))


def test_ball_support_is_radius():
    B = Ball(2.0)
    for v in random_directions(20, 3, seed=1):
        assert support_eval(B, v) == pytest.approx(2.0, abs=1e-14)


def test_ellipsoid_axis_support():
    assert support_eval(Ellipsoid([3, 2, 1]), [1.0, 0, 0]) == pytest.approx(3.0, abs=1e-14)


@given(unit3)
def test_translated_ball_support(v):
    c = np.array([0.3, -0.2, 0.5])
    assert support_eval(Ball(1.0, center=c), v) == pytest.approx(1.0 + c @ v, abs=1e-13)


def test_shifted_support_values():
    B = Ball(1.0)
    for v in random_directions(10, 3, seed=2):
        assert shifted_support(B, np.zeros(3), v) == pytest.approx(1.0, abs=1e-14)
    assert shifted_support(B, [0.5, 0, 0], [1.0, 0, 0]) == pytest.approx(0.5, abs=1e-14)
    assert shifted_support(Ellipsoid([3, 2, 1]), [1, 0, 0], [1.0, 0, 0]) == pytest.approx(2.0)


def test_boundary_point_ball_and_vertex():
    v = random_directions(1, 3, seed=3)[0]
    assert np.allclose(boundary_point(Ball(1.7), v), 1.7 * v, atol=1e-14)
    assert np.allclose(boundary_point(Ellipsoid([3, 2, 1]), [0, 1.0, 0]), [0, 2, 0], atol=1e-14)


def test_boundary_point_closed_form_diagonal():
    E = Ellipsoid([3, 2, 1])
    a2 = np.array([9.0, 4.0, 1.0])
    v = np.ones(3) / np.sqrt(3)
    x = boundary_point(E, v)
    h = support_eval(E, v)
    assert np.allclose(x, a2 * v / h, atol=1e-14)
    # x lies on the ellipsoid and v is parallel to the gradient of its equation there
    assert np.sum(x ** 2 / a2) == pytest.approx(1.0, abs=1e-14)
    grad = x / a2
    assert np.allclose(grad / np.linalg.norm(grad), v, atol=1e-14)


def test_non_unit_direction_rejected():
    with pytest.raises(ValueError):
        support_eval(Ball(1.0), [1.0, 1.0, 0.0])
    with pytest.raises(ValueError):
        support_eval(Ball(1.0, dimension=3), [1.0, 0.0])


@pytest.mark.parametrize("body", [Ellipsoid([3, 2, 1]), Ellipsoid([2.5, 1.9, 1.3, 1.0]),
                                  HarmonicPerturbedBall(1.0, 0.05)],
                         ids=["ellipsoid3", "ellipsoid4", "perturbed"])
def test_analytic_matches_finite_differences(body):
    fd = body_from_spec({**body.to_spec(), "derivative_mode": "finite_difference"})
    V = random_directions(50, body.dimension, seed=4)
    assert np.allclose(fd.support(V), body.support(V), atol=1e-15)
    assert np.allclose(fd.boundary_point(V), body.boundary_point(V), atol=1e-8)
    Qa = body.reverse_weingarten(V)
    Qf = fd.reverse_weingarten(V)
    assert np.max(np.abs(Qa - Qf)) < 1e-4 * body.scale


@pytest.mark.parametrize("step, tol", [(1e-3, 1e-4), (1e-4, 1e-6)])
def test_fd_error_shrinks_with_step(step, tol):
    E = Ellipsoid([3, 2, 1])
    fd = Ellipsoid([3, 2, 1], derivative_mode="finite_difference", fd_step=step)
    V = random_directions(20, 3, seed=5)
    err = np.max(np.abs(E.reverse_weingarten(V) - fd.reverse_weingarten(V)))
    assert err < tol * 10


@settings(max_examples=25, deadline=None)
@given(unit3, st.lists(st.floats(-2, 2), min_size=3, max_size=3))
def test_translation_covariance(v, offset):
    offset = np.array(offset)
    E = Ellipsoid([3, 2, 1])
    T = E.translated(offset)
    assert T.support(v) == pytest.approx(E.support(v) + offset @ v, abs=1e-12)
    assert np.allclose(T.boundary_point(v), E.boundary_point(v) + offset, atol=1e-12)
    assert np.allclose(T.reverse_weingarten(v[None]), E.reverse_weingarten(v[None]), atol=1e-12)


def test_homogeneous_hessian_kills_direction():
    E = HarmonicPerturbedBall(1.0, 0.05)
    V = random_directions(30, 3, seed=6)
    _, _, D = E.ambient_data(V)
    assert np.max(np.abs((D @ V[..., None])[..., 0])) < 1e-12


def test_non_convex_model_rejected():
    with pytest.raises(NotConvexError):
        HarmonicPerturbedBall(1.0, 2.0)


def test_spec_round_trip():
    for body in (Ball(1.0, center=[0.1, 0, 0]), Ellipsoid([3, 2, 1]),
                 HarmonicPerturbedBall(1.0, 0.05)):
        again = body_from_spec(body.to_spec())
        V = random_directions(5, 3, seed=7)
        assert np.allclose(again.support(V), body.support(V))


def test_unknown_body_type():
    with pytest.raises(ValueError):
        body_from_spec({"type": "cube"})
