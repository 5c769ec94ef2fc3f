import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from normalfan.bodies import Ball, Ellipsoid
from normalfan.sphere import (angular_distance, exp_map, fibonacci_sphere, frame_basis,
                              grid_spacing, random_directions, spherical_jet, tangent_frame)


def unit(n):
    return st.lists(st.floats(-1, 1), min_size=n, max_size=n).filter(
        lambda v: np.linalg.norm(v) > 1e-3).map(lambda v: np.array(v) / np.linalg.norm(v))


def test_frame_of_first_axis():
    f = tangent_frame(np.array([1.0, 0, 0]))
    assert np.allclose(f.basis, [[0, 0], [1, 0], [0, 1]])


def test_frame_of_second_axis_orthonormal():
    B = tangent_frame(np.array([0, 1.0, 0])).basis
    assert np.allclose(B.T @ B, np.eye(2), atol=1e-15)
    assert np.allclose(B.T @ [0, 1, 0], 0, atol=1e-15)


@settings(max_examples=50)
@given(st.integers(3, 6).flatmap(unit))
def test_frame_gram_identity(v):
    B = frame_basis(v)
    n = v.shape[0]
    assert np.allclose(B.T @ B, np.eye(n - 1), atol=1e-13)
    assert np.allclose(B.T @ v, 0, atol=1e-13)


def test_frame_is_deterministic_and_continuous():
    v = random_directions(1, 4, seed=1)[0]
    assert np.array_equal(frame_basis(v), frame_basis(v.copy()))
    w = v + 1e-7 * random_directions(1, 4, seed=2)[0]
    w /= np.linalg.norm(w)
    assert np.max(np.abs(frame_basis(v) - frame_basis(w))) < 1e-5


def test_exp_map_moves_by_step_length():
    V = random_directions(10, 3, seed=3)
    B = frame_basis(V)
    S = 0.3 * random_directions(10, 2, seed=4)
    W = exp_map(V, B, S)
    assert np.allclose(angular_distance(V, W), 0.3, atol=1e-12)


def test_fibonacci_spacing_matches_estimate():
    P = fibonacci_sphere(4000)
    d = np.arccos(np.clip(P[:200] @ P.T, -1, 1))
    np.fill_diagonal(d[:, :200], 10)
    nearest = np.median(d.min(axis=1))
    assert 0.5 * grid_spacing(4000, 3) < nearest < 1.5 * grid_spacing(4000, 3)


def test_constant_function_has_zero_jet():
    jet = spherical_jet(lambda p: Ball(2.0).support(p), np.array([0.0, 0.6, 0.8]))
    assert np.allclose(jet.gradient, 0, atol=1e-9)
    assert np.allclose(jet.hessian, 0, atol=1e-5)


def test_gradient_vanishes_along_axis_through_center():
    y = np.array([0.2, -0.4, 0.1])
    v = y / np.linalg.norm(y)
    jet = spherical_jet(lambda p: Ball(1.0).shifted_support(y, p), v)
    assert np.allclose(jet.gradient, 0, atol=1e-9)


def test_ellipsoid_support_hessian_at_vertex():
    E = Ellipsoid([3, 2, 1])
    jet = spherical_jet(E.support, np.array([1.0, 0, 0]), step=1e-4)
    # frame at e_1 is (e_2, e_3): eigenvalues b^2/a - a, c^2/a - a
    assert np.allclose(jet.hessian, np.diag([4 / 3 - 3, 1 / 3 - 3]), atol=1e-6)


@settings(max_examples=20, deadline=None)
@given(unit(3))
def test_jet_matches_analytic_derivatives(v):
    E = Ellipsoid([3, 2, 1])
    f = tangent_frame(v)
    jet = spherical_jet(E.support, v, f, step=1e-4)
    x = E.boundary_point(v)
    Q = E.reverse_weingarten(v, f.basis)
    assert np.allclose(jet.gradient, f.basis.T @ x, atol=1e-7)
    assert np.allclose(jet.hessian + jet.value * np.eye(2), Q, atol=1e-5)


def test_hessian_eigenvalues_frame_invariant():
    E = Ellipsoid([3, 2, 1])
    v = random_directions(1, 3, seed=5)[0]
    base = tangent_frame(v)
    R = np.array([[np.cos(0.7), -np.sin(0.7)], [np.sin(0.7), np.cos(0.7)]])
    rotated = type(base)(base=v, basis=base.basis @ R)
    e1 = np.linalg.eigvalsh(spherical_jet(E.support, v, base, step=1e-4).hessian)
    e2 = np.linalg.eigvalsh(spherical_jet(E.support, v, rotated, step=1e-4).hessian)
    assert np.allclose(e1, e2, atol=1e-6)


@pytest.mark.parametrize("step, tol", [(1e-2, 1e-3), (1e-3, 1e-5)])
def test_jet_second_order_convergence(step, tol):
    E = Ellipsoid([3, 2, 1])
    v = np.array([0.48, 0.6, 0.64])
    exact = E.reverse_weingarten(v, tangent_frame(v).basis) - E.support(v) * np.eye(2)
    jet = spherical_jet(E.support, v, step=step)
    assert np.max(np.abs(jet.hessian - exact)) < tol * 10
