import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from normalfan.bodies import Ball, Ellipsoid, HarmonicPerturbedBall
from normalfan.errors import DegenerateCritical, NotCritical
from normalfan.normals import (NormalOptions, camera_signature, euler_characteristic,
                               find_normals, gradient_residual, morse_index_at)
from normalfan.sphere import random_directions

E = Ellipsoid([3, 2, 1])

# brute-force grid counts at 10^6 directions, frozen from the oracle
ORACLE_COUNTS = {(0.0, 0.0, 0.5): 6, (2.4, 0.0, 0.0): 4, (1.6, 0.0, 0.0): 6}


def test_ball_two_normals():
    fan = find_normals(Ball(1.0), np.array([0.3, 0, 0]))
    assert fan.count == 2
    dirs = sorted(fan.critical_points, key=lambda cp: cp.morse_index)
    assert np.allclose(dirs[0].direction, [1, 0, 0], atol=1e-12)
    assert np.allclose(dirs[1].direction, [-1, 0, 0], atol=1e-12)
    assert [cp.morse_index for cp in dirs] == [0, 2]


def test_ellipsoid_center_axis_feet():
    fan = find_normals(E, np.zeros(3))
    assert fan.count == 6
    axes = np.vstack([np.eye(3), -np.eye(3)])
    for cp in fan.critical_points:
        assert np.min(np.linalg.norm(axes - cp.direction, axis=1)) < 1e-9
    assert sorted(cp.morse_index for cp in fan.critical_points) == [0, 0, 1, 1, 2, 2]


@pytest.mark.parametrize("y, count", sorted(ORACLE_COUNTS.items()))
def test_counts_match_frozen_oracle(y, count):
    assert find_normals(E, np.array(y)).count == count


def test_feet_are_on_the_normals():
    y = np.array([0.4, -0.3, 0.2])
    fan = find_normals(E, y)
    for cp in fan.critical_points:
        d = y - cp.foot
        # y - x is parallel to the outer normal at x
        assert np.linalg.norm(d - (d @ cp.direction) * cp.direction) < 1e-9
        assert cp.residual <= 1e-10 * E.scale
        assert cp.signed_distance == pytest.approx(-(d @ cp.direction), abs=1e-12)


def test_morse_index_examples():
    B = Ball(1.0)
    y = np.array([0.3, 0, 0])
    assert morse_index_at(B, y, np.array([1.0, 0, 0])) == 0
    assert morse_index_at(B, y, np.array([-1.0, 0, 0])) == 2
    u = np.array([1.0, 0, 0])
    x = E.boundary_point(u)
    assert morse_index_at(E, x - 0.8 * u, u) == 1


def test_morse_index_rejects_noncritical():
    with pytest.raises(NotCritical):
        morse_index_at(E, np.zeros(3), np.array([0.6, 0.8, 0.0]))


def test_camera_signature():
    assert camera_signature(Ball(1.0, dimension=4), np.array([0.1, 0.2, 0, 0])) == (0, 3)
    assert camera_signature(E, np.zeros(3)) == (0, 0, 1, 1, 2, 2)
    # a nearby point in the same camera
    assert camera_signature(E, np.array([1e-3, -2e-3, 1e-3])) == (0, 0, 1, 1, 2, 2)


def test_camera_signature_on_focal_surface():
    u = np.array([1.0, 0, 0])
    y = E.boundary_point(u) - (1.0 / 3.0) * u
    with pytest.raises(DegenerateCritical):
        camera_signature(E, y, NormalOptions(degeneracy_tol=1e-8))


@settings(max_examples=15, deadline=None)
@given(st.lists(st.floats(-0.8, 0.8), min_size=3, max_size=3))
def test_parity_and_even_count(y):
    fan = find_normals(E, np.array(y) * [3, 2, 1])
    if fan.morse_valid:
        assert fan.euler_sum() == euler_characteristic(3)
        assert fan.count % 2 == 0


def test_translation_covariance():
    offset = np.array([0.7, -1.1, 0.4])
    y = np.array([0.3, 0.2, -0.1])
    a = find_normals(E, y)
    b = find_normals(E.translated(offset), y + offset)
    assert a.count == b.count
    for p, q in zip(a.critical_points, b.critical_points):
        assert np.allclose(p.direction, q.direction, atol=1e-9)
        assert p.morse_index == q.morse_index


def test_seed_count_does_not_change_answer():
    y = np.array([0.5, 0.3, 0.2])
    counts = {find_normals(E, y, NormalOptions(seed_count=s)).signature()
              for s in (1024, 4096, 16384)}
    assert len(counts) == 1


@pytest.mark.parametrize("n", [3, 4, 5])
def test_interior_points_of_perturbed_bodies_are_morse(n):
    B = HarmonicPerturbedBall(1.0, 0.05, dimension=n)
    y = 0.3 * random_directions(1, n, seed=n)[0]
    fan = find_normals(B, y)
    assert fan.morse_valid
    assert fan.euler_sum() == euler_characteristic(n)
    for cp in fan.critical_points:
        assert gradient_residual(B, y, cp.direction) <= 1e-10
