import numpy as np
import pytest

from normalfan.bodies import Ball, Ellipsoid
from normalfan.normals import find_normals
from normalfan.oracle import (agrees_with_solver, brute_force_normals, confirms_witness,
                              match_directions)

E = Ellipsoid([3, 2, 1])


def test_ball_two_clusters():
    g = brute_force_normals(Ball(1.0), np.array([0.3, 0, 0]))
    assert g.count == 2
    dirs = sorted(g.directions.tolist())
    assert np.allclose(dirs, [[-1, 0, 0], [1, 0, 0]], atol=2 * g.spacing)


def test_center_six_axis_clusters():
    g = brute_force_normals(E, np.zeros(3))
    assert g.count == 6
    axes = np.vstack([np.eye(3), -np.eye(3)])
    ua, ub, _ = match_directions(g.directions, axes, 2 * g.spacing)
    assert ua == ub == 0


@pytest.mark.parametrize("y, count", [((0.0, 0.0, 0.5), 6), ((2.4, 0.0, 0.0), 4)])
def test_frozen_counts(y, count):
    assert brute_force_normals(E, np.array(y)).count == count


@pytest.mark.parametrize("y", [(0.0, 0.0, 0.0), (0.0, 0.0, 0.5), (2.4, 0.0, 0.0),
                               (0.4, -0.3, 0.2), (1.6, 0.0, 0.0)])
def test_agrees_with_solver(y):
    y = np.array(y)
    assert agrees_with_solver(find_normals(E, y), brute_force_normals(E, y))


def test_oracle_in_four_dimensions():
    E4 = Ellipsoid([2.5, 2.0, 1.4, 1.0])
    g = brute_force_normals(E4, np.zeros(4), seed=7)
    assert g.count == 8


def test_confirmation_tolerates_extra_clusters():
    y = np.zeros(3)
    fan = find_normals(E, y)
    g = brute_force_normals(E, y)
    assert confirms_witness(fan, g)
    assert not confirms_witness(fan, g, min_count=7)


def test_minimum_resolution():
    with pytest.raises(ValueError):
        brute_force_normals(E, np.zeros(3), grid_resolution=1000)
