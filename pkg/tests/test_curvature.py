import numpy as np
import pytest

from normalfan.bodies import Ball, Ellipsoid, HarmonicPerturbedBall
from normalfan.curvature import (curvature_spectrum, find_umbilic, focal_points,
                                 singular_locus_diagnostic)
from normalfan.sphere import random_directions

E = Ellipsoid([3, 2, 1])
E_FD = Ellipsoid([3, 2, 1], derivative_mode="finite_difference")


def test_ball_radii_equal_radius():
    for v in random_directions(5, 4, seed=1):
        assert np.allclose(curvature_spectrum(Ball(1.5, dimension=4), v).radii, 1.5, atol=1e-12)


@pytest.mark.parametrize("body, tol", [(E, 1e-8), (E_FD, 1e-4)], ids=["analytic", "fd"])
def test_vertex_radii(body, tol):
    assert np.allclose(curvature_spectrum(body, np.array([1.0, 0, 0])).radii,
                       [1 / 3, 4 / 3], atol=tol)
    assert np.allclose(curvature_spectrum(body, np.array([0, 0, 1.0])).radii, [4, 9], atol=tol)


def test_principal_directions_at_vertex():
    spec = curvature_spectrum(E, np.array([1.0, 0, 0]))
    # the smaller radius c^2/a belongs to the e_3 direction
    assert np.allclose(np.abs(spec.principal_directions), [[0, 0, 1], [0, 1, 0]], atol=1e-12)


def test_radii_positive_everywhere_on_perturbed_ball():
    B = HarmonicPerturbedBall(1.0, 0.05)
    for v in random_directions(50, 3, seed=2):
        assert np.all(curvature_spectrum(B, v).radii > 0)


def test_focal_points():
    pts = sorted(focal_points(E, np.array([1.0, 0, 0])), key=lambda s: s.sheet)
    assert np.allclose(pts[0].point, [3 - 1 / 3, 0, 0], atol=1e-12)
    assert np.allclose(pts[1].point, [3 - 4 / 3, 0, 0], atol=1e-12)
    top = sorted(focal_points(E, np.array([0, 0, 1.0])), key=lambda s: s.sheet)
    assert np.allclose([p.point for p in top], [[0, 0, -3], [0, 0, -8]], atol=1e-12)


def test_ball_focal_sheets_collapse():
    pts = focal_points(Ball(1.0), np.array([0, 1.0, 0]))
    assert all(np.allclose(p.point, 0, atol=1e-12) for p in pts)


def test_diagnostic_flags():
    assert singular_locus_diagnostic(Ball(1.0), np.array([0, 0, 1.0])).multiplicity_flag
    report = singular_locus_diagnostic(E, np.array([1.0, 0, 0]))
    assert not report.multiplicity_flag
    assert report.min_gap == pytest.approx(1.0, abs=1e-12)


def test_umbilic_located_and_flagged():
    u, gap = find_umbilic(E, np.array([0.4, 0.1, 0.9]))
    assert gap < 1e-6
    # closed form: normal proportional to (x1/a^2, 0, x3/c^2) at the umbilic
    a2, b2, c2 = 9.0, 4.0, 1.0
    x1 = np.sqrt(a2 * (a2 - b2) / (a2 - c2))
    x3 = np.sqrt(c2 * (b2 - c2) / (a2 - c2))
    n = np.array([x1 / a2, 0, x3 / c2])
    n /= np.linalg.norm(n)
    assert np.allclose(np.abs(u), n, atol=1e-5)
    assert singular_locus_diagnostic(E, u).multiplicity_flag
