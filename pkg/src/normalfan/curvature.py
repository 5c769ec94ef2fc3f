"""Principal curvature radii, focal points and singular-locus diagnostics."""
from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveRadius
from .sphere import as_direction, exp_map, frame_basis, random_directions


@dataclass(frozen=True)
class CurvatureSpectrum:
    base_direction: np.ndarray
    radii: np.ndarray                 # ascending
    principal_directions: np.ndarray  # (n-1, n), rows orthonormal, tangent to base

    @property
    def min_gap(self):
        if len(self.radii) < 2:
            return np.inf
        return float(np.min(np.diff(self.radii)))


@dataclass(frozen=True)
class FocalSample:
    sheet: int          # 1-based sheet index
    point: np.ndarray
    direction: np.ndarray


def _sign_normalize(vectors):
    """Flip each row so its first non-negligible component is positive."""
    out = vectors.copy()
    for i, row in enumerate(out):
        nz = np.flatnonzero(np.abs(row) > 1e-12)
        if nz.size and row[nz[0]] < 0:
            out[i] = -row
    return out


def spectra(body, V):
    """Ascending curvature radii for a batch of directions, shape ``(m, n-1)``."""
    _, _, Q, _ = body.local_data(V)
    return np.linalg.eigvalsh(Q)


def curvature_spectrum(body, v):
    v = as_direction(v)
    B = frame_basis(v)
    Q = body.reverse_weingarten(v, B)
    radii, vecs = np.linalg.eigh(Q)
    if not np.all(radii > 0):
        raise NonPositiveRadius(f"curvature radii {radii} at direction {v}")
    dirs = _sign_normalize((B @ vecs).T)
    return CurvatureSpectrum(base_direction=v, radii=radii, principal_directions=dirs)


def focal_points(body, v, merge_tol=1e-9):
    """Centres of principal curvature at the boundary point with normal ``v``.

    Sheets whose radii coincide within ``merge_tol * scale`` share one sample,
    labelled with the lowest sheet index.
    """
    spec = curvature_spectrum(body, v)
    x = body.boundary_point(spec.base_direction)
    samples = []
    for k, r in enumerate(spec.radii, start=1):
        if samples and abs(r - spec.radii[k - 2]) <= merge_tol * body.scale:
            continue
        samples.append(FocalSample(sheet=k, point=x - r * spec.base_direction,
                                   direction=spec.base_direction))
    return samples


@dataclass(frozen=True)
class SingularLocusReport:
    multiplicity_flag: bool
    min_gap: float
    min_gap_over_normal_neighborhood: float
    gap_threshold: float
    sheet_slopes: np.ndarray  # d r_k / d(principal direction k), one per sheet


def sheet_slopes(body, v, step=1e-4):
    """Derivative of each radius along its own principal direction, by central differences.

    Vanishing slope is the condition for the normal to meet a cuspidal edge
    of the corresponding sheet. Reported only.
    """
    spec = curvature_spectrum(body, v)
    out = np.empty(len(spec.radii))
    for k, d in enumerate(spec.principal_directions):
        V = np.array([np.cos(step) * v + np.sin(step) * d,
                      np.cos(step) * v - np.sin(step) * d])
        r = np.linalg.eigvalsh(body.reverse_weingarten(V))[:, k]
        out[k] = (r[0] - r[1]) / (2.0 * step)
    return out


def singular_locus_diagnostic(body, x_dir, gap_threshold=None, relative_threshold=1e-3,
                              tube_radius=1e-2, tube_samples=64, seed=0):
    """Flag directions whose normal passes through (or near) a multiple curvature radius.

    ``gap_threshold`` defaults to ``relative_threshold`` times the largest
    radius at ``x_dir``. The tube minimum is taken over ``tube_samples``
    directions within geodesic radius ``tube_radius`` of ``x_dir``.
    """
    v = as_direction(x_dir)
    spec = curvature_spectrum(body, v)
    if gap_threshold is None:
        gap_threshold = relative_threshold * float(spec.radii[-1])
    n = v.shape[0]
    rng = np.random.default_rng(seed)
    steps = random_directions(tube_samples, n - 1, seed=seed)
    steps = steps * (tube_radius * rng.uniform(0.0, 1.0, size=(tube_samples, 1)))
    B = np.repeat(frame_basis(v)[None], tube_samples, axis=0)
    V = exp_map(np.repeat(v[None], tube_samples, axis=0), B, steps)
    radii = np.linalg.eigvalsh(body.reverse_weingarten(V))
    tube_gap = min(float(np.diff(radii, axis=1).min()), spec.min_gap)
    return SingularLocusReport(
        multiplicity_flag=bool(spec.min_gap < gap_threshold),
        min_gap=spec.min_gap,
        min_gap_over_normal_neighborhood=tube_gap,
        gap_threshold=float(gap_threshold),
        sheet_slopes=sheet_slopes(body, v),
    )


def find_umbilic(body, start, iters=200):
    """Locally minimize the smallest radius gap starting from ``start``.

    Returns ``(direction, gap)``. Nelder-Mead on tangent coordinates; the gap
    is not smooth at an umbilic, which rules out gradient methods.
    """
    from scipy.optimize import minimize

    v0 = as_direction(start, normalize=True)
    B = frame_basis(v0)

    def gap(s):
        v = exp_map(v0[None], B[None], np.asarray(s)[None])[0]
        return float(np.diff(np.linalg.eigvalsh(body.reverse_weingarten(v))).min())

    res = minimize(gap, np.zeros(v0.shape[0] - 1), method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": iters * 10})
    v = exp_map(v0[None], B[None], res.x[None])[0]
    return v, float(res.fun)
