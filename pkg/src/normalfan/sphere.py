"""Calculus and sampling on the unit sphere S^{n-1}.

Everything here works on batches: a direction array has shape ``(n,)`` or
``(m, n)`` and frames have shape ``(..., n, n-1)`` with the tangent vectors
stored as columns.
"""
from dataclasses import dataclass

import numpy as np

UNIT_TOL = 1e-12


def as_direction(v, normalize=False):
    """Validate (or normalize) a unit direction of dimension >= 3."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"direction must be a 1-d vector, got shape {v.shape}")
    if v.shape[0] < 3:
        raise ValueError(f"dimension must be at least 3, got {v.shape[0]}")
    norm = np.linalg.norm(v)
    if normalize:
        if norm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return v / norm
    if abs(norm - 1.0) > UNIT_TOL:
        raise ValueError(f"direction is not unit length (norm {norm!r})")
    return v


def normalize_rows(V):
    V = np.asarray(V, dtype=float)
    return V / np.linalg.norm(V, axis=-1, keepdims=True)


def fibonacci_sphere(count):
    """Quasi-uniform Fibonacci lattice on S^2, shape ``(count, 3)``."""
    i = np.arange(count, dtype=float)
    z = 1.0 - (2.0 * i + 1.0) / count
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    phi = i * np.pi * (3.0 - np.sqrt(5.0))
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def random_directions(count, n, seed=0):
    """Uniformly distributed directions on S^{n-1} from a seeded generator."""
    rng = np.random.default_rng(seed)
    return normalize_rows(rng.standard_normal((count, n)))


def sphere_grid(count, n, seed=0):
    """Deterministic quasi-uniform grid: Fibonacci for n = 3, seeded random above."""
    if n == 3:
        return fibonacci_sphere(count)
    return random_directions(count, n, seed=seed)


def grid_spacing(count, n):
    """Typical nearest-neighbour spacing (radians) of ``count`` points on S^{n-1}."""
    from math import gamma, pi
    area = 2.0 * pi ** (n / 2.0) / gamma(n / 2.0)
    return (area / count) ** (1.0 / (n - 1))


def angular_distance(u, v):
    """Geodesic distance between unit vectors (broadcasting over leading axes)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    # atan2 form stays accurate for nearly equal and nearly opposite vectors
    cross = np.linalg.norm(u - v * np.sum(u * v, axis=-1, keepdims=True), axis=-1)
    return np.arctan2(cross, np.sum(u * v, axis=-1))


def frame_basis(V):
    """Orthonormal tangent bases for a batch of unit vectors.

    The coordinate axis most aligned with ``v`` (lowest index on ties) is
    dropped, and the remaining axes, in index order, are Gram-Schmidt
    orthonormalized against ``v``. The result is deterministic and
    continuous away from the seams where the dropped axis switches.
    """
    V = np.asarray(V, dtype=float)
    single = V.ndim == 1
    V = np.atleast_2d(V)
    m, n = V.shape
    pivot = np.argmax(np.abs(V), axis=1)
    keep = np.ones((m, n), dtype=bool)
    keep[np.arange(m), pivot] = False
    axis_idx = np.nonzero(keep)[1].reshape(m, n - 1)
    B = np.zeros((m, n, n - 1))
    rows = np.arange(m)
    for j in range(n - 1):
        w = np.zeros((m, n))
        w[rows, axis_idx[:, j]] = 1.0
        w -= V * np.sum(V * w, axis=1, keepdims=True)
        for i in range(j):
            b = B[:, :, i]
            w -= b * np.sum(b * w, axis=1, keepdims=True)
        # second pass keeps orthogonality at the 1e-16 level
        w -= V * np.sum(V * w, axis=1, keepdims=True)
        for i in range(j):
            b = B[:, :, i]
            w -= b * np.sum(b * w, axis=1, keepdims=True)
        B[:, :, j] = w / np.linalg.norm(w, axis=1, keepdims=True)
    return B[0] if single else B


@dataclass(frozen=True)
class TangentFrame:
    base: np.ndarray
    basis: np.ndarray  # (n, n-1), columns orthonormal and orthogonal to base

    @property
    def dim(self):
        return self.base.shape[0]

    def to_ambient(self, coords):
        return self.basis @ np.asarray(coords, dtype=float)

    def to_frame(self, vec):
        return self.basis.T @ np.asarray(vec, dtype=float)


def tangent_frame(v):
    v = as_direction(v)
    return TangentFrame(base=v, basis=frame_basis(v))


def exp_map(V, B, S):
    """Move along great circles: ``V`` (m,n), frames ``B`` (m,n,n-1), steps ``S`` (m,n-1)."""
    T = (B @ S[..., None])[..., 0]
    theta = np.linalg.norm(T, axis=1, keepdims=True)
    safe = np.where(theta > 0.0, theta, 1.0)
    out = np.cos(theta) * V + np.sin(theta) * T / safe
    return normalize_rows(out)


@dataclass(frozen=True)
class SphericalJet:
    value: float
    gradient: np.ndarray  # (n-1,) frame coordinates
    hessian: np.ndarray   # (n-1, n-1) frame coordinates


def _geodesic_points(v, basis, step):
    """Sample points for central second differences along great circles."""
    k = basis.shape[1]
    c, s = np.cos(step), np.sin(step)
    pts = [v]
    for i in range(k):
        e = basis[:, i]
        pts.append(c * v + s * e)
        pts.append(c * v - s * e)
    for i in range(k):
        for j in range(i + 1, k):
            for w in ((basis[:, i] + basis[:, j]), (basis[:, i] - basis[:, j])):
                w = w / np.sqrt(2.0)
                pts.append(c * v + s * w)
                pts.append(c * v - s * w)
    return pts


def _assemble_jet(values, k, step):
    f0 = values[0]
    grad = np.empty(k)
    hess = np.empty((k, k))
    for i in range(k):
        fp, fm = values[1 + 2 * i], values[2 + 2 * i]
        grad[i] = (fp - fm) / (2.0 * step)
        hess[i, i] = (fp - 2.0 * f0 + fm) / step ** 2
    pos = 1 + 2 * k
    for i in range(k):
        for j in range(i + 1, k):
            d_plus = (values[pos] - 2.0 * f0 + values[pos + 1]) / step ** 2
            d_minus = (values[pos + 2] - 2.0 * f0 + values[pos + 3]) / step ** 2
            hess[i, j] = hess[j, i] = 0.5 * (d_plus - d_minus)
            pos += 4
    return f0, grad, hess


def spherical_jet(f, v, frame=None, step=1e-5):
    """Value, Riemannian gradient and Hessian of ``f`` at ``v`` by finite differences.

    Second derivatives are taken along geodesics, where they coincide with
    the Riemannian Hessian. Mixed entries come from the diagonal
    directions ``(e_i +- e_j)/sqrt(2)``.
    """
    v = as_direction(v)
    if frame is None:
        frame = tangent_frame(v)
    pts = _geodesic_points(v, frame.basis, step)
    values = [float(f(p)) for p in pts]
    f0, grad, hess = _assemble_jet(values, frame.basis.shape[1], step)
    return SphericalJet(value=f0, gradient=grad, hessian=hess)


def batch_spherical_jet(f, V, B, step=1e-5):
    """Vectorized :func:`spherical_jet` for ``f`` mapping (m, n) -> (m,)."""
    V = np.atleast_2d(V)
    m, n = V.shape
    k = n - 1
    c, s = np.cos(step), np.sin(step)
    offsets = []
    for i in range(k):
        offsets.append(B[:, :, i])
        offsets.append(-B[:, :, i])
    for i in range(k):
        for j in range(i + 1, k):
            for w in (B[:, :, i] + B[:, :, j], B[:, :, i] - B[:, :, j]):
                w = w / np.sqrt(2.0)
                offsets.append(w)
                offsets.append(-w)
    pts = np.concatenate([V] + [c * V + s * o for o in offsets], axis=0)
    vals = np.asarray(f(pts), dtype=float).reshape(len(offsets) + 1, m)
    f0 = vals[0]
    grad = np.empty((m, k))
    hess = np.empty((m, k, k))
    for i in range(k):
        fp, fm = vals[1 + 2 * i], vals[2 + 2 * i]
        grad[:, i] = (fp - fm) / (2.0 * step)
        hess[:, i, i] = (fp - 2.0 * f0 + fm) / step ** 2
    pos = 1 + 2 * k
    for i in range(k):
        for j in range(i + 1, k):
            d_plus = (vals[pos] - 2.0 * f0 + vals[pos + 1]) / step ** 2
            d_minus = (vals[pos + 2] - 2.0 * f0 + vals[pos + 3]) / step ** 2
            hess[:, i, j] = hess[:, j, i] = 0.5 * (d_plus - d_minus)
            pos += 4
    return f0, grad, hess
