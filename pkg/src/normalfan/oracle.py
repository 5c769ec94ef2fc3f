"""Brute-force enumeration of normal feet on a dense direction grid.

Deliberately independent of :mod:`normalfan.normals`: no seeds, no
iteration. Every grid cell whose tangential gradient of ``h_y`` is below
``c * L * spacing`` (``L`` the local Hessian norm) predicts the location of a
nearby zero from its own linearization; predictions that land within two
grid spacings of the cell are clustered, and each cluster is one foot.
"""
from dataclasses import dataclass

import numpy as np

from .sphere import exp_map, frame_basis, grid_spacing, sphere_grid

DEFAULT_RESOLUTION = 1_000_000


@dataclass(frozen=True)
class GridCluster:
    direction: np.ndarray   # grid cell with the smallest residual
    predicted: np.ndarray   # linearized zero location from that cell
    cell_count: int
    min_residual: float


@dataclass(frozen=True)
class GridFan:
    y: np.ndarray
    grid_resolution: int
    spacing: float
    clusters: tuple

    @property
    def count(self):
        return len(self.clusters)

    @property
    def directions(self):
        if not self.clusters:
            return np.zeros((0, self.y.shape[0]))
        return np.array([c.direction for c in self.clusters])

    @property
    def predicted(self):
        """Linearized zero of each cluster; the oracle's estimate of the foot."""
        if not self.clusters:
            return np.zeros((0, self.y.shape[0]))
        return np.array([c.predicted for c in self.clusters])


class _GridData:
    """Per-body, per-resolution data that does not depend on ``y``."""

    def __init__(self, body, resolution, seed):
        n = body.dimension
        self.body = body
        self.V = sphere_grid(resolution, n, seed=seed)
        self.spacing = grid_spacing(resolution, n)
        h, X, Q, B = body.local_data(self.V, frame_basis(self.V))
        radii = np.linalg.eigvalsh(Q)
        self.h, self.X, self.Q, self.B = h, X, Q, B
        self.r_min, self.r_max = radii[:, 0], radii[:, -1]


_CACHE = []
_CACHE_SIZE = 3


def _grid_data(body, resolution, seed):
    for entry in _CACHE:
        if entry.body is body and len(entry.V) == resolution and entry.seed == seed:
            return entry
    data = _GridData(body, resolution, seed)
    data.seed = seed
    _CACHE.insert(0, data)
    del _CACHE[_CACHE_SIZE:]
    return data


def brute_force_normals(body, y, grid_resolution=DEFAULT_RESOLUTION, threshold_factor=4.0,
                        seed=12345):
    if grid_resolution < 10_000:
        raise ValueError("grid_resolution must be at least 1e4 directions")
    y = np.asarray(y, dtype=float)
    data = _grid_data(body, grid_resolution, seed)
    s = data.spacing
    hy = data.h - data.V @ y
    D = data.X - y
    G = (np.swapaxes(data.B, 1, 2) @ D[..., None])[..., 0]
    res = np.linalg.norm(G, axis=1)
    lip = np.maximum(np.abs(data.r_max - hy), np.abs(data.r_min - hy))
    cand = np.flatnonzero(res <= threshold_factor * lip * s)
    if cand.size == 0:
        return GridFan(y=y, grid_resolution=grid_resolution, spacing=s, clusters=())
    n = body.dimension
    H = data.Q[cand] - hy[cand, None, None] * np.eye(n - 1)
    with np.errstate(all="ignore"):
        try:
            d = -np.linalg.solve(H, G[cand][..., None])[..., 0]
        except np.linalg.LinAlgError:
            d = -(np.linalg.pinv(H) @ G[cand][..., None])[..., 0]
    step = np.linalg.norm(d, axis=1)
    ok = np.isfinite(step) & (step <= 2.0 * s)
    cand, d = cand[ok], d[ok]
    if cand.size == 0:
        return GridFan(y=y, grid_resolution=grid_resolution, spacing=s, clusters=())
    P = exp_map(data.V[cand], data.B[cand], d)

    order = np.argsort(res[cand], kind="stable")
    cand, P = cand[order], P[order]
    alive = np.ones(cand.size, dtype=bool)
    cos_merge = np.cos(2.0 * s)
    clusters = []
    while alive.any():
        i = np.flatnonzero(alive)[0]
        members = alive & (P @ P[i] >= cos_merge)
        clusters.append(GridCluster(direction=data.V[cand[i]].copy(), predicted=P[i].copy(),
                                    cell_count=int(members.sum()),
                                    min_residual=float(res[cand[i]])))
        alive &= ~members
    clusters.sort(key=lambda c: tuple(c.direction))
    return GridFan(y=y, grid_resolution=grid_resolution, spacing=s, clusters=tuple(clusters))


def match_directions(A, B, radius):
    """Greedy nearest matching of two direction sets; returns the unmatched counts
    ``(len(A) - matched, len(B) - matched)`` and the largest matched angle."""
    A = np.atleast_2d(A)
    B = np.atleast_2d(B)
    if len(A) == 0 or len(B) == 0:
        return len(A), len(B), 0.0
    ang = np.arccos(np.clip(A @ B.T, -1.0, 1.0))
    pairs = sorted((ang[i, j], i, j) for i in range(len(A)) for j in range(len(B)))
    used_a, used_b, worst = set(), set(), 0.0
    for a, i, j in pairs:
        if a > radius:
            break
        if i in used_a or j in used_b:
            continue
        used_a.add(i)
        used_b.add(j)
        worst = max(worst, a)
    return len(A) - len(used_a), len(B) - len(used_b), worst


def agrees_with_solver(fan, grid_fan, radius_factor=2.0):
    """True if the counts are equal and every oracle cluster's predicted zero is
    within ``radius_factor`` grid spacings of a solver direction."""
    if fan.count != grid_fan.count:
        return False
    ua, ub, _ = match_directions(grid_fan.predicted, fan.directions,
                                 radius_factor * grid_fan.spacing)
    return ua == 0 and ub == 0


def confirms_witness(fan, grid_fan, min_count=6, radius_factor=2.0):
    """True if the grid sees at least ``min_count`` feet and every solver foot
    has an oracle cluster whose predicted zero is within ``radius_factor``
    grid spacings.

    Weaker than :func:`agrees_with_solver`: near a degenerate configuration the
    grid can split one shallow valley into several clusters, which inflates
    its count without refuting any certified foot.
    """
    if grid_fan.count < min_count or fan.count < min_count:
        return False
    ua, _, _ = match_directions(fan.directions, grid_fan.predicted,
                                radius_factor * grid_fan.spacing)
    return ua == 0
