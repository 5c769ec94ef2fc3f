"""Enumeration of all normals through a point.

A point ``y`` lies on the normal at the boundary point with outer normal
``v`` exactly when ``v`` is a critical point of ``h_y(v) = h(v) - <v, y>``.
The spherical gradient of ``h_y`` is the tangential part of ``x(v) - y`` and
its spherical Hessian is ``Q(v) - h_y(v) I``, so every critical point is
found by projected Newton from many seeds and classified by the signs of
``r_i(v) - h_y(v)``.
"""
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DegenerateCritical, NotCritical
from .sphere import exp_map, frame_basis, sphere_grid


@dataclass(frozen=True)
class NormalOptions:
    seed_count: int = None        # default 4096 * 4**(n-3)
    newton_tol: float = 1e-12     # gradient norm, relative to body scale
    newton_max_iter: int = 50
    residual_tol: float = 1e-10   # certification, relative to body scale
    dedup_radius: float = 1e-6    # radians
    degeneracy_tol: float = 1e-8  # relative to body scale
    max_step: float = 1.0         # radians per Newton step
    seed: int = 0

    def seeds_for(self, n):
        if self.seed_count is not None:
            return self.seed_count
        return 4096 * 4 ** (n - 3)


DEFAULT_OPTIONS = NormalOptions()


@dataclass(frozen=True)
class CriticalPoint:
    direction: np.ndarray
    foot: np.ndarray
    signed_distance: float   # y = foot - signed_distance * direction
    morse_index: int         # None when degenerate
    residual: float
    degenerate: bool
    hessian_eigenvalues: np.ndarray = field(repr=False, default=None)


@dataclass(frozen=True)
class NormalFan:
    y: np.ndarray
    critical_points: tuple

    @property
    def count(self):
        return len(self.critical_points)

    @property
    def morse_valid(self):
        return not any(cp.degenerate for cp in self.critical_points)

    @property
    def directions(self):
        n = self.y.shape[0]
        if not self.critical_points:
            return np.zeros((0, n))
        return np.array([cp.direction for cp in self.critical_points])

    def index_counts(self):
        """C_k for k = 0..n-1 (degenerate points are not counted)."""
        n = self.y.shape[0]
        counts = np.zeros(n, dtype=int)
        for cp in self.critical_points:
            if cp.morse_index is not None:
                counts[cp.morse_index] += 1
        return counts

    def euler_sum(self):
        c = self.index_counts()
        return int(sum((-1) ** k * ck for k, ck in enumerate(c)))

    def signature(self):
        return tuple(sorted(cp.morse_index for cp in self.critical_points
                            if cp.morse_index is not None))


def euler_characteristic(n):
    """Euler characteristic of S^{n-1}."""
    return 1 + (-1) ** (n - 1)


@lru_cache(maxsize=16)
def _seed_grid(count, n, seed):
    grid = sphere_grid(count, n, seed=seed)
    grid.setflags(write=False)
    return grid


def shifted_derivatives(body, y, V, B=None):
    """Frame gradient and Hessian of ``h_y`` for a batch of directions.

    Returns ``(hy, X, grad, hess, B)``.
    """
    h, X, Q, B = body.local_data(V, B)
    V = np.atleast_2d(V)
    hy = h - V @ y
    grad = (np.swapaxes(B, 1, 2) @ (X - y)[..., None])[..., 0]
    hess = Q - hy[:, None, None] * np.eye(V.shape[1] - 1)
    return hy, X, grad, hess, B


def _ambient_gradient(body, y, V):
    """Tangential gradient ``P_v (x(v) - y)`` of h_y in ambient coordinates."""
    d = body.boundary_point(V) - y
    return d - V * np.einsum("ij,ij->i", d, V)[:, None]


def _ambient_matrix(body, y, V):
    """Bordered Newton matrix ``M = D - h_y (I - v v^T) + scale * v v^T``.

    ``M`` is invertible exactly when the spherical Hessian is, and maps
    tangent vectors to tangent vectors.
    """
    h, _, M = body.ambient_data(V)
    hy = h - V @ y
    M += np.einsum("mi,mj->mij", V * (hy + body.scale)[:, None], V)
    n = V.shape[1]
    M.reshape(-1, n * n)[:, ::n + 1] -= hy[:, None]
    return M


def _exp(V, T):
    theta = np.sqrt(np.einsum("ij,ij->i", T, T))[:, None]
    safe = np.where(theta > 0.0, theta, 1.0)
    out = np.cos(theta) * V + np.sin(theta) * (T / safe)
    return out / np.sqrt(np.einsum("ij,ij->i", out, out))[:, None]


_BACKTRACK = 0.5 ** np.arange(1, 9)


def _norms(G):
    return np.sqrt(np.einsum("ij,ij->i", G, G))


def newton_refine(body, y, V, options=DEFAULT_OPTIONS):
    """Batched projected Newton for critical points of ``h_y``.

    Steps are clipped to ``max_step`` radians and backtracked (halving, at
    most 8 times) until the gradient norm does not increase; seeds that
    cannot make progress are dropped. Returns the final directions and a
    boolean mask of converged seeds.
    """
    y = np.asarray(y, dtype=float)
    V = np.array(np.atleast_2d(V), dtype=float)
    m, n = V.shape
    tol = options.newton_tol * body.scale
    active = np.ones(m, dtype=bool)
    converged = np.zeros(m, dtype=bool)
    g = _ambient_gradient(body, y, V)
    gnorm = _norms(g)
    for _ in range(options.newton_max_iter):
        done = gnorm <= tol
        converged |= done & active
        active &= ~done
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        M = _ambient_matrix(body, y, V[idx])
        step = _newton_step(M, g[idx], body.scale)
        snorm = _norms(step)
        step *= np.minimum(1.0, options.max_step / np.maximum(snorm, 1e-300))[:, None]
        cand = _exp(V[idx], step)
        cg = _ambient_gradient(body, y, cand)
        cgn = _norms(cg)
        ok = cgn <= gnorm[idx] * (1.0 + 1e-12) + tol
        if not ok.all():
            bad = np.flatnonzero(~ok)
            k = len(_BACKTRACK)
            trials = _exp(np.repeat(V[idx[bad]], k, axis=0),
                          (step[bad][:, None, :] * _BACKTRACK[None, :, None]).reshape(-1, n))
            tg = _ambient_gradient(body, y, trials)
            tgn = _norms(tg).reshape(-1, k)
            tok = tgn <= gnorm[idx[bad]][:, None] * (1.0 + 1e-12) + tol
            first = np.argmax(tok, axis=1)
            found = tok[np.arange(len(bad)), first]
            pick = (np.arange(len(bad)) * k + first)[found]
            fb = bad[found]
            cand[fb], cg[fb], cgn[fb] = trials[pick], tg[pick], tgn.reshape(-1)[pick]
            ok[fb] = True
            active[idx[bad[~found]]] = False
        upd = idx[ok]
        V[upd], g[upd], gnorm[upd] = cand[ok], cg[ok], cgn[ok]
        # seeds already in the quadratic regime that share a 1e-7 cell have
        # the same limit; keep one (the final dedup radius is 1e-6 anyway)
        near = np.flatnonzero(active & (gnorm < 1e-4 * body.scale) & (gnorm > tol))
        if near.size > 1:
            drop = np.ones(near.size, dtype=bool)
            drop[_first_unique(V[near], 1e-7)] = False
            active[near[drop]] = False
    converged |= (gnorm <= tol) & active
    return V, converged


def _newton_step(H, g, scale):
    """Solve H s = -g per row; rows with a singular or non-finite solve
    fall back to a gradient-descent step."""
    try:
        step = -np.linalg.solve(H, g[..., None])[..., 0]
    except np.linalg.LinAlgError:
        step = np.empty_like(g)
        for i in range(len(g)):
            try:
                step[i] = -np.linalg.solve(H[i], g[i])
            except np.linalg.LinAlgError:
                step[i] = np.nan
    bad = ~np.all(np.isfinite(step), axis=1)
    step[bad] = -g[bad] / scale
    return step


def _dedup(V, residuals, radii):
    """Greedy merge of directions; keeps the smallest residual.

    ``radii`` are per-point merge radii: a point is absorbed by a kept point
    when their distance is below the larger of the two radii. Input is
    sorted lexicographically first so the result does not depend on seed
    order.
    """
    if len(V) == 0:
        return V
    order = np.lexsort(V.T[::-1])
    V, residuals, radii = V[order], residuals[order], radii[order]
    alive = np.ones(len(V), dtype=bool)
    keep = []
    while alive.any():
        i = np.flatnonzero(alive)[0]
        cos_r = np.cos(np.maximum(radii, radii[i]))
        close = alive & (V @ V[i] >= cos_r)
        members = np.flatnonzero(close)
        keep.append(members[np.argmin(residuals[members])])
        alive &= ~close
    return V[np.array(keep)]


def _collapse(V, quantum=1e-9):
    """Drop seeds that converged to the same point (equal on a 1e-9 lattice),
    keeping the first; far finer than any merge radius used afterwards."""
    return V[_first_unique(V, quantum)]


def _first_unique(V, quantum):
    """Sorted indices of the first row in each cell of a ``quantum`` lattice."""
    if len(V) < 2:
        return np.arange(len(V))
    q = np.round(V / quantum).astype(np.int64)
    # hash the lattice rows to one key each; collisions are checked below
    mix = np.array([0x9E3779B97F4A7C15, 0xC2B2AE3D27D4EB4F, 0x165667B19E3779F9,
                    0x27D4EB2F165667C5, 0x85EBCA77C2B2AE63, 0xFF51AFD7ED558CCD],
                   dtype=np.uint64)
    n = q.shape[1]
    keys = (q.astype(np.uint64) * np.resize(mix, n)).sum(axis=1)
    _, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
    if not np.array_equal(q, q[first][inverse.ravel()]):
        _, first = np.unique(q, axis=0, return_index=True)
    return np.sort(first)


def _merge_radii(body, H, res, options):
    """Position uncertainty of converged points: residual over the smallest
    |Hessian eigenvalue|, floored at ``dedup_radius``."""
    lam = np.abs(np.linalg.eigvalsh(H)).min(axis=1)
    with np.errstate(divide="ignore"):
        unc = 10.0 * np.maximum(res, 1e-15 * body.scale) / lam
    return np.clip(unc, options.dedup_radius, 1e-3)


def classify_critical(body, y, V, options=DEFAULT_OPTIONS):
    """Build certified :class:`CriticalPoint` records for converged directions."""
    y = np.asarray(y, dtype=float)
    V = np.atleast_2d(V)
    if len(V) == 0:
        return ()
    hy, X, g, H, _ = shifted_derivatives(body, y, V)
    eig = np.linalg.eigvalsh(H)
    res = np.linalg.norm(g, axis=1)
    deg_tol = options.degeneracy_tol * body.scale
    out = []
    for i in range(len(V)):
        degenerate = bool(np.abs(eig[i]).min() < deg_tol)
        out.append(CriticalPoint(
            direction=V[i], foot=X[i], signed_distance=float(hy[i]),
            morse_index=None if degenerate else int(np.sum(eig[i] < 0)),
            residual=float(res[i]), degenerate=degenerate, hessian_eigenvalues=eig[i]))
    return tuple(out)


def refine_seeds(body, y, seeds, options=DEFAULT_OPTIONS):
    """Newton from the given seeds only; certified, de-duplicated fan."""
    y = np.asarray(y, dtype=float)
    V, ok = newton_refine(body, y, seeds, options)
    V = _collapse(V[ok])
    if len(V):
        _, _, g, H, _ = shifted_derivatives(body, y, V)
        res = np.linalg.norm(g, axis=1)
        good = res <= options.residual_tol * body.scale
        V = _dedup(V[good], res[good], _merge_radii(body, H[good], res[good], options))
    return NormalFan(y=y, critical_points=classify_critical(body, y, V, options))


def find_normals(body, y, options=DEFAULT_OPTIONS, extra_seeds=None):
    """All located critical points of ``h_y``, i.e. all normals through ``y``.

    Seeds are a deterministic quasi-uniform grid, plus optional warm-start
    directions (``extra_seeds``). Seeds that fail to converge are dropped.
    Completeness is heuristic; :mod:`normalfan.oracle` provides the check.
    """
    n = body.dimension
    seeds = _seed_grid(options.seeds_for(n), n, options.seed)
    if extra_seeds is not None and len(extra_seeds):
        seeds = np.concatenate([np.atleast_2d(extra_seeds), seeds])
    fan = refine_seeds(body, y, seeds, options)
    if fan.morse_valid and fan.euler_sum() != euler_characteristic(n):
        # a point was missed; near a fold its partner sits along the soft
        # eigenvector of a nearly degenerate point, in a basin far smaller
        # than the seed spacing
        partners = _partner_seeds(body, y, fan)
        if len(partners):
            fan = refine_seeds(body, y, np.concatenate([fan.directions, partners]), options)
    return fan


_PARTNER_STEPS = np.logspace(-7, -1, 25)


def _partner_seeds(body, y, fan, soft=1e-2):
    """Seeds along the soft Hessian directions of nearly degenerate critical
    points, at geometrically spaced distances on both sides."""
    V = fan.directions
    if len(V) == 0:
        return V
    _, _, _, H, B = shifted_derivatives(body, y, V)
    lam, vec = np.linalg.eigh(H)
    out = []
    for i, j in zip(*np.nonzero(np.abs(lam) < soft * body.scale)):
        d = np.concatenate([_PARTNER_STEPS, -_PARTNER_STEPS])[:, None] * vec[i, :, j]
        out.append(exp_map(np.repeat(V[i:i + 1], len(d), axis=0),
                           np.repeat(B[i:i + 1], len(d), axis=0), d))
    return np.concatenate(out) if out else np.zeros((0, V.shape[1]))


def gradient_residual(body, y, v):
    """Norm of the spherical gradient of h_y at v, evaluated from scratch."""
    v = np.asarray(v, dtype=float)
    x = body.boundary_point(v)
    d = x - np.asarray(y, dtype=float)
    return float(np.linalg.norm(d - v * (d @ v)))


def morse_index_at(body, y, v, options=DEFAULT_OPTIONS):
    """Morse index of the critical point ``v`` of ``h_y``; ``None`` if degenerate.

    Raises :class:`NotCritical` if the gradient residual exceeds the
    certification tolerance.
    """
    v = np.asarray(v, dtype=float)
    y = np.asarray(y, dtype=float)
    res = gradient_residual(body, y, v)
    if res > options.residual_tol * body.scale:
        raise NotCritical(f"gradient residual {res:.3g} at {v}")
    cp = classify_critical(body, y, v, options)[0]
    return cp.morse_index


def camera_signature(body, y, options=DEFAULT_OPTIONS):
    """Sorted Morse indices of all normals through ``y``.

    Raises :class:`DegenerateCritical` when ``y`` is on (or numerically near) the
    focal surface.
    """
    fan = find_normals(body, y, options)
    if not fan.morse_valid:
        raise DegenerateCritical(f"degenerate critical point of h_y at y = {y}")
    return fan.signature()
