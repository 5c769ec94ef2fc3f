"""Smooth strictly convex bodies described by their support functions.

Each model exposes its support function ``h`` through the 1-homogeneous
extension ``H(p) = |p| h(p/|p|)``. For a unit direction ``v`` the Euclidean
gradient of ``H`` is the boundary point with outer normal ``v`` and the
Euclidean Hessian, restricted to the tangent space, is the reverse
Weingarten operator whose eigenvalues are the principal curvature radii.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import NotConvexError
from .sphere import as_direction, batch_spherical_jet, frame_basis, SphericalJet, sphere_grid

ANALYTIC = "analytic"
FINITE_DIFFERENCE = "finite_difference"


class SupportBody:
    """Base class; subclasses provide ``_H``, ``_grad_H`` and ``_hess_H``."""

    dimension: int
    center: np.ndarray
    derivative_mode: str
    fd_step: float

    # -- homogeneous extension, implemented per model -------------------
    def _H(self, P):
        raise NotImplementedError

    def _grad_H(self, P):
        raise NotImplementedError

    def _hess_H(self, P):
        raise NotImplementedError

    @property
    def scale(self):
        """Characteristic length used to scale tolerances."""
        raise NotImplementedError

    def to_spec(self):
        raise NotImplementedError

    def translated(self, offset):
        """The same body moved by ``offset``."""
        raise NotImplementedError

    # -- public, batched --------------------------------------------------
    def support(self, V):
        """h(v) for a direction or an ``(m, n)`` batch of directions."""
        V = np.asarray(V, dtype=float)
        return self._H(V)

    def shifted_support(self, y, V):
        V = np.asarray(V, dtype=float)
        return self.support(V) - V @ np.asarray(y, dtype=float)

    def boundary_point(self, V):
        """Point of the boundary whose outer unit normal is ``v``."""
        V = np.asarray(V, dtype=float)
        if self.derivative_mode == ANALYTIC:
            return self._grad_H(V)
        single = V.ndim == 1
        V2 = np.atleast_2d(V)
        B = frame_basis(V2)
        h, g, _ = batch_spherical_jet(self.support, V2, B, self.fd_step)
        X = h[:, None] * V2 + np.einsum("mij,mj->mi", B, g)
        return X[0] if single else X

    def local_data(self, V, B=None):
        """Support value, boundary point and frame-coordinate reverse Weingarten map.

        Returns ``(h, x, Q, B)`` for an ``(m, n)`` batch; ``B`` are the
        tangent frames used for ``Q``.
        """
        V = np.atleast_2d(np.asarray(V, dtype=float))
        if B is None:
            B = frame_basis(V)
        if self.derivative_mode == ANALYTIC:
            h = self._H(V)
            X = self._grad_H(V)
            D2 = self._hess_H(V)
            Q = np.swapaxes(B, 1, 2) @ D2 @ B
        else:
            h, g, hs = batch_spherical_jet(self.support, V, B, self.fd_step)
            X = h[:, None] * V + (B @ g[..., None])[..., 0]
            Q = hs + h[:, None, None] * np.eye(V.shape[1] - 1)
        Q = 0.5 * (Q + np.swapaxes(Q, 1, 2))
        return h, X, Q, B

    def ambient_data(self, V):
        """``(h, x, D)`` with ``D`` the ambient ``n x n`` Hessian of the homogeneous
        extension; ``D v = 0`` and on the tangent space ``D`` is the reverse
        Weingarten map."""
        V = np.atleast_2d(np.asarray(V, dtype=float))
        if self.derivative_mode == ANALYTIC:
            return self._H(V), self._grad_H(V), self._hess_H(V)
        h, X, Q, B = self.local_data(V)
        return h, X, B @ Q @ np.swapaxes(B, 1, 2)

    def reverse_weingarten(self, V, B=None):
        single = np.ndim(V) == 1
        if single and B is not None:
            B = B[None]
        _, _, Q, _ = self.local_data(V, B)
        return Q[0] if single else Q

    def jet(self, v, frame):
        """Spherical jet of h at ``v`` in the coordinates of ``frame``."""
        h, X, Q, _ = self.local_data(v, frame.basis[None])
        k = frame.basis.shape[1]
        grad = frame.basis.T @ X[0]
        hess = Q[0] - h[0] * np.eye(k)
        return SphericalJet(value=float(h[0]), gradient=grad, hessian=hess)

    def validate_convexity(self, count=None, seed=0):
        """Sampled strict-convexity witness: min eigenvalue of the reverse Weingarten map.

        Not a proof; a model that is non-convex between samples would pass.
        """
        n = self.dimension
        if count is None:
            count = 2048 if n == 3 else 10_000
        V = sphere_grid(count, n, seed=seed)
        _, _, Q, _ = self.local_data(V)
        least = float(np.linalg.eigvalsh(Q)[:, 0].min())
        if not least > 0.0:
            raise NotConvexError(
                f"{type(self).__name__} is not strictly convex "
                f"(least curvature radius {least:.3g} on the validation grid)")
        return least

    def _init_common(self, dimension):
        if dimension < 3:
            raise ValueError(f"dimension must be at least 3, got {dimension}")
        center = np.zeros(dimension) if self.center is None else np.asarray(self.center, dtype=float)
        if center.shape != (dimension,):
            raise ValueError(f"center must have shape ({dimension},)")
        object.__setattr__(self, "center", center)
        if self.derivative_mode not in (ANALYTIC, FINITE_DIFFERENCE):
            raise ValueError(f"unknown derivative_mode {self.derivative_mode!r}")
        if not self.fd_step > 0:
            raise ValueError("fd_step must be positive")

    def _mode_spec(self):
        spec = {"center": self.center.tolist()}
        if self.derivative_mode != ANALYTIC:
            spec["derivative_mode"] = self.derivative_mode
            spec["fd_step"] = self.fd_step
        return spec


@dataclass(frozen=True, eq=False)
class Ball(SupportBody):
    radius: float
    center: np.ndarray = None
    dimension: int = 3
    derivative_mode: str = ANALYTIC
    fd_step: float = 1e-5

    def __post_init__(self):
        if self.center is not None:
            object.__setattr__(self, "dimension", len(self.center))
        self._init_common(self.dimension)
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")
        self.validate_convexity()

    @property
    def scale(self):
        return float(self.radius)

    def _H(self, P):
        return self.radius * np.linalg.norm(P, axis=-1) + P @ self.center

    def _grad_H(self, P):
        r = np.linalg.norm(P, axis=-1)[..., None]
        return self.radius * P / r + self.center

    def _hess_H(self, P):
        P = np.atleast_2d(P)
        r = np.linalg.norm(P, axis=-1)
        w = P * (np.sqrt(self.radius) / r ** 1.5)[:, None]
        D = -np.einsum("mi,mj->mij", w, w)
        n = P.shape[-1]
        D.reshape(-1, n * n)[:, ::n + 1] += (self.radius / r)[:, None]
        return D

    def translated(self, offset):
        return Ball(self.radius, self.center + np.asarray(offset, dtype=float),
                    derivative_mode=self.derivative_mode, fd_step=self.fd_step)

    def to_spec(self):
        return {"type": "ball", "radius": float(self.radius), **self._mode_spec()}


@dataclass(frozen=True, eq=False)
class Ellipsoid(SupportBody):
    semi_axes: np.ndarray
    center: np.ndarray = None
    derivative_mode: str = ANALYTIC
    fd_step: float = 1e-5
    dimension: int = field(init=False)

    def __post_init__(self):
        axes = np.asarray(self.semi_axes, dtype=float)
        object.__setattr__(self, "semi_axes", axes)
        object.__setattr__(self, "dimension", axes.shape[0])
        self._init_common(self.dimension)
        if not np.all(axes > 0):
            raise ValueError("ellipsoid semi-axes must be positive")
        self.validate_convexity()

    @property
    def scale(self):
        return float(self.semi_axes.max())

    def _H(self, P):
        a2 = self.semi_axes ** 2
        return np.sqrt(np.sum(a2 * P * P, axis=-1)) + P @ self.center

    def _grad_H(self, P):
        a2 = self.semi_axes ** 2
        s = np.sqrt(np.sum(a2 * P * P, axis=-1))[..., None]
        return a2 * P / s + self.center

    def _hess_H(self, P):
        P = np.atleast_2d(P)
        a2 = self.semi_axes ** 2
        s = np.sqrt(np.sum(a2 * P * P, axis=-1))
        w = (a2 * P) / (s ** 1.5)[:, None]
        D = -np.einsum("mi,mj->mij", w, w)
        n = P.shape[1]
        D.reshape(-1, n * n)[:, ::n + 1] += a2 / s[:, None]
        return D

    def translated(self, offset):
        return Ellipsoid(self.semi_axes, self.center + np.asarray(offset, dtype=float),
                         derivative_mode=self.derivative_mode, fd_step=self.fd_step)

    def to_spec(self):
        return {"type": "ellipsoid", "semi_axes": self.semi_axes.tolist(), **self._mode_spec()}


# Harmonic polynomials on R^3 (restricted to S^2 they are spherical
# harmonics of degree 2 and 3), written as (coefficient, exponents).
DEFAULT_TERMS_3D = (
    (1.0, (1, 1, 0)),
    (0.6, (0, 1, 1)),
    (0.8, (2, 0, 0)),
    (-0.8, (0, 2, 0)),
    (0.5, (1, 1, 1)),
    (0.4, (3, 0, 0)),
    (-1.2, (1, 2, 0)),
)


def default_terms(n):
    """The default perturbation table, padded with zero exponents for n > 3."""
    return tuple((c, tuple(e) + (0,) * (n - 3)) for c, e in DEFAULT_TERMS_3D)


def _pow_derivs(p, k):
    """p**k and its first two derivatives for a non-negative integer k."""
    if k == 0:
        one = np.ones_like(p)
        return one, np.zeros_like(p), np.zeros_like(p)
    f0 = p ** k
    f1 = k * p ** (k - 1)
    f2 = k * (k - 1) * p ** (k - 2) if k >= 2 else np.zeros_like(p)
    return f0, f1, f2


@dataclass(frozen=True, eq=False)
class HarmonicPerturbedBall(SupportBody):
    """Ball of radius ``base_radius`` whose support function is perturbed by
    ``amplitude * sum(c * v**exponents)``.

    Each monomial of degree d is extended 1-homogeneously as
    ``m(p) |p|^(1-d)`` and differentiated term by term.
    """
    base_radius: float
    amplitude: float
    terms: tuple = None
    dimension: int = 3
    center: np.ndarray = None
    derivative_mode: str = ANALYTIC
    fd_step: float = 1e-5

    def __post_init__(self):
        if self.center is not None:
            object.__setattr__(self, "dimension", len(self.center))
        terms = default_terms(self.dimension) if self.terms is None else self.terms
        terms = tuple((float(c), tuple(int(e) for e in exps)) for c, exps in terms)
        for _, exps in terms:
            if len(exps) != self.dimension or min(exps) < 0:
                raise ValueError(f"bad exponent tuple {exps} for dimension {self.dimension}")
        object.__setattr__(self, "terms", terms)
        self._init_common(self.dimension)
        if not self.base_radius > 0:
            raise ValueError("base radius must be positive")
        self.validate_convexity()

    @property
    def scale(self):
        return float(self.base_radius)

    def _terms_derivs(self, P, order):
        P = np.atleast_2d(P)
        m, n = P.shape
        r = np.linalg.norm(P, axis=1)
        val = np.zeros(m)
        grad = np.zeros((m, n)) if order >= 1 else None
        hess = np.zeros((m, n, n)) if order >= 2 else None
        for coef, exps in self.terms:
            d = sum(exps)
            alpha = 1.0 - d
            pw = [_pow_derivs(P[:, i], exps[i]) for i in range(n)]
            mono = np.prod([q[0] for q in pw], axis=0)
            s = r ** alpha
            val += coef * mono * s
            if order < 1:
                continue
            gm = np.empty((m, n))
            for i in range(n):
                gm[:, i] = np.prod([pw[j][1] if j == i else pw[j][0] for j in range(n)], axis=0)
            gs = alpha * r[:, None] ** (alpha - 2) * P
            grad += coef * (s[:, None] * gm + mono[:, None] * gs)
            if order < 2:
                continue
            hm = np.empty((m, n, n))
            for i in range(n):
                for j in range(n):
                    if i == j:
                        factors = [pw[l][2] if l == i else pw[l][0] for l in range(n)]
                    else:
                        factors = [pw[l][1] if l in (i, j) else pw[l][0] for l in range(n)]
                    hm[:, i, j] = np.prod(factors, axis=0)
            hs = (alpha * r[:, None, None] ** (alpha - 2) * np.eye(n)
                  + alpha * (alpha - 2) * r[:, None, None] ** (alpha - 4)
                  * np.einsum("mi,mj->mij", P, P))
            hess += coef * (s[:, None, None] * hm
                            + np.einsum("mi,mj->mij", gm, gs)
                            + np.einsum("mi,mj->mij", gs, gm)
                            + mono[:, None, None] * hs)
        return val, grad, hess

    def _H(self, P):
        single = np.ndim(P) == 1
        val, _, _ = self._terms_derivs(P, 0)
        out = (self.base_radius * np.linalg.norm(np.atleast_2d(P), axis=1)
               + self.amplitude * val + np.atleast_2d(P) @ self.center)
        return out[0] if single else out

    def _grad_H(self, P):
        single = np.ndim(P) == 1
        P2 = np.atleast_2d(P)
        _, grad, _ = self._terms_derivs(P2, 1)
        r = np.linalg.norm(P2, axis=1)[:, None]
        out = self.base_radius * P2 / r + self.amplitude * grad + self.center
        return out[0] if single else out

    def _hess_H(self, P):
        P = np.atleast_2d(P)
        _, _, hess = self._terms_derivs(P, 2)
        r = np.linalg.norm(P, axis=1)[:, None, None]
        ball = self.base_radius * (np.eye(P.shape[1]) / r - np.einsum("mi,mj->mij", P, P) / r ** 3)
        return ball + self.amplitude * hess

    def translated(self, offset):
        return HarmonicPerturbedBall(self.base_radius, self.amplitude, self.terms,
                                     center=self.center + np.asarray(offset, dtype=float),
                                     derivative_mode=self.derivative_mode, fd_step=self.fd_step)

    def to_spec(self):
        return {"type": "harmonic_perturbed_ball", "base_radius": float(self.base_radius),
                "amplitude": float(self.amplitude),
                "terms": [{"coefficient": c, "exponents": list(e)} for c, e in self.terms],
                **self._mode_spec()}


def body_from_spec(spec):
    """Build a body from a tagged record such as
    ``{"type": "ellipsoid", "semi_axes": [3, 2, 1], "center": [0, 0, 0]}``."""
    spec = dict(spec)
    kind = spec.pop("type", None)
    mode = {k: spec.pop(k) for k in ("derivative_mode", "fd_step") if k in spec}
    center = spec.pop("center", None)
    if kind == "ball":
        dim = int(spec.pop("dimension", len(center) if center is not None else 3))
        body = Ball(float(spec.pop("radius")), center=center, dimension=dim, **mode)
    elif kind == "ellipsoid":
        body = Ellipsoid(spec.pop("semi_axes"), center=center, **mode)
    elif kind == "harmonic_perturbed_ball":
        dim = int(spec.pop("dimension", len(center) if center is not None else 3))
        terms = spec.pop("terms", None)
        if terms is not None:
            terms = [(t["coefficient"], t["exponents"]) for t in terms]
        body = HarmonicPerturbedBall(float(spec.pop("base_radius", 1.0)),
                                     float(spec.pop("amplitude")), terms,
                                     dimension=dim, center=center, **mode)
    else:
        raise ValueError(f"unknown body type {kind!r}")
    if spec:
        raise ValueError(f"unexpected body fields: {sorted(spec)}")
    return body


def support_eval(body, v):
    """h(v) at a single unit direction (validated)."""
    return float(body.support(as_direction(v)))


def shifted_support(body, y, v):
    """h_y(v) = h(v) - <v, y> at a single unit direction."""
    return float(body.shifted_support(y, as_direction(v)))


def boundary_point(body, v):
    """The boundary point with outer unit normal ``v``."""
    return body.boundary_point(as_direction(v))
