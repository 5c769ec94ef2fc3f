"""Experiment configuration: one JSON document describes one reproducible job.

Schema (all keys optional unless noted)::

    {
      "job": "curvature" | "normals" | "oracle" | "sweep" | "verify" | "batch_verify",
      "body": {"type": "ellipsoid", "semi_axes": [3, 2, 1]},      # required
      "rng_seed": 42,            # required for randomized jobs
      "sample_count": 100,       # random directions (curvature, batch_verify)
      "directions": [[1, 0, 0]], # explicit directions (curvature)
      "x_dir": [1, 0, 0],        # sweep, verify; normalized on load
      "y": [0, 0, 0],            # normals, oracle
      "grid_resolution": 1000000,
      "t_range": [0.1, 2.0],     # sweep
      "t_samples": 256,          # sweep / verify
      "oracle_confirm": false,   # batch_verify: re-check every witness on the grid
      "tolerances": {"newton_tol": 1e-12, ...},
      "outputs": {"dir": "results", "prefix": "run"}
    }

Tolerance keys and their accepted ranges are listed in ``TOLERANCE_RANGES``.
"""
from dataclasses import dataclass, field, replace

import numpy as np

from .bodies import body_from_spec
from .errors import ConfigInvalid, NotConvexError
from .normals import NormalOptions
from .sweep import SweepOptions, VerifyOptions

JOBS = ("curvature", "normals", "oracle", "sweep", "verify", "batch_verify")

TOLERANCE_RANGES = {
    "newton_tol": (1e-14, 1e-6),
    "residual_tol": (1e-14, 1e-6),
    "dedup_radius": (1e-12, 1e-3),
    "degeneracy_tol": (1e-14, 1e-4),
    "seed_count": (64, 1_000_000),
    "sweep_seed_count": (64, 1_000_000),
    "t_tol": (1e-12, 1e-4),
    "fan_tol": (1e-10, 1e-3),
    "margin": (0.0, 1.0),
}

KNOWN_KEYS = {"job", "body", "rng_seed", "sample_count", "directions", "x_dir", "y",
              "grid_resolution", "t_range", "t_samples", "oracle_confirm", "tolerances",
              "outputs"}


@dataclass(frozen=True)
class ExperimentConfig:
    job: str
    body_spec: dict
    rng_seed: int = None
    sample_count: int = None
    directions: tuple = None
    x_dir: tuple = None
    y: tuple = None
    grid_resolution: int = 1_000_000
    t_range: tuple = None
    t_samples: int = None
    oracle_confirm: bool = False
    tolerances: dict = field(default_factory=dict)
    out_dir: str = "."
    prefix: str = None

    def body(self):
        try:
            return body_from_spec(self.body_spec)
        except NotConvexError as exc:
            raise ConfigInvalid(f"body is not convex: {exc}") from exc
        except (TypeError, ValueError, KeyError) as exc:
            raise ConfigInvalid(f"invalid body: {exc}") from exc

    @property
    def randomized(self):
        if self.job == "batch_verify":
            return True
        if self.job == "curvature" and self.directions is None:
            return True
        # the grid in dimension >= 4 is a seeded random sample
        return self.job == "oracle" and _dimension(self.body_spec) >= 4

    def normal_options(self, base=NormalOptions()):
        keys = ("newton_tol", "residual_tol", "dedup_radius", "degeneracy_tol", "seed_count")
        return replace(base, **{k: self.tolerances[k] for k in keys if k in self.tolerances})

    def sweep_options(self, threads=1):
        t = self.tolerances
        base = SweepOptions()
        nopts = replace(base.normal_options, **{k: t[k] for k in
                        ("newton_tol", "residual_tol", "dedup_radius") if k in t})
        kw = {k: t[k] for k in ("t_tol", "fan_tol") if k in t}
        if "sweep_seed_count" in t:
            kw["seed_count"] = t["sweep_seed_count"]
        return replace(base, normal_options=nopts, threads=threads, **kw)

    def verify_options(self, threads=1):
        kw = {"sweep": self.sweep_options(threads),
              "certify_options": self.normal_options()}
        if self.t_samples is not None:
            kw["t_samples"] = self.t_samples
        if "margin" in self.tolerances:
            kw["margin"] = self.tolerances["margin"]
        return VerifyOptions(**kw)


def _dimension(body_spec):
    for key in ("semi_axes", "center"):
        if body_spec.get(key) is not None:
            return len(body_spec[key])
    return int(body_spec.get("dimension", 3))


def _vector(value, name, n, unit=False):
    try:
        v = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigInvalid(f"{name} must be a list of numbers") from exc
    if v.shape != (n,) or not np.all(np.isfinite(v)):
        raise ConfigInvalid(f"{name} must be {n} finite numbers, got {value!r}")
    if unit:
        norm = np.linalg.norm(v)
        if norm == 0.0:
            raise ConfigInvalid(f"{name} must be nonzero")
        v = v / norm
    return tuple(float(c) for c in v)


def _int(value, name, lo=None, hi=None):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or value != int(value):
        raise ConfigInvalid(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if (lo is not None and value < lo) or (hi is not None and value > hi):
        raise ConfigInvalid(f"{name} = {value} outside [{lo}, {hi}]")
    return value


def parse_config(data, job=None):
    """Validate a decoded JSON document; ``job`` (from the command line) must
    agree with the document's own ``job`` field when both are present."""
    if not isinstance(data, dict):
        raise ConfigInvalid("config must be a JSON object")
    unknown = set(data) - KNOWN_KEYS
    if unknown:
        raise ConfigInvalid(f"unknown config keys: {sorted(unknown)}")
    doc_job = data.get("job")
    if job is not None and doc_job is not None and doc_job != job:
        raise ConfigInvalid(f"config is for job {doc_job!r}, not {job!r}")
    job = job or doc_job
    if job not in JOBS:
        raise ConfigInvalid(f"job must be one of {JOBS}, got {job!r}")
    if not isinstance(data.get("body"), dict):
        raise ConfigInvalid("body specification is required")
    body_spec = dict(data["body"])
    n = _dimension(body_spec)

    tol = data.get("tolerances", {}) or {}
    if not isinstance(tol, dict):
        raise ConfigInvalid("tolerances must be an object")
    for key, value in tol.items():
        if key not in TOLERANCE_RANGES:
            raise ConfigInvalid(f"unknown tolerance {key!r}")
        lo, hi = TOLERANCE_RANGES[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)) \
                or not lo <= value <= hi:
            raise ConfigInvalid(f"tolerance {key} = {value!r} outside [{lo:g}, {hi:g}]")
    tol = {k: (int(v) if "count" in k else float(v)) for k, v in tol.items()}

    kw = {"job": job, "body_spec": body_spec, "tolerances": tol}
    if data.get("rng_seed") is not None:
        kw["rng_seed"] = _int(data["rng_seed"], "rng_seed", 0)
    if data.get("sample_count") is not None:
        kw["sample_count"] = _int(data["sample_count"], "sample_count", 1, 10**6)
    if data.get("directions") is not None:
        dirs = data["directions"]
        if not isinstance(dirs, list) or not dirs:
            raise ConfigInvalid("directions must be a non-empty list")
        kw["directions"] = tuple(_vector(d, "direction", n, unit=True) for d in dirs)
    if data.get("x_dir") is not None:
        kw["x_dir"] = _vector(data["x_dir"], "x_dir", n, unit=True)
    if data.get("y") is not None:
        kw["y"] = _vector(data["y"], "y", n)
    if data.get("grid_resolution") is not None:
        kw["grid_resolution"] = _int(data["grid_resolution"], "grid_resolution", 10**4, 10**7)
    if data.get("t_range") is not None:
        lo, hi = _vector(data["t_range"], "t_range", 2)
        if not 0.0 < lo < hi:
            raise ConfigInvalid("t_range must satisfy 0 < lo < hi")
        kw["t_range"] = (lo, hi)
    if data.get("t_samples") is not None:
        kw["t_samples"] = _int(data["t_samples"], "t_samples", 16 * (n - 1), 10**5)
    if data.get("oracle_confirm") is not None:
        if not isinstance(data["oracle_confirm"], bool):
            raise ConfigInvalid("oracle_confirm must be true or false")
        kw["oracle_confirm"] = data["oracle_confirm"]
    outputs = data.get("outputs", {}) or {}
    if not isinstance(outputs, dict):
        raise ConfigInvalid("outputs must be an object")
    kw["out_dir"] = str(outputs.get("dir", "."))
    if outputs.get("prefix") is not None:
        kw["prefix"] = str(outputs["prefix"])

    cfg = ExperimentConfig(**kw)
    if cfg.randomized and cfg.rng_seed is None:
        raise ConfigInvalid(f"rng_seed is required for the randomized job {job!r}")
    need = {"normals": "y", "oracle": "y", "sweep": "x_dir", "verify": "x_dir"}
    if job in need and getattr(cfg, need[job]) is None:
        raise ConfigInvalid(f"job {job!r} requires {need[job]!r}")
    if job == "batch_verify" and cfg.sample_count is None:
        raise ConfigInvalid("batch_verify requires sample_count")
    if job == "curvature" and cfg.directions is None and cfg.sample_count is None:
        raise ConfigInvalid("curvature requires directions or sample_count")
    cfg.body()  # fail early on an invalid or non-convex body
    return cfg
