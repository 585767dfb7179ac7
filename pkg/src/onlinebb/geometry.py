"""Feasible decision sets: Euclidean balls and axis-aligned boxes.

Both variants have closed-form Euclidean projections, so the learner can keep
every played point inside the set.
"""

from dataclasses import dataclass
import itertools

import numpy as np

from .errors import InvalidArgument

_MAX_ENUM_DIM = 14


def _as_vector(x, dim):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != dim:
        raise InvalidArgument(f"expected a vector of dimension {dim}, got shape {x.shape}")
    return x


def _norm(v):
    # scaled so that huge but finite vectors do not overflow
    m = np.max(np.abs(v), initial=0.0)
    if m == 0.0 or not np.isfinite(m):
        return m
    return m * np.linalg.norm(v / m)


class FeasibleSet:
    """Common interface for the closed, bounded decision set."""

    dim: int

    def project(self, x):
        raise NotImplementedError

    def diameter(self):
        raise NotImplementedError

    def farthest_distance(self, point):
        """Largest Euclidean distance from ``point`` to any member of the set."""
        raise NotImplementedError

    def contains(self, x, tol=1e-12):
        if tol < 0:
            raise InvalidArgument("tol must be non-negative")
        x = _as_vector(x, self.dim)
        return bool(_norm(x - self.project(x)) <= tol)

    def to_dict(self):
        raise NotImplementedError

    def __eq__(self, other):
        return type(self) is type(other) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(repr(self.to_dict()))


@dataclass(frozen=True, eq=False)
class Ball(FeasibleSet):
    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.array(self.center, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise InvalidArgument("ball center must be a non-empty vector")
        if not (np.isfinite(self.radius) and self.radius > 0):
            raise InvalidArgument(f"ball radius must be positive, got {self.radius}")
        c.setflags(write=False)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self):
        return self.center.shape[0]

    def project(self, x):
        x = _as_vector(x, self.dim)
        offset = x - self.center
        dist = _norm(offset)
        if dist <= self.radius:
            return x.copy()
        return self.center + offset * (self.radius / dist)

    def diameter(self):
        return 2.0 * self.radius

    def farthest_distance(self, point):
        point = _as_vector(point, self.dim)
        return float(np.linalg.norm(point - self.center) + self.radius)

    def sample(self, rng, size):
        """Uniform samples from the ball (used for cross-checks)."""
        z = rng.standard_normal((size, self.dim))
        z /= np.linalg.norm(z, axis=1, keepdims=True)
        r = self.radius * rng.random(size) ** (1.0 / self.dim)
        return self.center + z * r[:, None]

    def to_dict(self):
        return {"type": "ball", "center": self.center.tolist(), "radius": self.radius}


@dataclass(frozen=True, eq=False)
class Box(FeasibleSet):
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.array(self.lower, dtype=float)
        hi = np.array(self.upper, dtype=float)
        if lo.ndim != 1 or lo.shape != hi.shape or lo.size == 0:
            raise InvalidArgument("box bounds must be vectors of equal length")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise InvalidArgument("box bounds must be finite")
        if np.any(lo > hi):
            raise InvalidArgument("box requires lower <= upper componentwise")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self):
        return self.lower.shape[0]

    def project(self, x):
        x = _as_vector(x, self.dim)
        return np.clip(x, self.lower, self.upper)

    def diameter(self):
        return float(np.linalg.norm(self.upper - self.lower))

    def farthest_distance(self, point):
        point = _as_vector(point, self.dim)
        far = np.maximum(np.abs(point - self.lower), np.abs(self.upper - point))
        return float(np.linalg.norm(far))

    def corners(self):
        """All 2**dim vertices as rows; only for modest dimensions."""
        if self.dim > _MAX_ENUM_DIM:
            raise InvalidArgument(f"corner enumeration limited to dim <= {_MAX_ENUM_DIM}")
        bits = np.array(list(itertools.product((0, 1), repeat=self.dim)), dtype=bool)
        return np.where(bits, self.upper, self.lower)

    def sample(self, rng, size):
        return rng.uniform(self.lower, self.upper, size=(size, self.dim))

    def to_dict(self):
        return {"type": "box", "lower": self.lower.tolist(), "upper": self.upper.tolist()}


def set_from_dict(spec):
    """Build a set from its configuration mapping."""
    kind = spec.get("type")
    if kind == "ball":
        return Ball(spec["center"], spec["radius"])
    if kind == "box":
        return Box(spec["lower"], spec["upper"])
    raise InvalidArgument(f"unknown set type {kind!r}")


def project(fset, x):
    return fset.project(x)


def diameter(fset):
    return fset.diameter()


def contains(fset, x, tol=1e-12):
    return fset.contains(x, tol)
