"""Convex quadratic round losses and seeded generators of loss sequences.

A round loss is ``f(x) = 0.5 * (x - c)^T A (x - c) + b`` with ``A`` symmetric
positive semidefinite.  Sequences are pure functions of their parameters and
the round index, so regenerating from the same seed reproduces every loss
bitwise.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvalidArgument
from .geometry import Box, _MAX_ENUM_DIM, _as_vector

SYM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class QuadraticLoss:
    curvature: np.ndarray
    center: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        A = np.array(self.curvature, dtype=float)
        c = np.array(self.center, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise InvalidArgument(f"curvature must be square, got shape {A.shape}")
        if c.ndim != 1 or c.shape[0] != A.shape[0]:
            raise InvalidArgument("center dimension does not match curvature")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(c)) and np.isfinite(self.offset)):
            raise InvalidArgument("loss parameters must be finite")
        if np.max(np.abs(A - A.T), initial=0.0) > SYM_TOL:
            raise InvalidArgument("curvature must be symmetric")
        eigs = np.linalg.eigvalsh(A)
        # round-off slack for matrices assembled as Q diag(l) Q^T
        if eigs[0] < -SYM_TOL * max(1.0, abs(eigs[-1])):
            raise InvalidArgument(f"curvature is not PSD (min eigenvalue {eigs[0]:.3g})")
        A.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "curvature", A)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "offset", float(self.offset))
        object.__setattr__(self, "_eigs", eigs)

    @property
    def dim(self):
        return self.center.shape[0]

    def evaluate(self, x):
        x = _as_vector(x, self.dim)
        r = x - self.center
        return float(0.5 * r @ (self.curvature @ r) + self.offset)

    def gradient(self, x):
        x = _as_vector(x, self.dim)
        return self.curvature @ (x - self.center)

    def lipschitz_constant(self):
        return float(max(self._eigs[-1], 0.0))

    def min_eigenvalue(self):
        return float(self._eigs[0])

    def max_gradient_norm(self, fset):
        """max over x in ``fset`` of ||A (x - c)||.

        Exact for boxes (a convex function peaks at a vertex) up to
        ``_MAX_ENUM_DIM``; otherwise the bound lambda_max * farthest distance.
        """
        if isinstance(fset, Box) and fset.dim <= _MAX_ENUM_DIM:
            disp = fset.corners() - self.center
            return float(np.max(np.linalg.norm(disp @ self.curvature, axis=1)))
        return self.lipschitz_constant() * fset.farthest_distance(self.center)

    def to_dict(self):
        return {
            "curvature": self.curvature.tolist(),
            "center": self.center.tolist(),
            "offset": self.offset,
        }


def evaluate(loss, x):
    return loss.evaluate(x)


def gradient(loss, x):
    return loss.gradient(x)


def lipschitz_constant(loss):
    return loss.lipschitz_constant()


def random_quadratic(rng, dim, eig_range, center_range, offset=0.0):
    """Quadratic with eigenvalues uniform in ``eig_range`` and a Haar rotation."""
    lo, hi = eig_range
    if not 0 <= lo <= hi:
        raise InvalidArgument(f"bad eigenvalue range {eig_range}")
    clo, chi = center_range
    if clo > chi:
        raise InvalidArgument(f"bad center range {center_range}")
    eigs = rng.uniform(lo, hi, size=dim)
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    q = q * np.sign(np.diag(r))  # makes the distribution Haar
    A = (q * eigs) @ q.T
    A = 0.5 * (A + A.T)
    center = rng.uniform(clo, chi, size=dim)
    return QuadraticLoss(A, center, offset)


class LossSequence:
    """Finite horizon sequence of round losses ``f_1 .. f_K``."""

    horizon: int

    @property
    def dim(self):
        raise NotImplementedError

    def _make(self, k):
        raise NotImplementedError

    def generate(self, k):
        k = int(k)
        if not 1 <= k <= self.horizon:
            raise InvalidArgument(f"round {k} outside 1..{self.horizon}")
        return self._make(k)

    @cached_property
    def _all(self):
        return tuple(self._make(k) for k in range(1, self.horizon + 1))

    def losses(self):
        """All round losses, materialized once and cached."""
        return self._all

    def truncated(self, K):
        raise NotImplementedError

    def to_dict(self):
        raise NotImplementedError


def _check_horizon(K):
    if int(K) != K or K < 1:
        raise InvalidArgument(f"horizon must be a positive integer, got {K}")


@dataclass(eq=False)
class Stationary(LossSequence):
    loss: QuadraticLoss
    horizon: int = 1

    def __post_init__(self):
        _check_horizon(self.horizon)

    @property
    def dim(self):
        return self.loss.dim

    def _make(self, k):
        return self.loss

    def truncated(self, K):
        return Stationary(self.loss, K)

    def to_dict(self):
        return {"type": "stationary", **self.loss.to_dict(), "K": self.horizon}


@dataclass(eq=False)
class DriftingCenter(LossSequence):
    """Fixed curvature; the center moves by ``drift * decay**(j-1)`` after round j."""

    base: QuadraticLoss
    drift: np.ndarray
    decay: float = 1.0
    horizon: int = 1

    def __post_init__(self):
        _check_horizon(self.horizon)
        self.drift = _as_vector(self.drift, self.base.dim).copy()
        if not np.isfinite(self.decay):
            raise InvalidArgument("decay must be finite")

    @property
    def dim(self):
        return self.base.dim

    def center_at(self, k):
        if self.decay == 1.0:
            factor = float(k - 1)
        else:
            factor = (1.0 - self.decay ** (k - 1)) / (1.0 - self.decay)
        return self.base.center + factor * self.drift

    def _make(self, k):
        if k == 1:
            return self.base
        return QuadraticLoss(self.base.curvature, self.center_at(k), self.base.offset)

    def truncated(self, K):
        return DriftingCenter(self.base, self.drift, self.decay, K)

    def to_dict(self):
        return {
            "type": "drifting",
            **self.base.to_dict(),
            "drift": self.drift.tolist(),
            "decay": self.decay,
            "K": self.horizon,
        }


@dataclass(eq=False)
class RandomRotation(LossSequence):
    """Fresh random quadratic every round, reproducible from ``(seed, k)``."""

    ndim: int
    eig_range: tuple = (1.0, 10.0)
    center_range: tuple = (-1.0, 1.0)
    seed: int = 0
    horizon: int = 1
    offset: float = 0.0

    def __post_init__(self):
        _check_horizon(self.horizon)
        if self.ndim < 1:
            raise InvalidArgument("dimension must be positive")
        if not 0 <= self.seed < 2**64:
            raise InvalidArgument("seed must be a 64-bit unsigned integer")
        self.eig_range = tuple(float(v) for v in self.eig_range)
        self.center_range = tuple(float(v) for v in self.center_range)

    @property
    def dim(self):
        return self.ndim

    def _make(self, k):
        rng = np.random.default_rng([self.seed, k])
        return random_quadratic(rng, self.ndim, self.eig_range, self.center_range, self.offset)

    def truncated(self, K):
        return RandomRotation(self.ndim, self.eig_range, self.center_range, self.seed, K, self.offset)

    def to_dict(self):
        return {
            "type": "random_rotation",
            "dim": self.ndim,
            "eig_range": list(self.eig_range),
            "center_range": list(self.center_range),
            "seed": self.seed,
            "K": self.horizon,
        }


def generate(seq, k):
    return seq.generate(k)


def sequence_lipschitz(seq):
    """L = max_k L_k over the whole horizon."""
    return max(f.lipschitz_constant() for f in _distinct(seq.losses()))


def max_gradient_norm(seq, fset):
    """max over rounds k and x in the set of ||grad f_k(x)||."""
    if seq.dim != fset.dim:
        raise InvalidArgument("sequence and set dimensions differ")
    return max(f.max_gradient_norm(fset) for f in _distinct(seq.losses()))


def _distinct(losses):
    seen = {}
    for f in losses:
        seen.setdefault(id(f), f)
    return seen.values()
