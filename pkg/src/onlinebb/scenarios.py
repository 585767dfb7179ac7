"""Bundled benchmark scenarios and a seeded suite of small random problems."""

from dataclasses import dataclass

import numpy as np

from .geometry import Ball, Box
from .losses import (
    DriftingCenter,
    QuadraticLoss,
    RandomRotation,
    Stationary,
    random_quadratic,
)

DEFAULT_K = 10_000

BUNDLED = {
    "stationary-iso": {
        "scenario": {"type": "stationary", "dim": 10, "eigenvalues": [2.0] * 10,
                     "center_range": [-1.0, 1.0], "seed": 0},
        "set": {"type": "ball", "center": [0.0] * 10, "radius": 5.0},
    },
    "stationary-aniso": {
        "scenario": {"type": "stationary", "dim": 10, "eig_range": [1.0, 10.0],
                     "center_range": [-1.0, 1.0], "seed": 7},
        "set": {"type": "ball", "center": [0.0] * 10, "radius": 5.0},
    },
    "drifting": {
        "scenario": {"type": "drifting", "dim": 10, "eig_range": [1.0, 10.0],
                     "center_range": [-1.0, 1.0], "seed": 11,
                     "drift": [0.01] + [0.0] * 9, "decay": 1.0},
        "set": {"type": "ball", "center": [0.0] * 10, "radius": 5.0},
    },
}


def _base_loss(sc):
    dim = int(sc["dim"])
    rng = np.random.default_rng(int(sc["seed"]))
    offset = float(sc.get("offset", 0.0))
    if "eig_range" in sc:
        loss = random_quadratic(rng, dim, sc["eig_range"], sc["center_range"], offset)
        A = loss.curvature
    elif "eigenvalues" in sc:
        A = np.diag(np.asarray(sc["eigenvalues"], dtype=float))
    else:
        A = np.asarray(sc["curvature"], dtype=float)
    if "center" in sc:
        center = np.asarray(sc["center"], dtype=float)
    elif "eig_range" in sc:
        center = loss.center
    else:
        lo, hi = sc["center_range"]
        center = rng.uniform(lo, hi, size=dim)
    return QuadraticLoss(A, center, offset)


def build_sequence(sc, K):
    """LossSequence from a normalized scenario mapping."""
    kind = sc["type"]
    if kind == "stationary":
        return Stationary(_base_loss(sc), K)
    if kind == "drifting":
        return DriftingCenter(_base_loss(sc), sc["drift"], sc["decay"], K)
    return RandomRotation(int(sc["dim"]), sc["eig_range"], sc["center_range"],
                          int(sc["seed"]), K, float(sc.get("offset", 0.0)))


@dataclass
class Scenario:
    name: str
    seq: object
    fset: object
    x0: np.ndarray


def random_point(fset, rng):
    return fset.sample(rng, 1)[0]


def seeded_suite(n, dim=5, K=1000, seed=0, outside=False):
    """``n`` reproducible scenarios cycling through the three generators and
    both set types.  With ``outside=True`` loss centers are pushed beyond the
    set so the hindsight minimizer sits on the boundary."""
    out = []
    for i in range(n):
        rng = np.random.default_rng([seed, i])
        kind = ("stationary", "drifting", "random_rotation")[i % 3]
        if i % 2 == 0:
            r = rng.uniform(1.0, 3.0)
            fset = Ball(rng.uniform(-0.5, 0.5, dim), r)
            reach = np.linalg.norm(fset.center) + r
        else:
            fset = Box(-rng.uniform(0.5, 2.0, dim), rng.uniform(0.5, 2.0, dim))
            reach = float(np.max(np.abs(np.concatenate([fset.lower, fset.upper]))))
        lo = rng.uniform(1.05, 2.0)  # keeps every curvature above 1
        eig = (lo, lo * rng.uniform(1.5, 10.0))
        crange = (reach + 0.5, reach + 3.0) if outside else (-1.0, 1.0)
        sub_seed = int(rng.integers(2**63))
        if kind == "random_rotation":
            seq = RandomRotation(dim, eig, crange, sub_seed, K)
        else:
            base = random_quadratic(np.random.default_rng(sub_seed), dim, eig, crange)
            if kind == "stationary":
                seq = Stationary(base, K)
            else:
                drift = rng.standard_normal(dim) * (0.01 / np.sqrt(dim))
                seq = DriftingCenter(base, drift, rng.uniform(0.9, 1.0), K)
        out.append(Scenario(f"{kind}-{i}", seq, fset, random_point(fset, rng)))
    return out
