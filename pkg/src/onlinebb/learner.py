"""The online loop: play, observe the round loss, take a step, project."""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument, NumericalFailure
from .geometry import _as_vector
from .steppers import SecantPair

PROJECTION_ACTIVE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Per-round record of one run; row ``i`` holds round ``k = i + 1``.

    ``projected[i]`` is set when the update made at round ``k`` was moved by
    the projection, ``degenerate[i]`` when the step came from a degenerate
    secant pair.
    """

    iterates: np.ndarray
    losses: np.ndarray
    gradients: np.ndarray
    alphas: np.ndarray
    degenerate: np.ndarray
    projected: np.ndarray
    x0: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def K(self):
        return self.losses.shape[0]

    @property
    def dim(self):
        return self.iterates.shape[1]

    def displacements(self):
        """s for each consecutive pair of played points (K - 1 rows)."""
        return np.diff(self.iterates, axis=0)

    def gradient_changes(self):
        return np.diff(self.gradients, axis=0)

    def same_as(self, other):
        """Bitwise equality of all recorded arrays."""
        names = ("iterates", "losses", "gradients", "alphas", "degenerate", "projected", "x0")
        return all(
            np.array_equal(getattr(self, n), getattr(other, n)) and
            getattr(self, n).tobytes() == getattr(other, n).tobytes()
            for n in names
        )


@np.errstate(over="ignore", invalid="ignore")
def run(seq, policy, fset, x0, K=None, project=True):
    """Play ``K`` rounds of the online gradient method.

    Round 1 plays ``x0`` (projected onto the set if needed).  From round 2 on
    the policy receives the secant pair built from the two most recent played
    points and their round gradients.  With ``project=False`` the update is
    left unprojected, which is only meaningful for checking that projection
    is inactive.
    """
    K = seq.horizon if K is None else int(K)
    if K < 1 or K > seq.horizon:
        raise InvalidArgument(f"K must lie in 1..{seq.horizon}, got {K}")
    if seq.dim != fset.dim:
        raise InvalidArgument(f"sequence dim {seq.dim} != set dim {fset.dim}")
    x0 = _as_vector(x0, fset.dim)
    x = fset.project(x0)
    n = fset.dim

    iterates = np.empty((K, n))
    grads = np.empty((K, n))
    losses = np.empty(K)
    alphas = np.empty(K)
    degenerate = np.zeros(K, dtype=bool)
    projected = np.zeros(K, dtype=bool)

    policy.reset()
    x_prev = g_prev = None
    for i in range(K):
        k = i + 1
        f = seq.generate(k)
        g = f.gradient(x)
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(g))):
            raise NumericalFailure(f"non-finite iterate or gradient at round {k}", k)
        iterates[i] = x
        grads[i] = g
        losses[i] = f.evaluate(x)

        pair = SecantPair(x - x_prev, g - g_prev) if x_prev is not None else None
        alpha = policy.next_step(pair, k)
        alphas[i] = alpha
        degenerate[i] = policy.last_flagged

        step = x - alpha * g
        x_next = fset.project(step) if project else step
        if not np.all(np.isfinite(x_next)):
            raise NumericalFailure(f"non-finite update at round {k}", k)
        projected[i] = bool(np.linalg.norm(x_next - step) > PROJECTION_ACTIVE_TOL)
        x_prev, g_prev = x, g
        x = x_next

    meta = {
        "policy": policy.describe(),
        "set": fset.to_dict(),
        "K": K,
        "dim": n,
        "seed": getattr(seq, "seed", None),
    }
    return Trajectory(iterates, losses, grads, alphas, degenerate, projected, x0.copy(), meta)


def aggregate_loss(traj):
    """f(K): total loss of the played points."""
    return float(np.sum(traj.losses))
