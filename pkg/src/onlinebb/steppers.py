"""Step-size policies: the two Barzilai-Borwein formulas and simple baselines."""

from dataclasses import dataclass
import math

import numpy as np

from .errors import DegenerateSecant, InvalidArgument

DEGENERACY_TOL = 1e-14

BB_KINDS = ("bb1", "bb2", "alt_bb")
KINDS = BB_KINDS + ("constant", "diminishing")


@dataclass(frozen=True)
class SecantPair:
    """Displacement ``s = x(k) - x(k-1)`` and gradient change ``y``."""

    s: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.s, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if s.shape != y.shape or s.ndim != 1:
            raise InvalidArgument("s and y must be vectors of equal dimension")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "y", y)

    @property
    def sy(self):
        return float(self.s @ self.y)

    @property
    def ss(self):
        return float(self.s @ self.s)

    @property
    def yy(self):
        return float(self.y @ self.y)


def bb1(pair):
    """Long BB step s's / s'y, no safeguarding."""
    sy = pair.sy
    if sy == 0.0:
        raise DegenerateSecant("s'y = 0, first BB step undefined")
    return pair.ss / sy


def bb2(pair):
    """Short BB step s'y / y'y, no safeguarding."""
    yy = pair.yy
    if yy == 0.0:
        raise DegenerateSecant("y = 0, second BB step undefined")
    return pair.sy / yy


class StepPolicy:
    """Emits one step size per round.

    BB variants fall back to ``fallback`` when no usable secant pair exists
    and clamp into ``[alpha_min, alpha_max]``.  ``last_flagged`` reports
    whether the most recent call hit a degenerate pair.  Policies never see
    the horizon.
    """

    def __init__(self, kind, alpha0=0.1, period=10, alpha_min=1e-6, alpha_max=1e3, fallback=0.1):
        if kind not in KINDS:
            raise InvalidArgument(f"unknown policy {kind!r}; expected one of {KINDS}")
        if not 0 < alpha_min <= fallback <= alpha_max:
            raise InvalidArgument("safeguard requires 0 < alpha_min <= fallback <= alpha_max")
        if kind in ("constant", "diminishing") and not alpha0 > 0:
            raise InvalidArgument("alpha0 must be positive")
        if kind == "alt_bb" and (int(period) != period or period < 1):
            raise InvalidArgument("period must be a positive integer")
        self.kind = kind
        self.alpha0 = float(alpha0)
        self.period = int(period)
        self.alpha_min = float(alpha_min)
        self.alpha_max = float(alpha_max)
        self.fallback = float(fallback)
        self.reset()

    def reset(self):
        self.last_step = None
        self.rounds = 0
        self.last_flagged = False

    @property
    def is_bb(self):
        return self.kind in BB_KINDS

    def describe(self):
        if self.kind == "constant":
            return f"constant(alpha0={self.alpha0:g})"
        if self.kind == "diminishing":
            return f"diminishing(c={self.alpha0:g})"
        extra = f"period={self.period}," if self.kind == "alt_bb" else ""
        return (f"{self.kind}({extra}alpha_min={self.alpha_min:g},"
                f"alpha_max={self.alpha_max:g},fallback={self.fallback:g})")

    def formula_for(self, k):
        """Which BB formula round ``k`` uses."""
        if self.kind == "alt_bb":
            return "bb1" if math.ceil(k / self.period) % 2 == 1 else "bb2"
        return self.kind

    def next_step(self, pair, k):
        if k < 1:
            raise InvalidArgument("round index starts at 1")
        self.rounds += 1
        self.last_flagged = False
        if self.kind == "constant":
            alpha = self.alpha0
        elif self.kind == "diminishing":
            alpha = self.alpha0 / math.sqrt(k)
        else:
            alpha = self._bb_step(pair, k)
        self.last_step = alpha
        return alpha

    def _bb_step(self, pair, k):
        if pair is None:
            return self.fallback
        which = self.formula_for(k)
        raw = None
        if abs(pair.sy) >= DEGENERACY_TOL and pair.yy >= DEGENERACY_TOL:
            raw = bb1(pair) if which == "bb1" else bb2(pair)
        if raw is None or not math.isfinite(raw) or raw <= 0:
            self.last_flagged = True
            return self.fallback
        return min(max(raw, self.alpha_min), self.alpha_max)


def next_step(policy, pair, k):
    return policy.next_step(pair, k)
