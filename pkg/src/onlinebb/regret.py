"""Static regret, its linear surrogate, and the regret-bound quantities.

All functions here are pure: they read a finished trajectory plus the loss
sequence and set, and return numbers.  Bound terms use the set diameter and
the set-level gradient bound, never maxima observed along the trajectory.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.optimize import brentq, lsq_linear

from .errors import InsufficientData, InvalidArgument, NumericalFailure
from .geometry import Ball, Box
from .losses import max_gradient_norm, sequence_lipschitz

ZERO_Y_TOL = 1e-14
ORACLE_TOL = 1e-12
ORACLE_MAX_ITER = 1_000_000


# ---------------------------------------------------------------------------
# hindsight minimizer
# ---------------------------------------------------------------------------

def aggregate_quadratic(losses):
    """Return (H, h, const) with sum_k f_k(x) = 0.5 x'Hx - h'x + const."""
    losses = list(losses)
    n = losses[0].dim
    H = np.zeros((n, n))
    h = np.zeros(n)
    const = 0.0
    for f in losses:
        Ac = f.curvature @ f.center
        H += f.curvature
        h += Ac
        const += 0.5 * f.center @ Ac + f.offset
    return 0.5 * (H + H.T), h, const


def _ball_constrained(H, h, ball):
    # KKT: (H + mu I) x = h + mu z with ||x - z|| = r, mu > 0
    lam, Q = np.linalg.eigh(H)
    b = Q.T @ (h - H @ ball.center)

    def excess(mu):
        return np.linalg.norm(b / (lam + mu)) - ball.radius

    hi = np.linalg.norm(b) / ball.radius + 1.0
    while excess(hi) > 0:
        hi *= 2.0
    lo = 0.0
    if excess(lo) <= 0:  # unconstrained minimizer already feasible
        mu = 0.0
    else:
        mu = brentq(excess, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    x = ball.center + Q @ (b / (lam + mu))
    return ball.project(x)


def _box_constrained(H, h, box):
    # 0.5 x'Hx - h'x == 0.5 ||R x - d||^2 + const with H = R'R
    lam, Q = np.linalg.eigh(H)
    root = np.sqrt(lam)
    R = root[:, None] * Q.T
    d = (Q.T @ h) / root
    res = lsq_linear(R, d, bounds=(box.lower, box.upper), method="bvls", tol=1e-15)
    return box.project(res.x)


def projected_gradient_oracle(H, h, fset, tol=ORACLE_TOL, max_iter=ORACLE_MAX_ITER):
    """Minimize 0.5 x'Hx - h'x over the set by projected gradient descent.

    Step 1/lambda_max(H); stops when successive iterates differ by < tol.
    """
    L = float(np.linalg.eigvalsh(H)[-1])
    if L <= 0:
        return fset.project(np.zeros(fset.dim))
    step = 1.0 / L
    if isinstance(fset, Ball):
        x = fset.center.copy()
    else:
        x = 0.5 * (fset.lower + fset.upper)
    for _ in range(max_iter):
        x_new = fset.project(x - step * (H @ x - h))
        if np.linalg.norm(x_new - x) < tol:
            return x_new
        x = x_new
    raise NumericalFailure(f"projected-gradient oracle did not converge in {max_iter} iterations")


def minimize_aggregate(H, h, fset, method="closed"):
    if method == "oracle":
        return projected_gradient_oracle(H, h, fset)
    if method != "closed":
        raise InvalidArgument(f"unknown method {method!r}")
    lam = np.linalg.eigvalsh(H)
    if lam[-1] <= 0 or lam[0] <= 1e-12 * lam[-1]:
        # singular: minimizer may be non-unique or at infinity
        return projected_gradient_oracle(H, h, fset)
    xhat = np.linalg.solve(H, h)
    if fset.contains(xhat, 0.0):
        return xhat
    if isinstance(fset, Ball):
        return _ball_constrained(H, h, fset)
    if isinstance(fset, Box):
        return _box_constrained(H, h, fset)
    return projected_gradient_oracle(H, h, fset)


def hindsight_minimizer(seq, fset, K=None, method="closed"):
    """argmin over the set of the summed losses of rounds 1..K.

    ``method="closed"`` solves the aggregated quadratic directly (linear
    solve, then an exact ball/box constrained solve if the unconstrained
    point is infeasible); ``method="oracle"`` runs projected gradient descent.
    """
    losses = seq.losses()
    if K is not None:
        losses = losses[:K]
    H, h, _ = aggregate_quadratic(losses)
    return minimize_aggregate(H, h, fset, method)


# ---------------------------------------------------------------------------
# regret curves
# ---------------------------------------------------------------------------

def static_regret(traj, seq, xstar):
    """R(k) for k = 1..K against the fixed comparator ``xstar``."""
    comparator = np.array([f.evaluate(xstar) for f in seq.losses()[: traj.K]])
    return np.cumsum(traj.losses) - np.cumsum(comparator)


def prefix_static_regret(traj, seq, fset):
    """Regret of every prefix against that prefix's own hindsight point.

    Diagnostic only; the reported regret uses the full-horizon comparator.
    """
    out = np.empty(traj.K)
    played = np.cumsum(traj.losses)
    n = traj.dim
    H = np.zeros((n, n))
    h = np.zeros(n)
    const = 0.0
    for i, f in enumerate(seq.losses()[: traj.K]):
        Ac = f.curvature @ f.center
        H += f.curvature
        h += Ac
        const += 0.5 * f.center @ Ac + f.offset
        x = minimize_aggregate(0.5 * (H + H.T), h, fset)
        out[i] = played[i] - (0.5 * x @ H @ x - h @ x + const)
    return out


def linearized_regret(traj, xstar):
    """Running sum of g(j)'(x(j) - x*)."""
    xstar = np.asarray(xstar, dtype=float)
    return np.cumsum(np.einsum("ij,ij->i", traj.gradients, traj.iterates - xstar))


def zinkevich_bound(D, gmax, alphas):
    """D^2 / (2 alpha(K)) + (gmax^2 / 2) * sum_k alpha(k)."""
    alphas = np.asarray(alphas, dtype=float)
    if alphas.size == 0:
        raise InvalidArgument("need at least one step size")
    if not alphas[-1] > 0:
        raise InvalidArgument(f"final step size must be positive, got {alphas[-1]}")
    return float(D * D / (2.0 * alphas[-1]) + 0.5 * gmax * gmax * np.sum(alphas))


# ---------------------------------------------------------------------------
# theorem diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Theorem1Diagnostics:
    b: float
    c: float
    d: float
    e: float
    P: float
    Q: float
    Z: float
    psi: float
    condition_t1: object  # True / False / None when c == b
    flag_P: bool


def _ratio(num, den):
    if den == 0:
        return math.inf if num > 0 else (0.0 if num == 0 else -math.inf)
    return num / den


def theorem1_diagnostics(traj, L):
    """Quantities b, c, d, e, P, Q, Z and Psi from the first BB regret bound.

    Displacements are taken between consecutive played points, so the
    "first two displacements" are x(2) - x(1) and x(3) - x(2); a missing
    second displacement (K = 2) counts as zero.
    """
    if traj.K < 2:
        raise InvalidArgument("theorem-1 diagnostics need K >= 2")
    s = traj.displacements()
    y = traj.gradient_changes()
    norms = np.linalg.norm(s, axis=1)
    n1 = norms[0]
    n2 = norms[1] if norms.size > 1 else 0.0
    b = (n1 + n2) ** 2
    c = 2.0 * (n1**2 + n2**2)
    d = float(np.einsum("ij,ij->", s, y))
    e = float(L * np.sum(norms**2))
    P = float(np.sum(traj.alphas))
    Q = _ratio(b, d)
    sq = np.sum(traj.iterates**2, axis=1)
    Z = _ratio(c, L * np.sum(sq[1:] + sq[:-1]))
    psi = _ratio(c, L * np.sum(sq[1:]) + L * np.sum(sq[:-1]))
    if abs(c - b) <= 1e-12 * max(c, np.finfo(float).tiny):
        cond = None
    else:
        cond = bool((e - d) / (c - b) <= _ratio(d, b))
    return Theorem1Diagnostics(float(b), float(c), d, e, P, float(Q), float(Z), float(psi),
                               cond, bool(P <= Z))


@dataclass(frozen=True)
class Theorem2Diagnostics:
    sumA: float  # sum ||s||^2
    sumB: float  # sum ||y||^2
    sumC: float  # sum ||y||^-4 over rounds with y != 0
    zeta: float
    bound: float
    excluded: tuple = field(default=())


def theorem2_bound(traj, D=None, gmax=None):
    """zeta = sqrt(sum ||A||^2) sqrt(sum ||B||^2) sqrt(sum C^2), C = ||y||^-2.

    ``excluded`` lists (1-based) rounds whose gradient change vanished; their
    C term is dropped.  ``bound`` is NaN unless D and gmax are given.
    """
    if traj.K < 2:
        raise InvalidArgument("theorem-2 diagnostics need K >= 2")
    s = traj.displacements()
    y = traj.gradient_changes()
    ynorm = np.linalg.norm(y, axis=1)
    keep = ynorm >= ZERO_Y_TOL
    excluded = tuple(int(i) + 2 for i in np.flatnonzero(~keep))
    sumA = float(np.sum(s**2))
    sumB = float(np.sum(y**2))
    sumC = float(np.sum(ynorm[keep] ** -4.0))
    zeta = math.sqrt(sumA) * math.sqrt(sumB) * math.sqrt(sumC)
    bound = math.nan
    if D is not None and gmax is not None:
        bound = D * D / (2.0 * traj.alphas[-1]) + 0.5 * gmax * gmax * zeta
    return Theorem2Diagnostics(sumA, sumB, sumC, zeta, float(bound), excluded)


# ---------------------------------------------------------------------------
# Sedrakyan / Titu inequality
# ---------------------------------------------------------------------------

def _check_positive(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1 or a.size == 0:
        raise InvalidArgument("a and b must be non-empty series of equal length")
    if np.any(a <= 0) or np.any(b <= 0):
        raise InvalidArgument("all entries must be positive")
    return a, b


def sedrakyan_sides(a, b):
    """(sum a_i^2 / b_i, (sum a_i)^2 / sum b_i)."""
    a, b = _check_positive(a, b)
    return float(np.sum(a * a / b)), float(np.sum(a) ** 2 / np.sum(b))


def sedrakyan_check(a, b, tol=1e-12):
    """sum a_i^2/b_i >= (sum a_i)^2 / sum b_i, up to ``tol`` relative to the sides."""
    lhs, rhs = sedrakyan_sides(a, b)
    return lhs >= rhs - tol * max(1.0, rhs)


def sedrakyan_equality(a, b, tol=1e-12):
    """Whether the two sides agree to relative tolerance ``tol``."""
    lhs, rhs = sedrakyan_sides(a, b)
    return abs(lhs - rhs) <= tol * max(1.0, lhs)


# ---------------------------------------------------------------------------
# sublinearity
# ---------------------------------------------------------------------------

MIN_FIT_POINTS = 10


def sublinearity_fit(curve, k_lo, k_hi):
    """Least-squares slope of log R(k) on log k over rounds k_lo..k_hi.

    Rounds with R(k) <= 0 are skipped; returns (slope, n_skipped).
    """
    curve = np.asarray(curve, dtype=float)
    k_lo, k_hi = int(k_lo), int(k_hi)
    if not 1 <= k_lo <= k_hi <= curve.size:
        raise InvalidArgument(f"window [{k_lo}, {k_hi}] outside 1..{curve.size}")
    k = np.arange(k_lo, k_hi + 1)
    r = curve[k_lo - 1 : k_hi]
    ok = r > 0
    if np.count_nonzero(ok) < MIN_FIT_POINTS:
        raise InsufficientData(f"only {np.count_nonzero(ok)} positive regret values in window")
    slope = np.polyfit(np.log(k[ok]), np.log(r[ok]), 1)[0]
    return float(slope), int(np.count_nonzero(~ok))


def sublinearity_slope(curve, k_lo, k_hi):
    return sublinearity_fit(curve, k_lo, k_hi)[0]


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RegretReport:
    label: str
    xstar: np.ndarray
    regret: np.ndarray
    avg_regret: np.ndarray
    lin_regret: np.ndarray
    D: float
    gmax: float
    L: float
    zinkevich: float
    theorem1: object
    theorem1_bound: float
    theorem2: object
    slope: float
    slope_skipped: int
    prefix_regret: object = None

    @property
    def K(self):
        return self.regret.size

    @property
    def R_K(self):
        return float(self.regret[-1])

    @property
    def avg_R_K(self):
        return float(self.avg_regret[-1])


def regret_report(traj, seq, fset, label="", per_prefix=False, slope_window=None):
    """Assemble every regret quantity for one finished run.

    The slope window defaults to rounds ``max(1, K // 100) .. K``.
    """
    K = traj.K
    seq = seq if seq.horizon == K else seq.truncated(K)
    xstar = hindsight_minimizer(seq, fset)
    R = static_regret(traj, seq, xstar)
    avg = R / np.arange(1, K + 1)
    lin = linearized_regret(traj, xstar)
    D = fset.diameter()
    gmax = max_gradient_norm(seq, fset)
    L = sequence_lipschitz(seq)
    zb = zinkevich_bound(D, gmax, traj.alphas)
    t1 = t2 = None
    t1_bound = math.nan
    if K >= 2:
        t1 = theorem1_diagnostics(traj, L)
        t1_bound = D * D / (2.0 * traj.alphas[-1]) + 0.5 * gmax * gmax * t1.psi
        t2 = theorem2_bound(traj, D, gmax)
    lo, hi = slope_window or (max(1, K // 100), K)
    try:
        slope, skipped = sublinearity_fit(R, lo, hi)
    except (InsufficientData, InvalidArgument):
        slope, skipped = math.nan, hi - lo + 1 if hi >= lo else 0
    prefix = prefix_static_regret(traj, seq, fset) if per_prefix else None
    return RegretReport(label, xstar, R, avg, lin, D, gmax, L, zb, t1, float(t1_bound),
                        t2, slope, skipped, prefix)
