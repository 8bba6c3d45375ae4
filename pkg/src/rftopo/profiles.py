"""Initial radial profiles for the four model geometries.

Dumbbells on S^3 are described by ``psi(x, 0)`` with ``phi(x, 0) = 1`` on a
cut interval ``[x_left, x_right]``; the dimpled 2-sphere by ``r(theta, 0)``
on ``[eps, pi - eps]``.
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import bisect

from .errors import BracketingError, InvalidProfileError, SolverFailureError

HALF_PI = 0.5 * math.pi
SLOPE_TOL = 1e-6


class ProfileKind(str, enum.Enum):
    SPHERE2D = "Sphere2D"
    DUMBBELL = "Dumbbell"


@dataclass(frozen=True)
class ProfileParams:
    """Free parameters of the profile families.

    ``alpha``, ``L``, ``k`` and ``mu`` shape the alpha-family dumbbells;
    ``seed``, ``n_control``, ``amplitude`` and ``base_radius`` drive the
    randomized dimpled sphere.
    """

    alpha: float = 1.0
    L: float = 1.0
    k: float = 1.0 / 25.0
    mu: float = 100.0
    epsilon: float = 1e-3
    seed: int = 1
    n_control: int = 13
    amplitude: float = 0.3
    base_radius: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.mu <= 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if not 0.0 < self.epsilon < 0.1:
            raise ValueError(f"epsilon must lie in (0, 0.1), got {self.epsilon}")
        if self.k <= 0:
            raise ValueError(f"k must be positive, got {self.k}")
        if self.n_control < 4:
            raise ValueError("n_control must be at least 4")
        if not 0.0 <= self.amplitude < self.base_radius:
            raise ValueError("amplitude must lie in [0, base_radius)")

    @property
    def neck_height(self):
        return -self.k * self.alpha + 2.0 * self.k

    @property
    def right_root(self):
        """Right pole in the scaled coordinate ``y = x / mu``."""
        return (HALF_PI - self.L) * self.alpha + self.L

    @property
    def x_left(self):
        return -self.mu * (HALF_PI - self.epsilon)


@dataclass(frozen=True)
class PoleConstants:
    a: float
    b: float | None
    iterations: int = 0
    residual: float = 0.0


@dataclass
class RadialProfile:
    kind: ProfileKind
    grid: np.ndarray
    psi: np.ndarray
    phi: np.ndarray | None = None
    left: float = field(default=None)
    right: float = field(default=None)

    def __post_init__(self):
        self.kind = ProfileKind(self.kind)
        self.grid = np.asarray(self.grid, dtype=float)
        self.psi = np.asarray(self.psi, dtype=float)
        if self.phi is not None:
            self.phi = np.asarray(self.phi, dtype=float)
        if self.left is None:
            self.left = float(self.grid[0])
        if self.right is None:
            self.right = float(self.grid[-1])
        if self.grid.ndim != 1 or self.grid.shape != self.psi.shape:
            raise InvalidProfileError("grid and psi must be 1-D arrays of equal length")
        if np.any(np.diff(self.grid) <= 0):
            raise InvalidProfileError("grid must be strictly increasing")

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "psi", "phi"])
            phi = self.phi if self.phi is not None else [None] * len(self.grid)
            for x, p, f in zip(self.grid, self.psi, phi):
                writer.writerow([_fmt(x), _fmt(p), "" if f is None else _fmt(f)])

    @classmethod
    def from_csv(cls, path):
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        grid = [float(r["x"]) for r in rows]
        psi = [float(r["psi"]) for r in rows]
        if all(r["phi"] == "" for r in rows):
            return cls(ProfileKind.SPHERE2D, grid, psi, None)
        return cls(ProfileKind.DUMBBELL, grid, psi, [float(r["phi"]) for r in rows])


def _fmt(v):
    return format(float(v), ".17g")


def uniform_grid(left, right, n):
    """Evenly spaced nodes; mirrored exactly when the interval is symmetric."""
    if n < 3:
        raise ValueError("a grid needs at least 3 points")
    x = np.linspace(left, right, n)
    if left == -right:
        x = 0.5 * (x - x[::-1])
    return x


# --- alpha family ------------------------------------------------------------

def _q(y, params):
    return (y - (1.0 - params.alpha) * params.L) ** 2 + params.neck_height


def alpha_psi(x, params, constants):
    """Evaluate the alpha-interpolated dumbbell profile at ``x``."""
    y = np.asarray(x, dtype=float) / params.mu
    a = constants.a
    num = -a * (y + HALF_PI) * _q(y, params) * (y - params.right_root)
    if params.alpha == 1.0:
        return num
    den = np.power(constants.b - y, 1.0 - params.alpha)
    return num / den


def _pole_slopes(a, b, params):
    """psi_x at the exact left pole and at the right root."""
    yr = params.right_root
    e = 1.0 - params.alpha
    left = -(a / params.mu) * _q(-HALF_PI, params) * (-HALF_PI - yr)
    right = -(a / params.mu) * (yr + HALF_PI) * _q(yr, params)
    if e == 0.0:
        return left, right
    return left / (b + HALF_PI) ** e, right / (b - yr) ** e


def solve_pole_constants(params, a0=None, b0=None, tol=1e-13, max_iter=100):
    """Solve for (a, b) so that psi_s -> +1 at the left pole and -1 at the right.

    Damped Newton on the residual pair; one-dimensional in ``a`` when
    ``alpha == 1``, where the right condition follows by symmetry.
    """
    yr = params.right_root
    e = 1.0 - params.alpha
    if a0 is None:
        a0 = params.mu / (_q(-HALF_PI, params) * (HALF_PI + yr))
    if e == 0.0:
        a = float(a0)
        for it in range(max_iter + 1):
            r = _pole_slopes(a, None, params)[0] - 1.0
            if abs(r) <= tol:
                return PoleConstants(float(a), None, it, float(abs(r)))
            # slope is linear in a
            a -= r / (_pole_slopes(a, None, params)[0] / a)
        raise SolverFailureError("pole-constant solve did not converge", abs(r))

    a = float(a0)
    b = float(b0) if b0 is not None else yr + 0.05
    if b <= yr:
        raise InvalidProfileError(f"b={b} must exceed the right root {yr}")

    def residual(a, b):
        sl, sr = _pole_slopes(a, b, params)
        return np.array([sl - 1.0, sr + 1.0]), sl, sr

    r, sl, sr = residual(a, b)
    for it in range(max_iter + 1):
        norm = float(np.max(np.abs(r)))
        if norm <= tol:
            return PoleConstants(float(a), float(b), it, norm)
        if it == max_iter:
            break
        jac = np.array([
            [sl / a, -e * sl / (b + HALF_PI)],
            [sr / a, -e * sr / (b - yr)],
        ])
        step = np.linalg.solve(jac, -r)
        lam = 1.0
        for _ in range(60):
            na, nb = a + lam * step[0], b + lam * step[1]
            if na > 0 and nb > yr:
                nr, nsl, nsr = residual(na, nb)
                if np.max(np.abs(nr)) < norm:
                    break
            lam *= 0.5
        else:
            raise SolverFailureError("damped Newton step stalled", norm)
        a, b, r, sl, sr = na, nb, nr, nsl, nsr
    raise SolverFailureError("pole-constant solve did not converge", norm)


def _check_dumbbell(grid, psi, phi=None):
    interior = psi[1:-1]
    if np.any(~np.isfinite(psi)):
        raise InvalidProfileError("profile contains non-finite values")
    bad = np.flatnonzero(interior <= 0)
    if bad.size:
        raise InvalidProfileError(f"psi is non-positive at x={grid[bad[0] + 1]:.6g}")


def max_slope(grid, psi, phi=None):
    """Largest |psi_s| = |psi_x / phi| from second-order differences."""
    slope = np.gradient(psi, grid, edge_order=2)
    if phi is not None:
        slope = slope / phi
    return float(np.max(np.abs(slope)))


def right_pole_matching(params, constants, n_scan=4001):
    """Right boundary with the same radial height as the fixed left boundary."""
    if params.alpha == 1.0:
        return params.mu * (HALF_PI - params.epsilon)
    target = float(alpha_psi(params.x_left, params, constants))
    x_root = params.mu * params.right_root
    f = lambda x: float(alpha_psi(x, params, constants)) - target  # noqa: E731
    xs = np.linspace(params.x_left, x_root, n_scan)
    above = np.flatnonzero(alpha_psi(xs, params, constants) - target > 0)
    if above.size == 0:
        raise BracketingError("profile never rises above the left pole height")
    lo, hi = float(xs[above[-1]]), x_root
    if not f(lo) > 0 > f(hi):
        raise BracketingError(f"no sign change on [{lo}, {hi}]")
    return bisect(f, lo, hi, xtol=1e-12, rtol=1e-15, maxiter=500)


def alpha_profile(params, constants, n_points=201, x_right=None):
    if params.alpha < 1.0:
        if constants.b is None or constants.b <= params.right_root:
            raise InvalidProfileError("denominator (b - x/mu) vanishes on the domain")
    if x_right is None:
        x_right = right_pole_matching(params, constants)
    left = params.x_left
    grid = uniform_grid(left, x_right, n_points)
    if params.alpha == 1.0 and left == -x_right:
        # even profile: evaluate on the mirrored half for exact symmetry
        psi = alpha_psi(-np.abs(grid), params, constants)
    else:
        psi = alpha_psi(grid, params, constants)
    _check_dumbbell(grid, psi)
    return RadialProfile(ProfileKind.DUMBBELL, grid, psi, np.ones_like(grid), left, x_right)


def symmetric_dumbbell_profile(n_points=201, params=None):
    """Reflection-symmetric small-lobed dumbbell (alpha = 1, L = 1, k = 1/25)."""
    params = params or ProfileParams(alpha=1.0, L=1.0, k=1.0 / 25.0, mu=100.0, epsilon=1e-3)
    return alpha_profile(params, solve_pole_constants(params), n_points)


def degenerate_dumbbell_profile(n_points=201, params=None):
    """One-bump, neckless dumbbell (alpha = 0) with matched pole heights."""
    params = params or ProfileParams(alpha=0.0, L=1.0, k=1.0 / 25.0, mu=100.0, epsilon=1e-3)
    return alpha_profile(params, solve_pole_constants(params), n_points)


# --- dimpled dumbbell ("peanut") -------------------------------------------

GMP_HALF_LENGTH = 100.0 * math.pi
GMP_CUT = 0.1

# (x, psi) controls; necks at -180, -66, 0 and 130 with the thinnest at 0.
# The caps follow 0.98 * 27 sin(d / 27) so the clamped spline keeps |psi_x| <= 1.
GMP_CONTROL_TABLE = (
    (-GMP_HALF_LENGTH, 0.0),
    (-310.16, 3.91),
    (-304.16, 9.58),
    (-296.16, 16.36),
    (-286.16, 22.78),
    (-274.16, 26.35),
    (-240.0, 27.0),
    (-215.0, 24.0),
    (-180.0, 19.0),
    (-150.0, 23.0),
    (-123.0, 25.0),
    (-95.0, 21.0),
    (-66.0, 15.0),
    (-45.0, 17.0),
    (-30.0, 13.0),
    (-14.0, 5.0),
    (0.0, 1.6),
    (14.0, 5.0),
    (35.0, 16.0),
    (65.0, 24.0),
    (100.0, 21.0),
    (130.0, 17.0),
    (160.0, 21.0),
    (195.0, 26.0),
    (235.0, 27.0),
    (274.16, 26.35),
    (286.16, 22.78),
    (296.16, 16.36),
    (304.16, 9.58),
    (310.16, 3.91),
    (GMP_HALF_LENGTH, 0.0),
)


def gmp_profile(control_table=GMP_CONTROL_TABLE, n_points=401, cut=GMP_CUT):
    """Multi-neck dumbbell interpolated through a control table.

    The spline is clamped to slope +1 at the left root and -1 at the right
    root so the metric closes smoothly at both poles.
    """
    table = np.asarray(control_table, dtype=float)
    if table.ndim != 2 or table.shape[1] != 2 or len(table) < 4:
        raise InvalidProfileError("control table must be an (n >= 4, 2) array of (x, psi)")
    xs, ys = table[:, 0], table[:, 1]
    if ys[0] != 0.0 or ys[-1] != 0.0:
        raise InvalidProfileError(
            f"control table must vanish at the pole roots (got psi={ys[0]:g} at x={xs[0]:g}, "
            f"psi={ys[-1]:g} at x={xs[-1]:g})")
    spline = CubicSpline(xs, ys, bc_type=((1, 1.0), (1, -1.0)))
    grid = uniform_grid(xs[0] + cut, xs[-1] - cut, n_points)
    psi = spline(grid)
    _check_dumbbell(grid, psi)
    dense = np.linspace(xs[0], xs[-1], 20 * n_points)
    slope = np.abs(spline(dense, 1))
    worst = int(np.argmax(slope))
    if slope[worst] > 1.0 + SLOPE_TOL:
        raise InvalidProfileError(
            f"|psi_x| = {slope[worst]:.6f} exceeds 1 at x={dense[worst]:.6g}")
    interior = spline(dense[1:-1])
    if np.any(interior <= 0):
        bad = dense[1:-1][np.argmax(interior <= 0)]
        raise InvalidProfileError(f"spline is non-positive at x={bad:.6g}")
    return RadialProfile(ProfileKind.DUMBBELL, grid, psi, np.ones_like(grid), grid[0], grid[-1])


# --- dimpled sphere ------------------------------------------------------------

def dimpled_sphere_profile(params=None, n_points=50):
    """Randomly modulated radius r(theta, 0) through evenly spaced control angles."""
    params = params or ProfileParams()
    eps = params.epsilon
    rng = np.random.default_rng(params.seed)
    theta_k = np.linspace(eps, math.pi - eps, params.n_control)
    radii = params.base_radius + params.amplitude * rng.uniform(-1.0, 1.0, params.n_control)
    grid = np.linspace(eps, math.pi - eps, n_points)
    r = CubicSpline(theta_k, radii, bc_type="natural")(grid)
    if np.any(r <= 0):
        raise InvalidProfileError("dimpled radius is non-positive")
    return RadialProfile(ProfileKind.SPHERE2D, grid, r, None, grid[0], grid[-1])


def round_sphere_profile(radius=1.0, n_points=50, epsilon=1e-3):
    grid = np.linspace(epsilon, math.pi - epsilon, n_points)
    return RadialProfile(ProfileKind.SPHERE2D, grid, np.full(n_points, float(radius)))
