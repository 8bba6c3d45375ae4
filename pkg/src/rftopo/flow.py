"""Ricci flow of rotationally symmetric metrics by the method of lines.

Dumbbells on S^3 carry two fields, ``psi`` (warping radius) and ``phi``
(radial stretch), with

    psi_t = -(K + L) psi,   phi_t = -2 K phi,

where ``K = -psi_ss / psi`` and ``L = (1 - psi_s^2) / psi^2`` and
``d/ds = (1/phi) d/dx``.  The 2-sphere ``r(theta)^2 g_can`` is evolved as
``w = r^2`` with ``w_t = -R w`` and ``R = 2 (1 - Lap ln r) / w``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .errors import DegenerateStateError, InsufficientDataError, StiffnessError
from .profiles import ProfileKind, RadialProfile

N_DIM = 2  # fibre dimension of the dumbbell warped product


class StopReason(str, enum.Enum):
    MAX_TIME = "MaxTime"
    STIFF = "Stiff"
    CURVATURE_CAP = "CurvatureCap"
    PSI_FLOOR = "PsiFloor"


class SingularityType(str, enum.Enum):
    TYPE_I = "TypeI"
    TYPE_II_SUSPECT = "TypeII-suspect"
    NO_BLOWUP = "NoBlowup"


@dataclass(frozen=True)
class FlowState:
    t: float
    grid: np.ndarray
    psi: np.ndarray
    phi: np.ndarray | None
    kind: ProfileKind

    @property
    def h(self):
        return _spacing(self.grid)

    @classmethod
    def from_profile(cls, profile: RadialProfile):
        phi = None if profile.phi is None else profile.phi.copy()
        return cls(0.0, profile.grid.copy(), profile.psi.copy(), phi, profile.kind)


@dataclass(frozen=True)
class CurvatureField:
    K: np.ndarray
    Lcurv: np.ndarray
    R: np.ndarray
    rm_norm_sq: np.ndarray


@dataclass
class Schedule:
    dt: float = 1e-5
    cadence: int = 1000
    max_time: float = 10.0
    curvature_cap: float = 1e8
    psi_floor: float = 1e-4
    c_cfl: float = 0.2
    dirichlet_phi: bool = True
    sample_every: int = 1
    tail_ratio: float = 10.0

    def __post_init__(self):
        if self.dt < 0:
            raise ValueError("dt must be non-negative")
        if self.cadence < 1 or self.sample_every < 1:
            raise ValueError("cadence and sample_every must be positive integers")
        if not self.tail_ratio > 1:
            raise ValueError("tail_ratio must exceed 1")


@dataclass
class FlowDiagnostics:
    t_singular_estimate: float | None
    type1_indicator: list  # (t, (T - t) * max|Rm|) pairs
    stop_reason: StopReason
    sample_t: np.ndarray = field(default_factory=lambda: np.empty(0))
    sample_rm_max: np.ndarray = field(default_factory=lambda: np.empty(0))


@dataclass
class Snapshot:
    index: int
    step: int
    state: FlowState
    curvature: CurvatureField


@dataclass
class Trajectory:
    snapshots: list
    diagnostics: FlowDiagnostics

    @property
    def times(self):
        return np.array([s.state.t for s in self.snapshots])

    def to_dict(self):
        d = self.diagnostics
        return {
            "stop_reason": d.stop_reason.value,
            "t_singular_estimate": d.t_singular_estimate,
            "final_t": self.snapshots[-1].state.t,
            "n_snapshots": len(self.snapshots),
            "snapshots": [{"index": s.index, "step": s.step, "t": s.state.t}
                          for s in self.snapshots],
            "samples": {"t": _thin(d.sample_t),
                        "max_abs_rm": _thin(d.sample_rm_max)},
            "type1_indicator": [[float(a), float(b)] for a, b in _thin(d.type1_indicator)],
        }


def _thin(seq, keep=400):
    """Roughly ``2 * keep`` items: an even spread plus the full final stretch."""
    seq = list(seq)
    if len(seq) <= 2 * keep:
        return [v if isinstance(v, tuple) else float(v) for v in seq]
    stride = -(-(len(seq) - keep) // keep)
    head = seq[:len(seq) - keep:stride]
    return [v if isinstance(v, tuple) else float(v) for v in head + seq[-keep:]]


def _spacing(grid):
    return (float(grid[-1]) - float(grid[0])) / (len(grid) - 1)


def _dumbbell_rm_sq(K, L):
    return 4 * N_DIM * K * K + 2 * N_DIM * (N_DIM - 1) * L * L


def _second_derivatives(f, h):
    """First and second x-derivatives; central inside, one-sided 2nd order at ends."""
    fx = np.empty_like(f)
    fxx = np.empty_like(f)
    fx[1:-1] = (f[2:] - f[:-2]) / (2 * h)
    fx[0] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h)
    fx[-1] = (3 * f[-1] - 4 * f[-2] + f[-3]) / (2 * h)
    fxx[1:-1] = ((f[2:] + f[:-2]) - 2 * f[1:-1]) / (h * h)
    fxx[0] = (2 * f[0] - 5 * f[1] + 4 * f[2] - f[3]) / (h * h)
    fxx[-1] = (2 * f[-1] - 5 * f[-2] + 4 * f[-3] - f[-4]) / (h * h)
    return fx, fxx


def _require_positive(psi, name="psi"):
    if not np.all(np.isfinite(psi)):
        raise DegenerateStateError(f"{name} is not finite")
    if np.any(psi <= 0):
        i = int(np.argmax(psi <= 0))
        raise DegenerateStateError(f"{name} <= 0 at grid index {i}")


def curvature_dumbbell(state: FlowState) -> CurvatureField:
    psi, phi = state.psi, state.phi
    _require_positive(psi)
    h = state.h
    px, pxx = _second_derivatives(psi, h)
    fx, _ = _second_derivatives(phi, h)
    K = -(-fx * px / phi**2 + pxx / phi) / (phi * psi)
    ps = px / phi
    L = (1.0 - ps * ps) / (psi * psi)
    R = 2 * N_DIM * K + N_DIM * (N_DIM - 1) * L
    return CurvatureField(K, L, R, _dumbbell_rm_sq(K, L))


def _cot(grid):
    return np.cos(grid) / np.sin(grid)


def curvature_sphere2d(state: FlowState) -> CurvatureField:
    r = state.psi
    _require_positive(r, "r")
    w = r * r
    _, R = kernels.sphere_rhs(w, _cot(state.grid), state.h)
    half = 0.5 * R
    return CurvatureField(half, half.copy(), R, R * R)


def curvature(state: FlowState) -> CurvatureField:
    if state.kind is ProfileKind.DUMBBELL:
        return curvature_dumbbell(state)
    return curvature_sphere2d(state)


@dataclass(frozen=True)
class Rates:
    """Pointwise time derivatives; ``w`` is d(r^2)/dt for the 2-sphere."""

    psi: np.ndarray | None = None
    phi: np.ndarray | None = None
    w: np.ndarray | None = None


def rf_rhs(state: FlowState, dirichlet_phi=True) -> Rates:
    _require_positive(state.psi)
    if state.kind is ProfileKind.DUMBBELL:
        dpsi, dphi, _, _ = kernels.dumbbell_rhs(state.psi, state.phi, state.h, dirichlet_phi)
        return Rates(psi=dpsi, phi=dphi)
    dw, _ = kernels.sphere_rhs(state.psi * state.psi, _cot(state.grid), state.h)
    return Rates(w=dw)


def stable_dt(state: FlowState, c_cfl=0.2):
    """Largest step allowed by the parabolic guard c * dx^2 * min(psi^2)."""
    return c_cfl * state.h**2 * float(np.min(state.psi)) ** 2


def step(state: FlowState, dt, c_cfl=0.2, dirichlet_phi=True) -> FlowState:
    """One classical RK4 step of the method-of-lines system."""
    if dt < 0:
        raise ValueError("dt must be non-negative")
    if dt == 0:
        return replace(state, psi=state.psi.copy(),
                       phi=None if state.phi is None else state.phi.copy())
    if dt > stable_dt(state, c_cfl):
        raise StiffnessError(f"dt={dt:g} exceeds stability bound {stable_dt(state, c_cfl):g}")
    t_new = state.t + dt
    h = state.h
    if state.kind is ProfileKind.DUMBBELL:
        k1psi, k1phi, _, _ = kernels.dumbbell_rhs(state.psi, state.phi, h, dirichlet_phi)
        psi, phi = kernels.rk4_dumbbell(state.psi, state.phi, h, dt, dirichlet_phi, k1psi, k1phi)
        if dirichlet_phi:
            phi[0] = phi[-1] = 1.0 + t_new
        return replace(state, t=t_new, psi=psi, phi=phi)
    cot = _cot(state.grid)
    w = state.psi * state.psi
    k1, _ = kernels.sphere_rhs(w, cot, h)
    w = kernels.rk4_sphere(w, cot, h, dt, k1)
    return replace(state, t=t_new, psi=np.sqrt(w))


def evolve(profile: RadialProfile, schedule: Schedule | None = None) -> Trajectory:
    """Integrate from ``profile`` until a stop condition, recording snapshots.

    Time is always ``n * dt`` so runs with the same schedule are bit-identical.
    """
    sch = schedule or Schedule()
    dumbbell = profile.kind is ProfileKind.DUMBBELL
    grid = profile.grid.copy()
    h = _spacing(grid)
    dt = sch.dt
    if dumbbell:
        psi = profile.psi.copy()
        phi = profile.phi.copy()
    else:
        cot = _cot(grid)
        w = profile.psi * profile.psi

    snapshots = []
    sample_t, sample_rm = [], []
    n = 0
    t = 0.0
    while True:
        if dumbbell:
            k1psi, k1phi, K, L = kernels.dumbbell_rhs(psi, phi, h, sch.dirichlet_phi)
            rm_max = math.sqrt(float(np.max(_dumbbell_rm_sq(K, L))))
            R_max = float(np.max(np.abs(2 * N_DIM * K + N_DIM * (N_DIM - 1) * L)))
            radius = psi
        else:
            k1, R = kernels.sphere_rhs(w, cot, h)
            R_max = rm_max = float(np.max(np.abs(R)))
            radius = np.sqrt(w)
        min_radius = float(np.min(radius))

        reason = None
        if not (np.all(np.isfinite(radius)) and math.isfinite(R_max)) or min_radius <= 0:
            reason = StopReason.STIFF
        elif min_radius <= sch.psi_floor:
            reason = StopReason.PSI_FLOOR
        elif R_max >= sch.curvature_cap:
            reason = StopReason.CURVATURE_CAP
        elif t >= sch.max_time - 0.5 * dt:  # n * dt may round just below
            reason = StopReason.MAX_TIME
        elif dt > sch.c_cfl * h * h * min_radius * min_radius:
            reason = StopReason.STIFF
        elif dt == 0:
            reason = StopReason.MAX_TIME

        if reason is None or math.isfinite(rm_max):
            if n % sch.sample_every == 0 or reason is not None:
                sample_t.append(t)
                sample_rm.append(rm_max)
        if n % sch.cadence == 0 or reason is not None:
            state = FlowState(t, grid, radius.copy(), phi.copy() if dumbbell else None,
                              profile.kind)
            try:
                curv = curvature(state)
            except DegenerateStateError:
                curv = None
            if curv is not None:
                snapshots.append(Snapshot(len(snapshots), n, state, curv))
        if reason is not None:
            break

        if dumbbell:
            psi, phi = kernels.rk4_dumbbell(psi, phi, h, dt, sch.dirichlet_phi, k1psi, k1phi)
        else:
            w = kernels.rk4_sphere(w, cot, h, dt, k1)
        n += 1
        t = n * dt
        if dumbbell and sch.dirichlet_phi:
            phi[0] = phi[-1] = 1.0 + t

    diag = diagnose(np.array(sample_t), np.array(sample_rm), reason, sch.tail_ratio)
    return Trajectory(snapshots, diag)


def estimate_blowup_time(t, rm_max, tail_ratio=10.0):
    """Extrapolate T from a straight-line fit of 1/max|Rm| over the tail.

    The tail is every sample whose max|Rm| is within ``tail_ratio`` of the
    last one, i.e. the final decade of curvature growth by default.
    """
    t = np.asarray(t, dtype=float)
    rm_max = np.asarray(rm_max, dtype=float)
    ok = np.isfinite(rm_max) & (rm_max > 0)
    t, rm_max = t[ok], rm_max[ok]
    if len(t) < 3:
        return None
    # final contiguous stretch within tail_ratio of the last value, and only
    # after curvature has stopped decaying (dimples smooth out first)
    low = np.flatnonzero(rm_max < rm_max[-1] / tail_ratio)
    start = max(int(low[-1]) + 1 if low.size else 0, int(np.argmin(rm_max)))
    tail = np.zeros(len(t), dtype=bool)
    tail[start:] = True
    if tail.sum() < 3:
        tail = np.zeros_like(tail)
        tail[-3:] = True
    slope, intercept = np.polyfit(t[tail], 1.0 / rm_max[tail], 1)
    if not slope < 0:
        return None
    T = -intercept / slope
    if not math.isfinite(T) or T < t[-1]:
        return None
    return float(T)


def diagnose(sample_t, sample_rm, stop_reason, tail_ratio=10.0) -> FlowDiagnostics:
    T = estimate_blowup_time(sample_t, sample_rm, tail_ratio)
    indicator = []
    if T is not None:
        for ti, mi in zip(sample_t, sample_rm):
            if ti < T and math.isfinite(mi):
                indicator.append((float(ti), float((T - ti) * mi)))
    return FlowDiagnostics(T, indicator, stop_reason, np.asarray(sample_t), np.asarray(sample_rm))


def last_decade(diagnostics: FlowDiagnostics, min_samples=10):
    """Indicator samples with T - t in the last decade before the stop.

    The decade starts at the closest sample to T, but never closer than
    ``min_samples`` sample spacings: right at the stop, the error in T
    itself dominates (T - t).
    """
    T = diagnostics.t_singular_estimate
    if T is None or not diagnostics.type1_indicator:
        return np.empty(0), np.empty(0)
    arr = np.asarray(diagnostics.type1_indicator, dtype=float)
    tau = T - arr[:, 0]
    keep = tau > 0
    tau, vals = tau[keep], arr[keep, 1]
    if tau.size == 0:
        return tau, vals
    lo = tau.min()
    if tau.size > 1:
        lo = max(lo, min_samples * float(np.median(np.abs(np.diff(arr[keep, 0])))))
    sel = (tau >= lo) & (tau <= 10.0 * lo)
    return tau[sel], vals[sel]


def classify_singularity(diagnostics: FlowDiagnostics, band=0.1, min_samples=10):
    """Type-I / Type-II-suspect / no blow-up from the indicator trend.

    The slope of log((T - t) max|Rm|) against log(T - t) over the last decade
    decides: flat means Type I, negative (indicator grows as t -> T) means
    Type II is suspected.
    """
    n_samples = len(diagnostics.sample_t)
    if n_samples < min_samples:
        raise InsufficientDataError(f"need at least {min_samples} samples, got {n_samples}")
    if diagnostics.t_singular_estimate is None:
        return SingularityType.NO_BLOWUP
    tau, vals = last_decade(diagnostics, min_samples)
    good = vals > 0
    tau, vals = tau[good], vals[good]
    if tau.size < min_samples or np.ptp(np.log(tau)) == 0:
        raise InsufficientDataError("too few indicator samples in the last decade")
    slope = np.polyfit(np.log(tau), np.log(vals), 1)[0]
    if abs(slope) <= band:
        return SingularityType.TYPE_I
    if slope < -band:
        return SingularityType.TYPE_II_SUSPECT
    return SingularityType.NO_BLOWUP
