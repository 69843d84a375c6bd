"""Reference paths generated from curvature, and their exact local representations."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .curves import FunctionRepr, ParametricRepr
from .errors import PathRangeError, VerticalTangentError

DEFAULT_STEP = 0.01


@dataclass(frozen=True)
class CurvatureProfile:
    """kappa(s) from a closed family: zero, constant, or raised cosine.

    For the cosine profile ``kappa = kappa_max/2 * (1 - cos(2 pi s / s_period))``.
    """

    kind: str = "zero"
    kappa_max: float = 0.0
    s_period: float = 0.0

    @property
    def code(self) -> tuple:
        codes = {"zero": kernels.PROFILE_ZERO, "constant": kernels.PROFILE_CONSTANT, "cosine": kernels.PROFILE_COSINE}
        return codes[self.kind], float(self.kappa_max), float(self.s_period)

    def kappa(self, s: float) -> float:
        return self.derivs(s)[0]

    def dkappa(self, s: float) -> float:
        return self.derivs(s)[1]

    def d2kappa(self, s: float) -> float:
        return self.derivs(s)[2]

    def d3kappa(self, s: float) -> float:
        return self.derivs(s)[3]

    def derivs(self, s: float) -> tuple:
        """(kappa, kappa', kappa'', kappa''') at ``s``."""
        return kernels.kappa_derivs(*self.code, float(s))

    def turning(self, length: float) -> float:
        """Total heading change over ``[0, length]``."""
        if self.kind == "cosine":
            w = 2 * math.pi / self.s_period
            return 0.5 * self.kappa_max * (length - math.sin(w * length) / w)
        if self.kind == "constant":
            return self.kappa_max * length
        return 0.0


def cosine_profile(kappa_max: float, s_T: float) -> CurvatureProfile:
    if s_T <= 0:
        raise ValueError("s_T must be positive")
    return CurvatureProfile("cosine", kappa_max, s_T)


def constant_profile(kappa: float) -> CurvatureProfile:
    return CurvatureProfile("constant", kappa)


def zero_profile() -> CurvatureProfile:
    return CurvatureProfile("zero")


def closure_check(kappa_max: float, s_T: float, corners: int, tol: float = 1e-9) -> bool:
    """True when the cosine path closes after ``corners`` periods."""
    if corners < 2:
        raise ValueError("corners must be >= 2")
    return abs(kappa_max * s_T - 4 * math.pi / corners) < tol


@dataclass(frozen=True)
class PathState:
    s: float
    x: float
    y: float
    alpha: float


@dataclass(frozen=True, eq=False)
class PathTable:
    """Uniformly sampled path; ``period`` is set for closed paths and enables wrap-around."""

    s: np.ndarray
    x: np.ndarray
    y: np.ndarray
    alpha: np.ndarray
    h: float
    profile: CurvatureProfile
    period: float | None = None

    def __len__(self):
        return self.s.size

    def record(self, i: int) -> PathState:
        return PathState(float(self.s[i]), float(self.x[i]), float(self.y[i]), float(self.alpha[i]))


def integrate_path(
    profile: CurvatureProfile,
    init: PathState = PathState(0.0, 0.0, 0.0, 0.0),
    s_end: float = 1000.0,
    h: float = DEFAULT_STEP,
    period: float | None = None,
) -> PathTable:
    """Fixed-step RK4 solution of the curve kinematics from ``init`` to ``s_end``."""
    if h <= 0:
        raise ValueError("h must be positive")
    if s_end <= init.s:
        raise ValueError("s_end must exceed the initial arc length")
    span = s_end - init.s
    n_steps = int(math.floor(span / h + 1e-9))
    h_last = span - n_steps * h
    if h_last < 1e-9 * h:
        h_last = 0.0
    s, x, y, a = kernels.rk4_path(*profile.code, init.s, init.x, init.y, init.alpha, h, n_steps, h_last)
    for arr in (s, x, y, a):
        arr.flags.writeable = False
    return PathTable(s, x, y, a, h, profile, period)


def closed_path(kappa_max: float, s_T: float, corners: int, h: float = DEFAULT_STEP) -> PathTable:
    """One lap of the closed cosine path starting at the origin heading +x."""
    if not closure_check(kappa_max, s_T, corners):
        raise ValueError("kappa_max * s_T must equal 4 pi / corners for a closed path")
    L = corners * s_T
    return integrate_path(cosine_profile(kappa_max, s_T), s_end=L, h=h, period=L)


def _hermite(p0, p1, m0, m1, h, u):
    t = u / h
    t2, t3 = t * t, t * t * t
    return (
        (2 * t3 - 3 * t2 + 1) * p0
        + (t3 - 2 * t2 + t) * h * m0
        + (-2 * t3 + 3 * t2) * p1
        + (t3 - t2) * h * m1
    )


def state_at(table: PathTable, s: float) -> PathState:
    """Cubic Hermite interpolation using the exact slopes (cos a, sin a, kappa)."""
    laps = 0
    s_in = s
    if table.period is not None:
        laps = math.floor((s - table.s[0]) / table.period)
        s = s - laps * table.period
    elif s < table.s[0] - 1e-12 or s > table.s[-1] + 1e-12:
        raise PathRangeError(f"s = {s} outside [{table.s[0]}, {table.s[-1]}]")
    i = int((s - table.s[0]) / table.h)
    i = min(max(i, 0), table.s.size - 2)
    s0, s1 = table.s[i], table.s[i + 1]
    u = s - s0
    if u == 0.0:
        rec = table.record(i)
    else:
        hh = s1 - s0
        a0, a1 = table.alpha[i], table.alpha[i + 1]
        k0, k1 = table.profile.kappa(s0), table.profile.kappa(s1)
        x = _hermite(table.x[i], table.x[i + 1], math.cos(a0), math.cos(a1), hh, u)
        y = _hermite(table.y[i], table.y[i + 1], math.sin(a0), math.sin(a1), hh, u)
        a = _hermite(a0, a1, k0, k1, hh, u)
        rec = PathState(s, float(x), float(y), float(a))
    if laps:
        # heading keeps accumulating across laps of a closed path
        turn = table.alpha[-1] - table.alpha[0]
        rec = PathState(s_in, rec.x, rec.y, rec.alpha + laps * turn)
    return rec


def param_repr_at(profile: CurvatureProfile, state: PathState) -> ParametricRepr:
    """Fifth-order arc-length representation of the path about ``state``."""
    k0, k1, k2, k3 = profile.derivs(state.s)
    c, sn = math.cos(state.alpha), math.sin(state.alpha)
    q = k0**4 - 3 * k1**2 - 4 * k0 * k2
    r = 6 * k0**2 * k1 - k3
    xb = [
        state.x,
        c,
        -0.5 * k0 * sn,
        -(k0**2 * c + k1 * sn) / 6,
        -(k2 - k0**3) * sn / 24 - k0 * k1 * c / 8,
        (q * c + r * sn) / 120,
    ]
    yh = [
        state.y,
        sn,
        0.5 * k0 * c,
        (-(k0**2) * sn + k1 * c) / 6,
        (k2 - k0**3) * c / 24 - k0 * k1 * sn / 8,
        (q * sn - r * c) / 120,
    ]
    return ParametricRepr(xb, yh, state.s, arclength_normalized=True)


def func_coeffs_from_curvature(slope_angle: float, k0, k1, k2, k3, tol: float = 1e-6) -> np.ndarray:
    """Function-representation coefficients 1..5 of a curve with the given local tangent angle.

    Returns six values with entry 0 left at zero for the caller to fill.
    """
    c = math.cos(slope_angle)
    if abs(c) < tol:
        raise VerticalTangentError(f"|cos(alpha)| = {abs(c):.3g} below {tol:g}")
    t = math.tan(slope_angle)
    return np.array([
        0.0,
        t,
        k0 / (2 * c**3),
        (k1 + 3 * k0**2 * t) / (6 * c**4),
        5 * k0**3 / (8 * c**7) + (k2 - 12 * k0**3 + 10 * k0 * k1 * t) / (24 * c**5),
        7 * k0**2 * (k1 + k0**2 * t) / (8 * c**8)
        + (k3 - 86 * k0**2 * k1) / (120 * c**6)
        + (3 * k0 * k2 + 2 * k1**2 - 12 * k0**4) * t / (24 * c**6),
    ])


def func_repr_at(profile: CurvatureProfile, state: PathState, tol: float = 1e-6) -> FunctionRepr:
    """Fifth-order ``y(x)`` representation of the path about ``state``."""
    phi = func_coeffs_from_curvature(state.alpha, *profile.derivs(state.s), tol=tol)
    phi[0] = state.y
    return FunctionRepr(phi, state.x)


def write_csv(table: PathTable, path) -> None:
    """CSV with header ``s,x,y,alpha,kappa`` at the table sampling."""
    kap = kernels._kappa_vec(*table.profile.code, np.asarray(table.s))
    with open(path, "w", newline="") as fh:
        fh.write("s,x,y,alpha,kappa\n")
        for row in zip(table.s, table.x, table.y, table.alpha, kap):
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
