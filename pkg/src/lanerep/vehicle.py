"""Kinematics at the camera point, path-relative dynamics, and the path-following controller."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import kernels
from .errors import InfeasibleCurvatureError, ObservabilityError
from .path import PathTable, state_at


@dataclass(frozen=True)
class VehicleParams:
    l: float = 2.57
    d: float = 2.0
    delta: float = math.radians(60.0)
    V: float = 20.0
    gamma_sat: float = math.radians(30.0)
    k1: float = -2.57 / 2.0
    k2: float = 0.02

    def __post_init__(self):
        if self.l <= 0:
            raise ValueError("wheelbase l must be positive")
        if not 0 < self.delta <= math.pi / 2:
            raise ValueError("delta must lie in (0, pi/2]")
        if not 0 < self.gamma_sat < math.pi / 2:
            raise ValueError("gamma_sat must lie in (0, pi/2)")
        if self.V <= 0:
            raise ValueError("speed V must be positive")


DEFAULT_VEHICLE = VehicleParams()


@dataclass(frozen=True)
class Pose2D:
    x_Q: float
    y_Q: float
    psi: float


@dataclass(frozen=True)
class RelativeState:
    s_omega: float
    eps_omega: float
    theta_omega: float


def sign(v: float) -> float:
    # sign(0) taken as +1
    return 1.0 if v >= 0.0 else -1.0


def absolute_dynamics(pose: Pose2D, gamma: float, params: VehicleParams) -> tuple:
    """(x_dot, y_dot, psi_dot) of the camera point for steering angle ``gamma``."""
    omega = params.V / params.l * math.tan(gamma)
    c, s = math.cos(pose.psi), math.sin(pose.psi)
    return (
        params.V * c - params.d * omega * s,
        params.V * s + params.d * omega * c,
        omega,
    )


def relative_dynamics(rel: RelativeState, gamma: float, kappa_omega: float, params: VehicleParams) -> tuple:
    """(s_dot, eps_dot, theta_dot) with respect to the observed path point.

    Raises :class:`ObservabilityError` when the FOV-edge construction degenerates.
    """
    out = kernels.relative_rhs(
        rel.s_omega, rel.eps_omega, rel.theta_omega, math.tan(gamma), kappa_omega,
        params.V, params.l, params.d, params.delta,
    )
    if out[3] != kernels.STEP_OK:
        raise ObservabilityError(f"sin(delta -/+ theta) vanished at theta = {rel.theta_omega}")
    return out[:3]


def relative_dynamics_printed(rel: RelativeState, gamma: float, kappa_omega: float, params: VehicleParams) -> tuple:
    out = kernels.relative_rhs_printed(
        rel.s_omega, rel.eps_omega, rel.theta_omega, math.tan(gamma), kappa_omega,
        params.V, params.l, params.d, params.delta,
    )
    if out[3] != kernels.STEP_OK:
        raise ObservabilityError(f"sin(delta - theta) vanished at theta = {rel.theta_omega}")
    return out[:3]


def _ray_angle(psi: float, eps: float, delta: float) -> float:
    return psi - sign(eps) * delta


def absolute_from_relative(rel: RelativeState, path: PathTable, delta: float) -> Pose2D:
    """Camera pose from the path-relative state."""
    p = state_at(path, rel.s_omega)
    psi = p.alpha + rel.theta_omega
    e = abs(rel.eps_omega)
    b = _ray_angle(psi, rel.eps_omega, delta)
    return Pose2D(p.x - e * math.cos(b), p.y - e * math.sin(b), psi)


def relative_from_absolute(pose: Pose2D, path: PathTable, delta: float, s_guess: float, window: float = 30.0) -> RelativeState:
    """Inverse of :func:`absolute_from_relative` near ``s_guess``.

    The side of the path is taken from the closest point; the observed point is
    then where the matching FOV edge ray from Q meets the path.
    """
    Q = np.array([pose.x_Q, pose.y_Q])

    def along(s):
        p = state_at(path, s)
        return (Q[0] - p.x) * math.cos(p.alpha) + (Q[1] - p.y) * math.sin(p.alpha)

    s_c = brentq(along, s_guess - window, s_guess + window, xtol=1e-13)
    pc = state_at(path, s_c)
    lateral = -(Q[0] - pc.x) * math.sin(pc.alpha) + (Q[1] - pc.y) * math.cos(pc.alpha)
    side = sign(lateral)
    b = pose.psi - side * delta
    ray = np.array([math.cos(b), math.sin(b)])

    def cross(s):
        p = state_at(path, s)
        v = np.array([p.x, p.y]) - Q
        return ray[0] * v[1] - ray[1] * v[0]

    # bracket the crossing nearest the closest point
    grid = np.linspace(s_c - window, s_c + window, 241)
    vals = np.array([cross(g) for g in grid])
    idx = np.flatnonzero(vals[:-1] * vals[1:] <= 0)
    if idx.size == 0:
        raise ObservabilityError("FOV edge ray does not meet the path near s_guess")
    i = idx[np.argmin(np.abs(grid[idx] - s_c))]
    s_om = grid[i] if vals[i] == 0.0 else brentq(cross, grid[i], grid[i + 1], xtol=1e-13)
    p = state_at(path, s_om)
    dist = math.hypot(p.x - Q[0], p.y - Q[1])
    return RelativeState(s_om, side * dist, _wrap(pose.psi - p.alpha))


def _wrap(a: float) -> float:
    return (a + math.pi) % (2 * math.pi) - math.pi


def wrapper_g(x: float) -> float:
    """Odd saturation (2/pi) * arctan(pi x / 2), bounded by 1 in magnitude."""
    return 2.0 / math.pi * math.atan(0.5 * math.pi * x)


def _check_feasible(kappa: float, params: VehicleParams) -> float:
    dk = params.d * kappa
    if abs(dk) >= 1.0:
        raise InfeasibleCurvatureError(f"|d * kappa| = {abs(dk):.3g} >= 1")
    return dk


def feedforward(kappa_D: float, params: VehicleParams) -> float:
    dk = _check_feasible(kappa_D, params)
    return math.atan(params.l * kappa_D / math.sqrt(1.0 - dk * dk))


def feedback(kappa_D: float, theta_D: float, eps_D: float, params: VehicleParams) -> float:
    dk = _check_feasible(kappa_D, params)
    theta0 = -math.asin(dk)
    arg = params.k1 / params.gamma_sat * (theta_D - theta0 + math.atan(params.k2 * eps_D))
    return params.gamma_sat * wrapper_g(arg)


def controller(kappa_D: float, theta_D: float, eps_D: float, params: VehicleParams) -> float:
    """Steering command: curvature feedforward plus saturated heading/deviation feedback.

    The sum is clamped to the physical limit ``gamma_sat``.
    """
    gamma = feedforward(kappa_D, params) + feedback(kappa_D, theta_D, eps_D, params)
    return min(max(gamma, -params.gamma_sat), params.gamma_sat)


def equilibrium(kappa_star: float, params: VehicleParams) -> tuple:
    """(theta*, s_dot*) of perfect following on constant curvature; eps* = 0."""
    dk = _check_feasible(kappa_star, params)
    return -math.asin(dk), params.V / math.sqrt(1.0 - dk * dk)
