"""Simulated lane perception, coefficient evolution between frames, and controller inputs."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curves import (
    FunctionRepr,
    ParametricRepr,
    RigidMotion2D,
    func_to_param,
    rotation,
    shift_function,
    shift_matrix,
    shift_parametric,
    transform_parametric,
    unchecked_parametric,
)
from .errors import PerceptionError, SingularCurveError
from .path import CurvatureProfile, func_coeffs_from_curvature
from .vehicle import RelativeState, VehicleParams


@dataclass(frozen=True)
class PerceptionFrame:
    coeffs: FunctionRepr
    timestamp: float
    tau_omega: float


def perceive(rel: RelativeState, profile: CurvatureProfile, delta: float, timestamp: float = 0.0) -> PerceptionFrame:
    """Noise-free camera output: the lane as ``eta(tau)`` in the body frame about tau = 0.

    The polynomial is the Taylor expansion at the observed point Omega, which
    sits at ``tau = |eps| cos(delta)``, re-expanded to the eta axis.
    """
    th = rel.theta_omega
    if abs(th) >= 0.5 * math.pi:
        raise PerceptionError(f"|theta_omega| = {abs(th):.3g} >= pi/2")
    k = profile.derivs(rel.s_omega)
    # lane tangent in the body frame points at -theta
    phi = func_coeffs_from_curvature(-th, *k, tol=0.0)
    phi[0] = -rel.eps_omega * math.sin(delta)
    tau_om = abs(rel.eps_omega) * math.cos(delta)
    at_omega = FunctionRepr(phi, tau_om)
    return PerceptionFrame(shift_function(at_omega, -tau_om), timestamp, tau_om)


def perturb(frame: PerceptionFrame, std, rng: np.random.Generator) -> PerceptionFrame:
    """Additive Gaussian noise on the function coefficients, per-order ``std``."""
    c = frame.coeffs.coeffs
    noisy = c + rng.standard_normal(c.size) * np.resize(np.asarray(std, dtype=float), c.size)
    return PerceptionFrame(FunctionRepr(noisy, frame.coeffs.x0), frame.timestamp, frame.tau_omega)


@dataclass(frozen=True)
class StateChanges:
    tau_t: float = 0.0
    eta_t: float = 0.0
    psi_t: float = 0.0
    s_t: float = 0.0
    x_t: float = 0.0
    y_t: float = 0.0
    earth_valid: bool = False


def estimate_state_changes(
    V_k: float,
    omega_k: float,
    T_step: float,
    eps_D: float,
    theta_D: float,
    params: VehicleParams,
    psi_k: float | None = None,
) -> StateChanges:
    """One explicit-Euler step of the camera motion from measured speed and yaw rate."""
    if T_step <= 0:
        raise ValueError("T_step must be positive")
    c = math.cos(theta_D)
    if abs(c) < 1e-9:
        raise SingularCurveError("cos(theta_D) vanished")
    d = params.d
    tau_t = V_k * T_step
    eta_t = d * omega_k * T_step
    s_t = (V_k + omega_k * eps_D) * T_step / c
    if psi_k is None:
        return StateChanges(tau_t, eta_t, omega_k * T_step, s_t)
    cp, sp = math.cos(psi_k), math.sin(psi_k)
    x_t = (V_k * cp - d * omega_k * sp) * T_step
    y_t = (V_k * sp + d * omega_k * cp) * T_step
    return StateChanges(tau_t, eta_t, omega_k * T_step, s_t, x_t, y_t, True)


def evolve_coeffs(phi: ParametricRepr, ch: StateChanges) -> ParametricRepr:
    """Lane coefficients in the next body frame, about the next eta-intercept."""
    if phi.s0 != 0.0:
        raise ValueError("representation must be expanded about s = 0")
    moved = transform_parametric(phi, RigidMotion2D(ch.psi_t, (ch.tau_t, ch.eta_t)))
    shifted = shift_parametric(moved, ch.s_t)
    # arc length is re-measured from the new intercept
    return unchecked_parametric(shifted.matrix, 0.0, shifted.arclength_normalized)


def vec(phi: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(phi).reshape(-1, order="F")


def unvec(v: np.ndarray, rows: int = 2) -> np.ndarray:
    return np.asarray(v).reshape(rows, -1, order="F")


@dataclass(frozen=True, eq=False)
class EvolutionModel:
    R: np.ndarray
    D: np.ndarray
    T: np.ndarray
    A: np.ndarray
    B: np.ndarray

    def apply(self, phi: np.ndarray) -> np.ndarray:
        return unvec(self.A @ vec(phi) + self.B)


def linearize(ch: StateChanges, order: int = 5) -> EvolutionModel:
    """Affine map on ``vec(phi)`` equivalent to :func:`evolve_coeffs`."""
    if order < 1:
        raise ValueError("order must be >= 1")
    R = rotation(ch.psi_t)
    D = np.zeros((2, order + 1))
    D[:, 0] = (ch.tau_t, ch.eta_t)
    T = shift_matrix(ch.s_t, order)
    A = np.kron(T, R.T)
    B = -A @ vec(D)
    return EvolutionModel(R, D, T, A, B)


def extract_control_inputs(phi: ParametricRepr) -> tuple:
    """(eps_D, theta_D, kappa_D) at the eta-intercept of the lane."""
    if phi.s0 != 0.0:
        raise ValueError("representation must be expanded about s = 0")
    xb, yh = phi.xcoeffs, phi.ycoeffs
    b2 = xb[2] if phi.order >= 2 else 0.0
    h2 = yh[2] if phi.order >= 2 else 0.0
    speed2 = yh[1] ** 2 + xb[1] ** 2
    if speed2 < 1e-12:
        raise SingularCurveError("degenerate lane representation")
    return -yh[0], -math.atan2(yh[1], xb[1]), (2 * h2 * xb[1] - 2 * yh[1] * b2) / speed2


class LaneEstimator:
    """Holds the latest lane estimate in parametric form.

    A perception update replaces the estimate; :meth:`predict` rolls it
    forward one control period. A measurement-fusion step (e.g. a Kalman
    update) would slot in at :meth:`update`.
    """

    def __init__(self):
        self.phi: ParametricRepr | None = None
        self.age = 0.0

    def update(self, frame: PerceptionFrame) -> ParametricRepr:
        self.phi = func_to_param(frame.coeffs)
        self.age = 0.0
        return self.phi

    def predict(self, ch: StateChanges, dt: float) -> ParametricRepr:
        if self.phi is None:
            raise RuntimeError("no estimate to predict from")
        self.phi = evolve_coeffs(self.phi, ch)
        self.age += dt
        return self.phi

    def control_inputs(self) -> tuple:
        return extract_control_inputs(self.phi)
