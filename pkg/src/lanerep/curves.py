"""Polynomial curve representations and the exact maps between them.

Two local descriptions of a planar curve are used throughout the package:

* :class:`FunctionRepr` -- ``y(x) = sum(phi[n] * (x - x0)**n)``
* :class:`ParametricRepr` -- ``x(s), y(s)`` as polynomials in arc length
  about ``s0``; the coefficient matrix has rows ``(xcoeffs, ycoeffs)``.

Parametric coefficients are closed under re-expansion (:func:`shift_parametric`)
and rigid motions (:func:`transform_parametric`); function coefficients only
under re-expansion. :func:`func_to_param` and :func:`param_to_func` convert
between the two up to fifth order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SingularCurveError, VerticalTangentError

MAX_ORDER = 5
TANGENT_TOL = 1e-6
NORMALIZED_TOL = 1e-9


def _frozen(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1 or arr.size < 2:
        raise ValueError(f"{name} must be a 1-D row of at least two coefficients")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class FunctionRepr:
    coeffs: np.ndarray
    x0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _frozen(self.coeffs, "coeffs"))
        object.__setattr__(self, "x0", float(self.x0))

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    def __eq__(self, other):
        if not isinstance(other, FunctionRepr):
            return NotImplemented
        return self.x0 == other.x0 and np.array_equal(self.coeffs, other.coeffs)

    __hash__ = None


@dataclass(frozen=True)
class ParametricRepr:
    xcoeffs: np.ndarray
    ycoeffs: np.ndarray
    s0: float = 0.0
    arclength_normalized: bool = False

    def __post_init__(self):
        xc = _frozen(self.xcoeffs, "xcoeffs")
        yc = _frozen(self.ycoeffs, "ycoeffs")
        if xc.size != yc.size:
            raise ValueError("xcoeffs and ycoeffs must have the same length")
        object.__setattr__(self, "xcoeffs", xc)
        object.__setattr__(self, "ycoeffs", yc)
        object.__setattr__(self, "s0", float(self.s0))
        if self.arclength_normalized:
            speed = xc[1] ** 2 + yc[1] ** 2 - 1.0
            bend = xc[1] * xc[2] + yc[1] * yc[2] if xc.size > 2 else 0.0
            if abs(speed) > NORMALIZED_TOL or abs(bend) > NORMALIZED_TOL:
                raise ValueError("coefficients are not arc-length normalized")

    @property
    def order(self) -> int:
        return self.xcoeffs.size - 1

    @property
    def matrix(self) -> np.ndarray:
        """2 x (N+1) coefficient matrix, rows (x, y)."""
        return np.vstack([self.xcoeffs, self.ycoeffs])

    @classmethod
    def from_matrix(cls, phi, s0: float = 0.0, arclength_normalized: bool = False) -> "ParametricRepr":
        phi = np.asarray(phi, dtype=float)
        return cls(phi[0], phi[1], s0, arclength_normalized)

    def __eq__(self, other):
        if not isinstance(other, ParametricRepr):
            return NotImplemented
        return (
            self.s0 == other.s0
            and self.arclength_normalized == other.arclength_normalized
            and np.array_equal(self.xcoeffs, other.xcoeffs)
            and np.array_equal(self.ycoeffs, other.ycoeffs)
        )

    __hash__ = None


@dataclass(frozen=True)
class RigidMotion2D:
    """Target-to-source frame change ``r = R(psi) @ r_hat + d``."""

    psi: float = 0.0
    d: tuple = field(default=(0.0, 0.0))

    def __post_init__(self):
        object.__setattr__(self, "psi", float(self.psi))
        object.__setattr__(self, "d", (float(self.d[0]), float(self.d[1])))

    @property
    def rotation(self) -> np.ndarray:
        return rotation(self.psi)

    def inverse(self) -> "RigidMotion2D":
        R = self.rotation
        back = -R.T @ np.asarray(self.d)
        return RigidMotion2D(-self.psi, (back[0], back[1]))


def unchecked_parametric(phi: np.ndarray, s0: float, normalized: bool) -> ParametricRepr:
    # Operations on an existing curve keep its flag without re-validating:
    # after a shift the truncated polynomial is only approximately unit-speed.
    out = ParametricRepr(phi[0], phi[1], s0)
    object.__setattr__(out, "arclength_normalized", bool(normalized))
    return out


def rotation(psi: float) -> np.ndarray:
    c, s = math.cos(psi), math.sin(psi)
    return np.array([[c, -s], [s, c]])


# --- evaluation -----------------------------------------------------------


def _horner(coeffs: np.ndarray, u: float) -> float:
    acc = 0.0
    for c in coeffs[::-1]:
        acc = acc * u + c
    return acc


def _derivative_values(coeffs: np.ndarray, u: float, k: int) -> np.ndarray:
    out = np.empty(k + 1)
    c = np.array(coeffs, dtype=float)
    for j in range(k + 1):
        out[j] = _horner(c, u)
        c = c[1:] * np.arange(1, c.size)
    return out


def eval_function(repr: FunctionRepr, x: float) -> float:
    return _horner(repr.coeffs, x - repr.x0)


def eval_parametric(repr: ParametricRepr, s: float, deriv_order: int = 0):
    """Position and arc-length derivatives up to ``deriv_order`` at ``s``.

    Returns two arrays ``(xs, ys)`` where ``xs[j]`` is d^j x / ds^j.
    """
    if deriv_order < 0 or deriv_order > repr.order:
        raise ValueError(f"deriv_order must be in [0, {repr.order}], got {deriv_order}")
    u = s - repr.s0
    return (
        _derivative_values(repr.xcoeffs, u, deriv_order),
        _derivative_values(repr.ycoeffs, u, deriv_order),
    )


# --- shifting -------------------------------------------------------------


def _binomial_rows(order: int) -> np.ndarray:
    # Pascal recurrence, exact in float for the small orders used here.
    C = np.zeros((order + 1, order + 1))
    for n in range(order + 1):
        C[n, 0] = 1.0
        for m in range(1, n + 1):
            C[n, m] = C[n - 1, m - 1] + (C[n - 1, m] if m < n else 0.0)
    return C


def shift_matrix(s_tilde: float, order: int) -> np.ndarray:
    """Upper-triangular re-expansion matrix, entry (m, n) = C(n, m) * s_tilde**(n - m).

    ``T(s_tilde) @ phi.T`` gives the coefficients about ``s0 + s_tilde``.
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    C = _binomial_rows(order)
    T = np.zeros((order + 1, order + 1))
    for m in range(order + 1):
        for n in range(m, order + 1):
            T[m, n] = C[n, m] * s_tilde ** (n - m)
    return T


def shift_parametric(repr: ParametricRepr, s_tilde: float) -> ParametricRepr:
    T = shift_matrix(s_tilde, repr.order)
    return unchecked_parametric((T @ repr.matrix.T).T, repr.s0 + s_tilde, repr.arclength_normalized)


def shift_function(repr: FunctionRepr, x_tilde: float) -> FunctionRepr:
    T = shift_matrix(x_tilde, repr.order)
    return FunctionRepr(T @ repr.coeffs, repr.x0 + x_tilde)


def transform_parametric(repr: ParametricRepr, motion: RigidMotion2D) -> ParametricRepr:
    """Re-express the curve in the frame reached by ``motion``."""
    D = np.zeros((2, repr.order + 1))
    D[:, 0] = motion.d
    return unchecked_parametric(motion.rotation.T @ (repr.matrix - D), repr.s0, repr.arclength_normalized)


# --- function <-> parametric ----------------------------------------------


def _pad(coeffs, n: int = MAX_ORDER + 1) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape[-1] > n:
        raise ValueError(f"order above {MAX_ORDER} is not supported")
    pad = [(0, 0)] * (coeffs.ndim - 1) + [(0, n - coeffs.shape[-1])]
    return np.pad(coeffs, pad)


def func_to_param_coeffs(phi) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized function-to-arc-length coefficient map.

    ``phi`` has shape ``(..., k)`` with ``k <= 6``; returns ``(xbar, yhat)``
    each of shape ``(..., 6)``. The expansion point is the y-intercept,
    which becomes ``s = 0`` with arc length increasing along +x.
    """
    p = _pad(phi)
    p0, p1, p2, p3, p4, p5 = (p[..., i] for i in range(6))
    lam2 = 1.0 + p1 * p1
    lam = np.sqrt(lam2)
    L = {k: lam**k for k in (1, 4, 5, 6, 7, 8, 9, 10, 11, 13)}
    p2_2, p2_3, p2_4 = p2 * p2, p2**3, p2**4

    xb = np.zeros(p.shape)
    yh = np.zeros(p.shape)
    yh[..., 0] = p0
    xb[..., 1] = 1.0 / L[1]
    yh[..., 1] = p1 / L[1]
    xb[..., 2] = -p1 * p2 / L[4]
    yh[..., 2] = p2 / L[4]
    xb[..., 3] = (2 * p2_2 - p1 * p3) / L[5] - 8 * p2_2 / (3 * L[7])
    yh[..., 3] = p3 / L[5] - 8 * p1 * p2_2 / (3 * L[7])
    xb[..., 4] = (
        (5 * p2 * p3 - p1 * p4) / L[6]
        - (10 * p1 * p2_3 + 13 * p2 * p3) / (2 * L[8])
        + 28 * p1 * p2_3 / (3 * L[10])
    )
    yh[..., 4] = (
        p4 / L[6]
        + (16 * p2_3 - 13 * p1 * p2 * p3) / (2 * L[8])
        - 28 * p2_3 / (3 * L[10])
    )
    xb[..., 5] = (
        (3 * p3 * p3 + 6 * p2 * p4 - p1 * p5) / L[7]
        - (39 * p3 * p3 + 210 * p1 * p2_2 * p3 + 76 * p2 * p4 - 140 * p2_4) / (10 * L[9])
        + (188 * p1 * p2_2 * p3 - 248 * p2_4) / (5 * L[11])
        + 112 * p2_4 / (3 * L[13])
    )
    yh[..., 5] = (
        p5 / L[7]
        + (326 * p2_2 * p3 - 76 * p1 * p2 * p4 - 39 * p1 * p3 * p3) / (10 * L[9])
        - (128 * p1 * p2_4 + 188 * p2_2 * p3) / (5 * L[11])
        + 112 * p1 * p2_4 / (3 * L[13])
    )
    return xb, yh


def param_to_func_coeffs(xbar, yhat) -> np.ndarray:
    """Vectorized inverse of :func:`func_to_param_coeffs`; no tangent check."""
    b = _pad(xbar)
    h = _pad(yhat)
    b1, b2, b3, b4, b5 = (b[..., i] for i in range(1, 6))
    h0, h1, h2, h3, h4, h5 = (h[..., i] for i in range(6))
    out = np.zeros(np.broadcast(b, h).shape)
    out[..., 0] = h0
    out[..., 1] = h1 / b1
    out[..., 2] = (h2 * b1 - h1 * b2) / b1**3
    out[..., 3] = h3 / b1**3 - (h1 * b3 + 2 * h2 * b2) / b1**4 + 2 * h1 * b2**2 / b1**5
    out[..., 4] = (
        h4 / b1**4
        - (h1 * b4 + 2 * h2 * b3 + 3 * h3 * b2) / b1**5
        + 5 * b2 * (h1 * b3 + h2 * b2) / b1**6
        - 5 * h1 * b2**3 / b1**7
    )
    out[..., 5] = (
        h5 / b1**5
        - (h1 * b5 + 2 * h2 * b4 + 3 * h3 * b3 + 4 * h4 * b2) / b1**6
        + (3 * h1 * (b3**2 + 2 * b2 * b4) + 3 * b2 * (3 * h3 * b2 + 4 * h2 * b3)) / b1**7
        - 7 * b2**2 * (3 * h1 * b3 + 2 * h2 * b2) / b1**8
        + 14 * h1 * b2**4 / b1**9
    )
    return out


def func_to_param(repr: FunctionRepr) -> ParametricRepr:
    """Arc-length representation of a curve given as ``y(x)`` about its y-intercept.

    The result has the order of the input, ``s0 = 0`` and ``xcoeffs[0] = 0``.
    """
    n = repr.order + 1
    xb, yh = func_to_param_coeffs(repr.coeffs)
    return ParametricRepr(xb[:n], yh[:n], 0.0, arclength_normalized=True)


def param_to_func(repr: ParametricRepr, tangent_tol: float = TANGENT_TOL) -> FunctionRepr:
    if abs(repr.xcoeffs[1]) < tangent_tol:
        raise VerticalTangentError(
            f"|dx/ds| = {abs(repr.xcoeffs[1]):.3g} below {tangent_tol:g}; curve is not a function of x here"
        )
    if repr.order > MAX_ORDER:
        raise ValueError(f"order above {MAX_ORDER} is not supported")
    n = repr.order + 1
    phi = param_to_func_coeffs(repr.xcoeffs, repr.ycoeffs)
    return FunctionRepr(phi[:n], repr.xcoeffs[0])


# --- attribute extraction -------------------------------------------------


def extract_preview(repr: ParametricRepr, s_p: float):
    """Deviation, relative heading and curvature of the lane at arc length ``s_p``.

    The representation is taken in the body frame (tau, eta), so the deviation
    is ``-eta`` and the heading is measured from the lane tangent to the tau axis.
    """
    k = min(2, repr.order)
    tau, eta = eval_parametric(repr, s_p, k)
    speed2 = tau[1] ** 2 + eta[1] ** 2
    if speed2 < 1e-12:
        raise SingularCurveError(f"tangent vanishes at s = {s_p}")
    eps = -eta[0]
    theta = -math.atan2(eta[1], tau[1])
    kappa = (eta[2] * tau[1] - eta[1] * tau[2]) / speed2 if k >= 2 else 0.0
    return eps, theta, kappa


# --- debug text format ----------------------------------------------------


def dumps(repr) -> str:
    """Text form for fixtures: a header line then one coefficient row per line."""
    if isinstance(repr, FunctionRepr):
        rows = [repr.coeffs]
        head = f"function x0={repr.x0!r}"
    elif isinstance(repr, ParametricRepr):
        rows = [repr.xcoeffs, repr.ycoeffs]
        head = f"parametric s0={repr.s0!r} normalized={int(repr.arclength_normalized)}"
    else:
        raise TypeError(f"cannot serialize {type(repr).__name__}")
    lines = [head] + [" ".join(repr_float(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def repr_float(v: float) -> str:
    return repr(float(v))


def loads(text: str):
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    kind, *fields = lines[0].split()
    meta = dict(f.split("=", 1) for f in fields)
    rows = [[float(tok) for tok in ln.split()] for ln in lines[1:]]
    if kind == "function":
        return FunctionRepr(rows[0], float(meta["x0"]))
    if kind == "parametric":
        return unchecked_parametric(np.array(rows), float(meta["s0"]), bool(int(meta["normalized"])))
    raise ValueError(f"unknown representation kind {kind!r}")
