"""Inner loops: path integration and relative-dynamics stepping.

Everything decorated with ``@njit`` compiles under numba when available and
runs as ordinary Python otherwise (see ``_jit``). The path integrator also has
a vectorized numpy form, used when numba is disabled.
"""
import math

import numpy as np

from ._jit import USE_NUMBA, njit

PROFILE_ZERO = 0
PROFILE_CONSTANT = 1
PROFILE_COSINE = 2

STEP_OK = 0
STEP_UNOBSERVABLE = 1


@njit
def kappa_derivs(kind, p0, p1, s):
    """kappa and its first three arc-length derivatives for a profile code."""
    if kind == PROFILE_COSINE:
        w = 2.0 * math.pi / p1
        a = 0.5 * p0
        c = math.cos(w * s)
        sn = math.sin(w * s)
        return a * (1.0 - c), a * w * sn, a * w * w * c, -a * w * w * w * sn
    if kind == PROFILE_CONSTANT:
        return p0, 0.0, 0.0, 0.0
    return 0.0, 0.0, 0.0, 0.0


@njit
def kappa_at(kind, p0, p1, s):
    if kind == PROFILE_COSINE:
        return 0.5 * p0 * (1.0 - math.cos(2.0 * math.pi / p1 * s))
    if kind == PROFILE_CONSTANT:
        return p0
    return 0.0


@njit
def rk4_path_loop(kind, p0, p1, s0, x0, y0, a0, h, n_steps, h_last):
    """Classical RK4 on x' = cos a, y' = sin a, a' = kappa(s).

    ``n_steps`` full steps of ``h`` then one step of ``h_last`` if it is > 0.
    Grid abscissae are ``s0 + i*h`` (never accumulated).
    """
    n = n_steps + 1 + (1 if h_last > 0.0 else 0)
    s = np.empty(n)
    x = np.empty(n)
    y = np.empty(n)
    a = np.empty(n)
    s[0] = s0
    x[0] = x0
    y[0] = y0
    a[0] = a0
    for i in range(n - 1):
        hi = h if i < n_steps else h_last
        si = s0 + i * h
        ai = a[i]
        k1 = kappa_at(kind, p0, p1, si)
        k2 = kappa_at(kind, p0, p1, si + 0.5 * hi)
        k4 = kappa_at(kind, p0, p1, si + hi)
        # stage headings: the a-equation does not depend on (x, y, a)
        a2 = ai + 0.5 * hi * k1
        a3 = ai + 0.5 * hi * k2
        a4 = ai + hi * k2
        x[i + 1] = x[i] + hi / 6.0 * (math.cos(ai) + 2.0 * math.cos(a2) + 2.0 * math.cos(a3) + math.cos(a4))
        y[i + 1] = y[i] + hi / 6.0 * (math.sin(ai) + 2.0 * math.sin(a2) + 2.0 * math.sin(a3) + math.sin(a4))
        a[i + 1] = ai + hi / 6.0 * (k1 + 4.0 * k2 + k4)
        s[i + 1] = s0 + (i + 1) * h if i < n_steps else si + hi
    return s, x, y, a


def _kappa_vec(kind, p0, p1, s):
    if kind == PROFILE_COSINE:
        return 0.5 * p0 * (1.0 - np.cos(2.0 * np.pi / p1 * s))
    if kind == PROFILE_CONSTANT:
        return np.full_like(s, p0)
    return np.zeros_like(s)


def rk4_path_numpy(kind, p0, p1, s0, x0, y0, a0, h, n_steps, h_last):
    """Vectorized twin of :func:`rk4_path_loop`.

    Because the heading equation is decoupled, the RK4 heading updates form a
    cumulative sum and all position increments can be evaluated at once.
    """
    steps = np.full(n_steps + (1 if h_last > 0.0 else 0), h)
    if h_last > 0.0:
        steps[-1] = h_last
    si = s0 + np.arange(steps.size) * h
    k1 = _kappa_vec(kind, p0, p1, si)
    k2 = _kappa_vec(kind, p0, p1, si + 0.5 * steps)
    k4 = _kappa_vec(kind, p0, p1, si + steps)
    a = np.empty(steps.size + 1)
    a[0] = a0
    a[1:] = a0 + np.cumsum(steps / 6.0 * (k1 + 4.0 * k2 + k4))
    ai = a[:-1]
    a2 = ai + 0.5 * steps * k1
    a3 = ai + 0.5 * steps * k2
    a4 = ai + steps * k2
    dx = steps / 6.0 * (np.cos(ai) + 2.0 * np.cos(a2) + 2.0 * np.cos(a3) + np.cos(a4))
    dy = steps / 6.0 * (np.sin(ai) + 2.0 * np.sin(a2) + 2.0 * np.sin(a3) + np.sin(a4))
    x = np.concatenate(([x0], x0 + np.cumsum(dx)))
    y = np.concatenate(([y0], y0 + np.cumsum(dy)))
    s = np.concatenate((s0 + np.arange(n_steps + 1) * h, si[n_steps:] + steps[n_steps:]))
    return s, x, y, a


def rk4_path(kind, p0, p1, s0, x0, y0, a0, h, n_steps, h_last):
    if USE_NUMBA:
        return rk4_path_loop(kind, p0, p1, s0, x0, y0, a0, h, n_steps, h_last)
    return rk4_path_numpy(kind, p0, p1, s0, x0, y0, a0, h, n_steps, h_last)


@njit
def relative_rhs(s, eps, theta, tan_gamma, kappa, V, l, d, delta):
    """Path-relative kinematics of the camera point.

    Returns (s_dot, eps_dot, theta_dot, status). The FOV edge used is the one
    on the path side: angle -delta when Q is left of the path (eps >= 0),
    +delta otherwise; for eps >= 0 this is the printed relative model verbatim.
    """
    sg = 1.0 if eps >= 0.0 else -1.0
    ds = sg * delta
    e = abs(eps)
    omega = V / l * tan_gamma
    den = math.sin(ds - theta)
    if abs(den) < 1e-9:
        return 0.0, 0.0, 0.0, STEP_UNOBSERVABLE
    s_dot = (V * math.sin(ds) + (d * math.cos(ds) + e) * omega) / den
    eps_dot = sg * (V * math.sin(theta) + (d * math.cos(theta) + e * math.cos(ds - theta)) * omega) / den
    theta_dot = omega - kappa * s_dot
    return s_dot, eps_dot, theta_dot, STEP_OK


@njit
def relative_rhs_printed(s, eps, theta, tan_gamma, kappa, V, l, d, delta):
    """The relative model exactly as printed, sign(eps) terms included.

    Kept for comparison only: it disagrees with the inverse pose map when eps < 0.
    """
    sg = 1.0 if eps >= 0.0 else -1.0
    e = abs(eps)
    omega = V / l * tan_gamma
    den = math.sin(delta - theta)
    if abs(den) < 1e-9:
        return 0.0, 0.0, 0.0, STEP_UNOBSERVABLE
    base = math.sin(delta) + d / l * math.cos(delta) * tan_gamma
    lever = e * math.cos(delta - sg * delta) / den
    s_dot = V / den * base + lever * omega
    eps_dot = V / den * (math.sin(theta) + d / l * math.cos(theta) * tan_gamma) + e * math.cos(delta - sg * theta) / den * omega
    theta_dot = -V * kappa / den * base + (1.0 - kappa * lever) * omega
    return s_dot, eps_dot, theta_dot, STEP_OK


@njit
def rk4_relative(s, eps, theta, tan_gamma, duration, n_sub, kind, p0, p1, V, l, d, delta):
    """Advance (s, eps, theta) over ``duration`` with ``n_sub`` RK4 steps, steering held.

    Returns (s, eps, theta, status); on loss of observability the state at the
    start of the failing step is returned with ``STEP_UNOBSERVABLE``.
    """
    h = duration / n_sub
    for _ in range(n_sub):
        k1s, k1e, k1t, f1 = relative_rhs(s, eps, theta, tan_gamma, kappa_at(kind, p0, p1, s), V, l, d, delta)
        s2 = s + 0.5 * h * k1s
        k2s, k2e, k2t, f2 = relative_rhs(s2, eps + 0.5 * h * k1e, theta + 0.5 * h * k1t, tan_gamma,
                                         kappa_at(kind, p0, p1, s2), V, l, d, delta)
        s3 = s + 0.5 * h * k2s
        k3s, k3e, k3t, f3 = relative_rhs(s3, eps + 0.5 * h * k2e, theta + 0.5 * h * k2t, tan_gamma,
                                         kappa_at(kind, p0, p1, s3), V, l, d, delta)
        s4 = s + h * k3s
        k4s, k4e, k4t, f4 = relative_rhs(s4, eps + h * k3e, theta + h * k3t, tan_gamma,
                                         kappa_at(kind, p0, p1, s4), V, l, d, delta)
        if f1 + f2 + f3 + f4 != STEP_OK:
            return s, eps, theta, STEP_UNOBSERVABLE
        s += h / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s)
        eps += h / 6.0 * (k1e + 2.0 * k2e + 2.0 * k3e + k4e)
        theta += h / 6.0 * (k1t + 2.0 * k2t + 2.0 * k3t + k4t)
    return s, eps, theta, STEP_OK


@njit
def rk4_absolute(x, y, psi, tan_gamma, duration, n_sub, V, l, d):
    """Advance the camera-point pose over ``duration`` with steering held."""
    h = duration / n_sub
    omega = V / l * tan_gamma
    for _ in range(n_sub):
        # psi is linear in time under constant steering, so stages differ only by heading
        p2 = psi + 0.5 * h * omega
        p4 = psi + h * omega
        vx = (math.cos(psi) + 4.0 * math.cos(p2) + math.cos(p4)) / 6.0
        vy = (math.sin(psi) + 4.0 * math.sin(p2) + math.sin(p4)) / 6.0
        wx = (math.sin(psi) + 4.0 * math.sin(p2) + math.sin(p4)) / 6.0
        wy = (math.cos(psi) + 4.0 * math.cos(p2) + math.cos(p4)) / 6.0
        x += h * (V * vx - d * omega * wx)
        y += h * (V * vy + d * omega * wy)
        psi = p4
    return x, y, psi
