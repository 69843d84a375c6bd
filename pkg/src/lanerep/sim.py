"""Closed-loop scenario runner: perception, coefficient prediction, steering, and ground truth."""
from __future__ import annotations

import configparser
import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .curves import ParametricRepr, func_to_param
from .errors import InfeasibleCurvatureError, PerceptionError, SingularCurveError
from .estimator import LaneEstimator, estimate_state_changes, perceive, perturb
from .path import (
    DEFAULT_STEP,
    CurvatureProfile,
    PathTable,
    closed_path,
    closure_check,
    cosine_profile,
    integrate_path,
    zero_profile,
)
from .vehicle import RelativeState, VehicleParams, absolute_from_relative, controller

STEADY_AFTER = 10.0
TRUTH_SUBSTEP = 1e-3
MAX_DEVIATION = 5.0
DRIFT_THRESHOLD = 0.01

TELEMETRY_HEADER = (
    "t,s_omega,eps_omega,theta_omega,gamma_des,x_Q,y_Q,"
    "phihat0_true,phihat1_true,phihat2_true,phihat0_est,phihat1_est,phihat2_est,perception_event"
)
COEFF_HEADER = "t,src," + ",".join(f"phibar{i}" for i in range(6)) + "," + ",".join(f"phihat{i}" for i in range(6))


@dataclass(frozen=True)
class PathSpec:
    kappa_max: float = 0.004 * math.pi
    s_period: float = 250.0
    corners: int = 4
    h: float = DEFAULT_STEP

    @property
    def straight(self) -> bool:
        return self.kappa_max == 0.0

    def profile(self) -> CurvatureProfile:
        return zero_profile() if self.straight else cosine_profile(self.kappa_max, self.s_period)


@dataclass(frozen=True)
class ScenarioConfig:
    vehicle: VehicleParams = VehicleParams()
    path: PathSpec = PathSpec()
    T: float = 0.05
    T_p: float = 0.15
    prediction_enabled: bool = False
    duration: float = 150.0
    init: RelativeState = RelativeState(0.0, 0.1, 0.0)
    noise_std: tuple = ()
    seed: int = 0
    telemetry_name: str = "telemetry.csv"
    coeffs_name: str = "coeffs.csv"
    path_name: str = "path.csv"

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError("T must be positive")
        if self.T_p < self.T:
            raise ValueError("T_p must be >= T")
        ratio = self.T_p / self.T
        if abs(ratio - round(ratio)) > 1e-9 * ratio:
            raise ValueError(f"T_p / T = {ratio} is not an integer")
        if self.duration <= 0:
            raise ValueError("duration must be positive")
        p = self.path
        # straight paths are open; nothing to close
        if not p.straight and not closure_check(p.kappa_max, p.s_period, p.corners):
            raise ValueError("path block does not close: kappa_max * s_period must equal 4 pi / corners")

    @property
    def perception_every(self) -> int:
        return int(round(self.T_p / self.T))

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.T))


@dataclass(frozen=True)
class TelemetryRow:
    t: float
    s_omega: float
    eps_omega: float
    theta_omega: float
    gamma_des: float
    x_Q: float
    y_Q: float
    phihat_true: tuple
    phihat_est: tuple
    perception_event: bool
    prediction_age: float = 0.0

    def csv(self) -> str:
        vals = [self.t, self.s_omega, self.eps_omega, self.theta_omega, self.gamma_des, self.x_Q, self.y_Q]
        vals += list(self.phihat_true[:3]) + list(self.phihat_est[:3])
        return ",".join(repr(float(v)) for v in vals) + f",{int(self.perception_event)}"


@dataclass(frozen=True)
class CoeffRow:
    t: float
    src: str
    phibar: tuple
    phihat: tuple

    def csv(self) -> str:
        vals = ",".join(repr(float(v)) for v in (*self.phibar, *self.phihat))
        return f"{self.t!r},{self.src},{vals}"


@dataclass(frozen=True)
class RunMetrics:
    max_abs_eps: float
    steady_offset: float
    max_pred_error: tuple
    completed: bool
    drift_onset: float = math.inf
    s_travelled: float = 0.0
    reason: str = ""


@dataclass
class RunResult:
    rows: list
    coeff_rows: list
    metrics: RunMetrics
    path: PathTable = field(repr=False, default=None)


def _pad6(v) -> tuple:
    out = np.zeros(6)
    v = np.asarray(v, dtype=float)[:6]
    out[: v.size] = v
    return tuple(float(x) for x in out)


def build_path(cfg: ScenarioConfig) -> PathTable:
    p = cfg.path
    if p.straight:
        # long enough to cover the run with margin, including ground ahead of the camera
        length = 1.5 * cfg.vehicle.V * cfg.duration + 200.0
        return integrate_path(zero_profile(), s_end=length, h=max(p.h, 0.1))
    return closed_path(p.kappa_max, p.s_period, p.corners, p.h)


def _truth_coeffs(rel: RelativeState, profile: CurvatureProfile, delta: float) -> ParametricRepr:
    return func_to_param(perceive(rel, profile, delta).coeffs)


def run_scenario(cfg: ScenarioConfig, path: PathTable | None = None) -> RunResult:
    """Run the perception / prediction / control loop for ``cfg.duration`` seconds.

    Time is ``k * T`` for integer ``k``. Perception fires when ``k`` is a
    multiple of ``T_p / T``; between frames the estimate is either predicted
    forward or held. The true relative state is integrated with RK4 sub-steps
    of at most 1 ms under the held steering angle.
    """
    vp = cfg.vehicle
    profile = cfg.path.profile()
    if path is None:
        path = build_path(cfg)
    kind, p0, p1 = profile.code
    every = cfg.perception_every
    n_sub = max(1, math.ceil(cfg.T / TRUTH_SUBSTEP - 1e-9))
    rng = np.random.default_rng(cfg.seed)
    est = LaneEstimator()

    rel = cfg.init
    omega_prev = 0.0
    inputs_prev = None
    rows, coeff_rows = [], []
    completed, reason = True, ""

    for k in range(cfg.n_steps + 1):
        t = k * cfg.T
        reason = _diverged(rel, vp)
        if reason:
            completed = False
            break
        try:
            truth = _truth_coeffs(rel, profile, vp.delta)
            event = k % every == 0
            if event:
                frame = perceive(rel, profile, vp.delta, timestamp=t)
                if cfg.noise_std:
                    frame = perturb(frame, cfg.noise_std, rng)
                est.update(frame)
                src = "measure"
            elif cfg.prediction_enabled:
                ch = estimate_state_changes(vp.V, omega_prev, cfg.T, inputs_prev[0], inputs_prev[1], vp)
                est.predict(ch, cfg.T)
                src = "predict"
            else:
                # held frame is still the last measurement
                est.age += cfg.T
                src = "measure"
            inputs_prev = est.control_inputs()
            eps_D, theta_D, kappa_D = inputs_prev
            gamma = controller(kappa_D, theta_D, eps_D, vp)
        except (PerceptionError, SingularCurveError, InfeasibleCurvatureError) as exc:
            completed, reason = False, type(exc).__name__
            break

        pose = absolute_from_relative(rel, path, vp.delta)
        phi = est.phi
        rows.append(TelemetryRow(
            t, rel.s_omega, rel.eps_omega, rel.theta_omega, gamma, pose.x_Q, pose.y_Q,
            _pad6(truth.ycoeffs), _pad6(phi.ycoeffs), event, est.age,
        ))
        coeff_rows.append(CoeffRow(t, "truth", _pad6(truth.xcoeffs), _pad6(truth.ycoeffs)))
        coeff_rows.append(CoeffRow(t, src, _pad6(phi.xcoeffs), _pad6(phi.ycoeffs)))
        if k == cfg.n_steps:
            break

        tg = math.tan(gamma)
        s, e, th, status = kernels.rk4_relative(
            rel.s_omega, rel.eps_omega, rel.theta_omega, tg, cfg.T, n_sub,
            kind, p0, p1, vp.V, vp.l, vp.d, vp.delta,
        )
        if status != kernels.STEP_OK:
            completed, reason = False, "unobservable"
            break
        rel = RelativeState(float(s), float(e), float(th))
        omega_prev = vp.V / vp.l * tg

    return RunResult(rows, coeff_rows, compute_metrics(rows, coeff_rows, completed, reason), path)


def _diverged(rel: RelativeState, vp: VehicleParams) -> str:
    if abs(rel.theta_omega) >= vp.delta:
        return "heading error reached the FOV half-angle"
    if abs(rel.eps_omega) > MAX_DEVIATION:
        return "deviation exceeded 5 m"
    return ""


def compute_metrics(rows: list, coeff_rows: list, completed: bool, reason: str = "") -> RunMetrics:
    if not rows:
        return RunMetrics(math.inf, math.inf, (math.inf,) * 12, False, reason=reason or "no steps")
    eps = np.array([r.eps_omega for r in rows])
    t = np.array([r.t for r in rows])
    steady = eps[t >= STEADY_AFTER - 1e-9]
    if steady.size == 0:
        max_eps = steady_off = math.inf
    else:
        max_eps = float(np.max(np.abs(steady)))
        steady_off = float(np.mean(np.abs(steady)))
    truth = np.array([c.phibar + c.phihat for c in coeff_rows if c.src == "truth"])
    estim = np.array([c.phibar + c.phihat for c in coeff_rows if c.src != "truth"])
    err = np.abs(truth - estim)
    max_err = tuple(float(v) for v in err.max(axis=0))
    # earliest prediction age at which the lateral intercept error is noticeable
    ages = np.array([r.prediction_age for r in rows])
    drift = np.abs(err[:, 6]) > DRIFT_THRESHOLD
    onset = float(ages[drift].min()) if drift.any() else math.inf
    if not completed:
        max_eps = max(max_eps, float(np.max(np.abs(eps)))) if np.isfinite(max_eps) else float(np.max(np.abs(eps)))
    return RunMetrics(max_eps, steady_off, max_err, completed, onset, rows[-1].s_omega - rows[0].s_omega, reason)


def write_telemetry(rows: list, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(TELEMETRY_HEADER + "\n")
        for r in rows:
            fh.write(r.csv() + "\n")


def write_coeffs(coeff_rows: list, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(COEFF_HEADER + "\n")
        for c in coeff_rows:
            fh.write(c.csv() + "\n")


def read_telemetry(path) -> list:
    """Rows of a telemetry CSV as dicts of floats."""
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty file")
    keys = lines[0].split(",")
    if ",".join(keys) != TELEMETRY_HEADER:
        raise ValueError(f"{path}: not a telemetry file")
    return [dict(zip(keys, map(float, ln.split(",")))) for ln in lines[1:] if ln]


def _strip_T(cfg: ScenarioConfig) -> ScenarioConfig:
    return dataclasses.replace(cfg, T=cfg.T_p, telemetry_name="", coeffs_name="", path_name="")


def compare_scenarios(cfgs: list) -> list:
    """Steady-state summary of configs that differ only in the control period, ordered by T."""
    if len(cfgs) < 2:
        raise ValueError("need at least two configs to compare")
    base = _strip_T(cfgs[0])
    for c in cfgs[1:]:
        if _strip_T(c) != base:
            raise ValueError("configs must differ only in T")
    table = []
    for cfg in sorted(cfgs, key=lambda c: c.T):
        m = run_scenario(cfg).metrics
        table.append({"T": cfg.T, "steady_offset": m.steady_offset, "max_abs_eps": m.max_abs_eps, "completed": m.completed})
    return table


def write_comparison(table: list, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("T,steady_offset,max_abs_eps,completed\n")
        for r in table:
            fh.write(f"{r['T']!r},{r['steady_offset']!r},{r['max_abs_eps']!r},{int(r['completed'])}\n")


def parse_number(text: str) -> float:
    """Float, also accepting multiples of pi such as ``0.004pi`` or ``pi/4``."""
    t = text.strip().replace(" ", "").replace("*", "")
    if "pi" not in t:
        return float(t)
    head, _, tail = t.partition("pi")
    coef = float(head) if head not in ("", "+", "-") else float(head + "1")
    if tail:
        if not tail.startswith("/"):
            raise ValueError(f"cannot parse {text!r}")
        coef /= float(tail[1:])
    return coef * math.pi


def load_config(path) -> ScenarioConfig:
    """Read a scenario from an INI file; see the README for the schema."""
    cp = configparser.ConfigParser()
    if not cp.read(path):
        raise FileNotFoundError(path)
    return config_from_parser(cp)


def config_from_parser(cp: configparser.ConfigParser) -> ScenarioConfig:
    d = VehicleParams()
    v = cp["vehicle"] if cp.has_section("vehicle") else {}
    vehicle = VehicleParams(
        l=parse_number(v.get("l", repr(d.l))),
        d=parse_number(v.get("d", repr(d.d))),
        delta=math.radians(parse_number(v.get("delta_deg", "60"))),
        V=parse_number(v.get("V", repr(d.V))),
        gamma_sat=math.radians(parse_number(v.get("gamma_sat_deg", "30"))),
        k1=parse_number(v["k1"]) if "k1" in v else -parse_number(v.get("l", repr(d.l))) / parse_number(v.get("d", repr(d.d))),
        k2=parse_number(v.get("k2", repr(d.k2))),
    )
    p = cp["path"] if cp.has_section("path") else {}
    ps = PathSpec()
    path = PathSpec(
        kappa_max=parse_number(p.get("kappa_max", repr(ps.kappa_max))),
        s_period=parse_number(p.get("s_period", repr(ps.s_period))),
        corners=int(p.get("corners", ps.corners)),
        h=parse_number(p.get("h", repr(ps.h))),
    )
    tm = cp["timing"] if cp.has_section("timing") else {}
    ini = cp["init"] if cp.has_section("init") else {}
    nz = cp["noise"] if cp.has_section("noise") else {}
    out = cp["output"] if cp.has_section("output") else {}
    std = nz.get("std", "").strip()
    return ScenarioConfig(
        vehicle=vehicle,
        path=path,
        T=parse_number(tm.get("T", "0.05")),
        T_p=parse_number(tm.get("T_p", "0.15")),
        prediction_enabled=_boolean(tm.get("prediction", "no")),
        duration=parse_number(tm.get("duration", "150")),
        init=RelativeState(
            parse_number(ini.get("s", "0")),
            parse_number(ini.get("eps", "0.1")),
            math.radians(parse_number(ini.get("theta_deg", "0"))),
        ),
        noise_std=tuple(parse_number(x) for x in std.split(",")) if std else (),
        seed=int(nz.get("seed", "0")),
        telemetry_name=out.get("telemetry", "telemetry.csv"),
        coeffs_name=out.get("coeffs", "coeffs.csv"),
        path_name=out.get("path", "path.csv"),
    )


def _boolean(text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "yes", "true", "on"):
        return True
    if t in ("0", "no", "false", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")
