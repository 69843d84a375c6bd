"""Time the path integrator and a closed-loop run with and without numba.

Each mode runs in its own interpreter because the switch is read at import:

    python benchmarks/bench_kernels.py            # both modes, summary table
    python benchmarks/bench_kernels.py --mode jit # one mode, JSON line
"""
import argparse
import json
import math
import os
import subprocess
import sys
import time


def measure(repeat: int) -> dict:
    from lanerep import _jit, kernels
    from lanerep.path import closed_path
    from lanerep.sim import ScenarioConfig, run_scenario

    closed_path(0.004 * math.pi, 250.0, 4, 0.5)  # compile outside the timed region
    kernels.rk4_relative(0.0, 0.1, 0.0, 0.0, 0.05, 50, kernels.PROFILE_COSINE, 0.004 * math.pi, 250.0,
                         20.0, 2.57, 2.0, 1.0)
    out = {"numba": _jit.USE_NUMBA}

    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        closed_path(0.004 * math.pi, 250.0, 4, 0.01)
        best = min(best, time.perf_counter() - t0)
    out["path_100k_steps_s"] = best

    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        kernels.rk4_relative(0.0, 0.1, 0.0, 0.01, 150.0, 150_000, kernels.PROFILE_COSINE, 0.004 * math.pi, 250.0,
                             20.0, 2.57, 2.0, 1.0471975511965976)
        best = min(best, time.perf_counter() - t0)
    out["relative_150k_substeps_s"] = best

    t0 = time.perf_counter()
    run_scenario(ScenarioConfig(duration=30.0))
    out["scenario_30s_s"] = time.perf_counter() - t0
    return out


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--mode", choices=("jit", "numpy"))
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    if args.mode:
        print(json.dumps(measure(args.repeat)))
        return 0

    rows = {}
    for mode in ("jit", "numpy"):
        env = dict(os.environ)
        env.pop("LANEREP_DISABLE_NUMBA", None)
        if mode == "numpy":
            env["LANEREP_DISABLE_NUMBA"] = "1"
        res = subprocess.run([sys.executable, __file__, "--mode", mode, "--repeat", str(args.repeat)],
                             env=env, capture_output=True, text=True, check=True)
        rows[mode] = json.loads(res.stdout.strip().splitlines()[-1])

    keys = [k for k in rows["jit"] if k != "numba"]
    print(f"{'benchmark':28s} {'numba':>10s} {'fallback':>10s} {'speedup':>8s}")
    for k in keys:
        a, b = rows["jit"][k], rows["numpy"][k]
        print(f"{k:28s} {a:10.4f} {b:10.4f} {b / a:8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
