"""Compare the numba kernels with their numpy fallbacks.

    python benchmarks/bench_backends.py [--repeat N] [--duration S]

Part 1 times each kernel pair in-process. Part 2 runs a full SVDCKF pass over
a LowDynamic scenario in two subprocesses, one with CKFAHRS_DISABLE_NUMBA=1,
so the whole code path uses one backend at a time.
"""

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from ckfahrs import _kernels
from ckfahrs._jit import ENV_FLAG, HAVE_NUMBA
from ckfahrs.attitude import euler_to_quat_rows

FULL_RUN = """
import json, time
from ckfahrs import BACKEND
from ckfahrs.ahrs import AhrsConfig
from ckfahrs.evaluate import run_filter
from ckfahrs.linalg import Method
from ckfahrs.sim import Scenario, simulate
imu, _ = simulate(Scenario(duration={duration}))
run_filter(imu[:200], AhrsConfig(), Method.SVD)  # warm up / load jit cache
t0 = time.perf_counter()
run_filter(imu, AhrsConfig(), Method.SVD)
print(json.dumps({{"backend": BACKEND, "seconds": time.perf_counter() - t0, "steps": len(imu) - 1}}))
"""


def kernel_cases():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((7, 7))
    P = A @ A.T + 0.1 * np.eye(7)
    X = np.hstack([euler_to_quat_rows(rng.uniform(-1, 1, (14, 3))), 0.01 * rng.standard_normal((14, 3))])
    gyro = np.array([0.1, -0.2, 0.3])
    return {
        "jacobi_eigh 7x7": (_kernels.jacobi_eigh_nb, _kernels.jacobi_eigh_np, (P, 1e-12, 100)),
        "cholesky 7x7": (_kernels.cholesky_nb, _kernels.cholesky_np, (P,)),
        "propagate 14 pts": (_kernels.propagate_nb, _kernels.propagate_np, (X, gyro, 0.01, 0.99997)),
        "euler_rows 14 pts": (_kernels.euler_rows_nb, _kernels.euler_rows_np, (X[:, :4].copy(),)),
    }


def bench_kernels(repeat):
    print(f"{'kernel':<20}{'numba us':>12}{'numpy us':>12}{'speedup':>10}")
    for name, (nb, npy, args) in kernel_cases().items():
        nb(*args)  # compile
        t_nb = min(timeit.repeat(lambda: nb(*args), number=200, repeat=repeat)) / 200 * 1e6
        t_np = min(timeit.repeat(lambda: npy(*args), number=200, repeat=repeat)) / 200 * 1e6
        print(f"{name:<20}{t_nb:>12.2f}{t_np:>12.2f}{t_np / t_nb:>9.1f}x")


def bench_full(duration):
    results = {}
    for flag in ("", "1"):
        env = dict(os.environ, **{ENV_FLAG: flag})
        out = subprocess.run([sys.executable, "-c", FULL_RUN.format(duration=duration)],
                             env=env, capture_output=True, text=True, check=True)
        r = json.loads(out.stdout.strip().splitlines()[-1])
        results[r["backend"]] = r
        print(f"full SVDCKF run [{r['backend']:>5}]: {r['seconds']:.2f} s for {r['steps']} steps "
              f"({1e6 * r['seconds'] / r['steps']:.0f} us/step)")
    if {"numba", "numpy"} <= results.keys():
        print(f"end-to-end speedup: {results['numpy']['seconds'] / results['numba']['seconds']:.1f}x")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--duration", type=float, default=30.0, help="scenario length for the full run [s]")
    args = ap.parse_args()
    if not HAVE_NUMBA:
        sys.exit("numba is not installed; nothing to compare")
    bench_kernels(args.repeat)
    print()
    bench_full(args.duration)


if __name__ == "__main__":
    main()
