#!/usr/bin/env python3
"""Benchmark the numba kernel lane against the pure-numpy fallback.

The lanes share one module, selected at import time, so each is timed in a
subprocess with SUPERHET_NO_NUMBA set accordingly.

    python benchmarks/bench_kernels.py [--quick]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, os, sys, time
import numpy as np
from superhet import _kernels

sizes = json.loads(sys.argv[1])
out = {"numba": _kernels.NUMBA_ENABLED}

phi = np.geomspace(1e-3, 1e5, sizes["sici_n"])
_kernels.sici_arrays(phi[:8])           # warm-up / JIT compile
t0 = time.perf_counter()
for _ in range(sizes["sici_reps"]):
    _kernels.sici_arrays(phi)
out["sici_s"] = (time.perf_counter() - t0) / sizes["sici_reps"]

_kernels.cos_tail_integral(1.0, 1e-9)   # warm-up
grid = np.geomspace(1e-3, 1e3, sizes["quad_n"])
t0 = time.perf_counter()
for p in grid:
    _kernels.cos_tail_integral(float(p), 1e-9)
out["quad_s"] = time.perf_counter() - t0

print(json.dumps(out))
"""


def run_lane(disable_numba, sizes):
    env = dict(os.environ)
    env["SUPERHET_NO_NUMBA"] = "1" if disable_numba else "0"
    res = subprocess.run([sys.executable, "-c", WORKER, json.dumps(sizes)],
                         capture_output=True, text=True, env=env, check=True)
    return json.loads(res.stdout.strip().splitlines()[-1])


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true",
                        help="smaller workloads for CI smoke runs")
    args = parser.parse_args()
    sizes = ({"sici_n": 20_000, "sici_reps": 2, "quad_n": 40}
             if args.quick else
             {"sici_n": 200_000, "sici_reps": 5, "quad_n": 200})

    numba_lane = run_lane(False, sizes)
    numpy_lane = run_lane(True, sizes)
    if not numba_lane["numba"]:
        print("note: numba unavailable; both lanes ran the numpy path")

    print(f"{'kernel':<28}{'numba lane':>14}{'numpy lane':>14}{'speedup':>10}")
    for key, label in (("sici_s", f"Si/Ci arrays (n={sizes['sici_n']})"),
                       ("quad_s", f"oscillatory quad ({sizes['quad_n']} pts)")):
        a, b = numba_lane[key], numpy_lane[key]
        print(f"{label:<28}{a * 1e3:>11.2f} ms{b * 1e3:>11.2f} ms"
              f"{b / a:>9.1f}x")


if __name__ == "__main__":
    main()
