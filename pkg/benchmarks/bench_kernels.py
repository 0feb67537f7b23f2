"""Compare the compiled kernels with the numpy fallback.

Usage: python benchmarks/bench_kernels.py [N ...]
Prints per-call timings and the maximum deviation between backends, then
times a short standard run with each backend.
"""

import os
import subprocess
import sys
import timeit

import numpy as np

from outflow_sim import _kernels_py as py

try:
    from outflow_sim import _kernels as cy
except ImportError:
    cy = None


def fields(N, seed=0):
    rng = np.random.default_rng(seed)
    x = np.cumsum(rng.uniform(0.5, 1.5, N))
    v = 1.0 + 0.1 * rng.standard_normal(N) ** 2
    u = -0.05 + 0.01 * rng.standard_normal(N)
    r = py.radius(x, v, 2)
    w = np.linspace(0.05, 0.06, N)
    return x, v, u, r, w


def bench(N, repeat=200):
    x, v, u, r, w = fields(N)
    lo, di, up = py.viscous_coeffs(x, r, v, 2, 1.0)
    cases = {
        "radius": lambda m: m.radius(x, v, 2),
        "explicit_terms": lambda m: m.explicit_terms(x, r, v, u, w, 2, 1.0, 1.4),
        "viscous_coeffs": lambda m: m.viscous_coeffs(x, r, v, 2, 1.0),
        "apply_tridiag": lambda m: m.apply_tridiag(lo, di, up, u),
        "solve_shifted": lambda m: m.solve_shifted(lo, di, up, u, 0.01, -0.05, 0.0),
    }
    print(f"N = {N}")
    for name, call in cases.items():
        tp = min(timeit.repeat(lambda: call(py), number=repeat, repeat=3)) / repeat
        line = f"  {name:15s} python {tp * 1e6:9.1f} us"
        if cy is not None:
            tc = min(timeit.repeat(lambda: call(cy), number=repeat, repeat=3)) / repeat
            dev = max(float(np.max(np.abs(np.asarray(a) - np.asarray(b))))
                      for a, b in zip(np.atleast_2d(call(py)), np.atleast_2d(call(cy))))
            line += f"  compiled {tc * 1e6:9.1f} us  speedup {tp / tc:5.1f}x  max dev {dev:.1e}"
        print(line)


RUN = """
import time
from outflow_sim import kernels
from outflow_sim.recipes import run_bump, standard_config, standard_params
p = standard_params(2)
t = time.perf_counter()
traj, _ = run_bump(p, standard_config(N=512, t_end=5.0))
print(kernels.BACKEND, f"{time.perf_counter() - t:.2f} s", traj.final.steps, "steps")
"""


def end_to_end():
    for pure in ("0", "1"):
        env = dict(os.environ, OUTFLOW_SIM_PURE=pure)
        out = subprocess.run([sys.executable, "-c", RUN], env=env, capture_output=True, text=True)
        print("  standard run, t_end = 5:", out.stdout.strip() or out.stderr.strip().splitlines()[-1])


if __name__ == "__main__":
    sizes = [int(a) for a in sys.argv[1:]] or [256, 1024, 4096]
    if cy is None:
        print("compiled extension not built; timing the fallback only")
    for N in sizes:
        bench(N)
    end_to_end()
