"""Compare the numba and numpy statevector backends.

Kernel timings call both implementations directly. The end-to-end timing
re-imports the package in a subprocess per backend, because the backend is
fixed at import time by QDC_SIM_NUMBA.

    python benchmarks/bench_kernels.py [--trials 20000]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from qdcsim import _kernels, qcore

SCENARIO = """
import time, numpy as np
from qdcsim import adversary, _kernels
s = adversary.zlw("p1", True)
adversary.run_attack_scenario(s, 10, np.random.default_rng(0))
t = time.perf_counter()
r = adversary.run_attack_scenario(s, {trials}, np.random.default_rng(1))
dt = time.perf_counter() - t
print(_kernels.BACKEND, dt, r.empirical["accuracy"])
"""


def bench(fn, *args, n=20000):
    fn(*args)
    t = time.perf_counter()
    for _ in range(n):
        fn(*args)
    return (time.perf_counter() - t) / n * 1e6


def kernel_table():
    if _kernels.numba is None:
        print("numba not installed; numpy path only")
        return
    rng = np.random.default_rng(0)
    for n in (3, 4, 8):
        amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
        amps /= np.linalg.norm(amps)
        h = qcore.PauliCode.H.matrix
        q1 = np.array([0], dtype=np.int64)
        q3 = np.array([0, 1, n - 1], dtype=np.int64)
        ghz = qcore.GHZ3_BASIS.vectors
        rows = [
            ("apply_1q", (_kernels.apply_1q_np, amps, n, 0, h), (_kernels.apply_1q_nb, amps, n, 0, h)),
            ("subset_probs GHZ3", (_kernels.subset_probs_np, amps, n, (0, 1, n - 1), ghz),
             (_kernels.subset_probs_nb, amps, n, q3, ghz)),
            ("measure X", (_kernels.measure_np, amps, n, (0,), qcore.X_BASIS.vectors, 0.3),
             (_kernels.measure_nb, amps, n, q1, qcore.X_BASIS.vectors, 0.3)),
        ]
        for name, np_call, nb_call in rows:
            t_np = bench(*np_call)
            t_nb = bench(*nb_call)
            print(f"n={n}  {name:<20} numpy {t_np:8.2f} us   numba {t_nb:8.2f} us   x{t_np / t_nb:5.1f}")


def scenario(trials):
    for flag in ("0", "1"):
        env = dict(os.environ, QDC_SIM_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", SCENARIO.format(trials=trials)],
                             env=env, capture_output=True, text=True, check=True).stdout.split()
        print(f"attack scenario, {trials} trials: backend {out[0]:<6} {float(out[1]):7.2f} s  "
              f"(accuracy {out[2]})")


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=20000)
    args = ap.parse_args()
    kernel_table()
    scenario(args.trials)
