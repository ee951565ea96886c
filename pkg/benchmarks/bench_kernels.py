"""Benchmark the numba gate kernels against the pure-numpy fallback.

Two views:

* micro: raw single-qubit / controlled updates across register sizes, both
  function families called directly;
* end-to-end: one deterministic encoding pipeline per backend, each in a
  subprocess so the import-time backend switch (LORENTZ_ENCODE_BACKEND) is
  honest.

Run:  python benchmarks/bench_kernels.py
"""

import os
import subprocess
import sys
import time

import numpy as np

from lorentz_encode import _kernels


def _amps(rng, n):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return np.ascontiguousarray(v / np.linalg.norm(v))


def micro(reps=200):
    rng = np.random.default_rng(0)
    u = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))[0]
    print(f"{'n_qubits':>8} {'1q numpy':>12} {'1q numba':>12} {'ctrl numpy':>12} {'ctrl numba':>12}")
    for n in (8, 12, 16, 20):
        amps = _amps(rng, n)
        rows = []
        for fn in (_kernels.apply_1q_numpy, _kernels.apply_1q_numba):
            fn(amps, 2, u)  # warm the JIT before timing
            t0 = time.perf_counter()
            for _ in range(reps):
                fn(amps, n // 2, u)
            rows.append((time.perf_counter() - t0) / reps)
        mask, val = 0b101 << (n - 4), 0b100 << (n - 4)
        for fn in (_kernels.apply_ctrl_numpy, _kernels.apply_ctrl_numba):
            fn(amps, 2, mask, val, u)
            t0 = time.perf_counter()
            for _ in range(reps):
                fn(amps, n // 2, mask, val, u)
            rows.append((time.perf_counter() - t0) / reps)
        print(f"{n:>8} " + " ".join(f"{1e6 * t:>11.1f}u" for t in rows))


_PIPELINE = """
import time
import numpy as np
from lorentz_encode import circuits as cc, locfuncs as lf, qara, _kernels

rng = np.random.default_rng(1)
lcs = []
while len(lcs) < 8:
    params = [(float(rng.uniform(0.3, 2.0)), int(rng.integers(0, 64))) for _ in range(6)]
    try:
        lc = lf.normalize_lc(lf.LCSpec.one_d(6, params, list(rng.uniform(-1, 1, 6))))
    except ValueError:
        continue
    if lc.lam <= 6:
        lcs.append(lc)
for lc in lcs:  # warm the JIT outside the timed region
    cc.run_encoding(cc.c_lc_lorentzian(lc))
    break
t0 = time.perf_counter()
for lc in lcs:
    cc.run_encoding(cc.c_lc_deterministic(lc, qara.plan_for_lc(lc)))
print(f"{_kernels.BACKEND}: {time.perf_counter() - t0:.3f}s for 8 deterministic encodings (9-10 qubits)")
"""


def end_to_end():
    for backend in ("numpy", "numba"):
        env = dict(os.environ, LORENTZ_ENCODE_BACKEND=backend)
        out = subprocess.run(
            [sys.executable, "-c", _PIPELINE], capture_output=True, text=True, env=env
        )
        print(out.stdout.strip() or out.stderr.strip())


if __name__ == "__main__":
    if not _kernels.HAS_NUMBA:
        print("numba not installed; only the numpy path is available")
        sys.exit(0)
    print("== micro (mean per call) ==")
    micro()
    print("== end to end ==")
    end_to_end()
