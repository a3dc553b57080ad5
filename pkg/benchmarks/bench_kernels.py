#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Times the innovation-filter kernel (the inner loop of every likelihood
evaluation) at representative sizes, then an end-to-end automatic order
search under each backend in subprocesses (the backend is fixed at
import time, so the end-to-end comparison needs fresh interpreters).

    python benchmarks/bench_kernels.py
"""

import os
import subprocess
import sys
import time

import numpy as np

from horizonbench._kernels import _pure
from horizonbench.arima import _pacs_to_coeffs, _state_space, _stationary_cov

try:
    from horizonbench._kernels import _native
except ImportError:
    _native = None


def time_call(fn, args, repeat):
    start = time.perf_counter()
    for _ in range(repeat):
        fn(*args)
    return (time.perf_counter() - start) / repeat


def kernel_microbench():
    rng = np.random.default_rng(0)
    print(f"{'case':<22}{'pure':>12}{'native':>12}{'speedup':>10}")
    for n, p, q in [(455, 1, 0), (455, 2, 2), (455, 5, 5), (93, 2, 2), (14, 1, 1)]:
        phi = 0.5 * _pacs_to_coeffs(rng.uniform(-0.5, 0.5, p)) if p else np.zeros(0)
        theta = rng.uniform(-0.3, 0.3, q)
        T, Q = _state_space(phi, theta)
        P0 = _stationary_cov(T, Q)
        x = rng.normal(0, 1, n)
        args = (x, T, Q, P0)
        repeat = 40 if n > 100 else 200
        pure_t = time_call(_pure.arma_innovation_stats, args, repeat)
        label = f"n={n} p={p} q={q}"
        if _native is None:
            print(f"{label:<22}{pure_t * 1e6:>10.0f}us{'-':>12}{'-':>10}")
            continue
        native_t = time_call(_native.arma_innovation_stats, args, repeat)
        print(
            f"{label:<22}{pure_t * 1e6:>10.0f}us{native_t * 1e6:>10.0f}us"
            f"{pure_t / native_t:>9.1f}x"
        )


AUTO_FIT_SNIPPET = """
import time
import numpy as np
import horizonbench._kernels as k
from horizonbench.arima import auto_fit
rng = np.random.default_rng(3)
e = rng.normal(0, 1, 655)
x = np.zeros(655)
for t in range(2, 655):
    x[t] = 0.6 * x[t-1] + 0.2 * x[t-2] + e[t]
x = (x[200:] + 6.0) * 50.0
start = time.perf_counter()
order, params, stats = auto_fit(x)
print(f"{k.BACKEND}: auto_fit(n=455) -> {order.label()} "
      f"in {time.perf_counter() - start:.2f}s")
"""


def end_to_end():
    sys.stdout.flush()
    for pure in ("0", "1"):
        env = dict(os.environ, HORIZONBENCH_PURE=pure)
        subprocess.run([sys.executable, "-c", AUTO_FIT_SNIPPET], env=env, check=True)


if __name__ == "__main__":
    print("== innovation filter kernel ==", flush=True)
    kernel_microbench()
    print("\n== automatic order search, one interpreter per backend ==", flush=True)
    end_to_end()
