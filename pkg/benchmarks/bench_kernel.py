#!/usr/bin/env python3
"""Benchmark the compiled slot-loop kernel against the pure-Python fallback.

Runs identical workloads through both backends, checks the outputs match,
and reports slots/second. Usage: python benchmarks/bench_kernel.py [slots]
"""

import sys
import time

import numpy as np

from flpf.sim import _kernel_available, _pykernel

if _kernel_available:
    from flpf.sim import _kernel
else:
    _kernel = None


def ring_masks(k):
    return np.array(
        [(1 << ((i + 1) % k)) | (1 << ((i - 1) % k)) for i in range(k)],
        dtype=np.int64,
    )


def workloads(slots):
    rng = np.random.default_rng(0)
    out = []
    for name, k, cap_hi in (("three-link path", 3, 2), ("six-link ring", 6, 3)):
        caps = rng.integers(0, cap_hi, size=(slots, k)).astype(np.int64)
        arrivals = rng.integers(0, 2, size=(slots, k)).astype(np.int64)
        if k == 3:
            nbr = np.array([0b010, 0b101, 0b010], dtype=np.int64)
        else:
            nbr = ring_masks(k)
        out.append((name, caps, arrivals, nbr, np.zeros(k, dtype=np.int64)))
    return out


def run(backend, caps, arrivals, nbr, q0):
    t0 = time.perf_counter()
    result = backend.run_slots(caps, arrivals, nbr, q0, False, False, 1024)
    return time.perf_counter() - t0, result


def main():
    slots = int(sys.argv[1]) if len(sys.argv) > 1 else 200_000
    print(f"workload: {slots} slots per case\n")
    header = f"{'case':<18} {'python':>14} {'compiled':>14} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, caps, arrivals, nbr, q0 in workloads(slots):
        t_py, r_py = run(_pykernel, caps, arrivals, nbr, q0)
        if _kernel is None:
            print(f"{name:<18} {slots / t_py:>12.0f}/s {'n/a':>14} {'n/a':>9}")
            continue
        t_c, r_c = run(_kernel, caps, arrivals, nbr, q0)
        for a, b in zip(r_py, r_c):
            assert np.array_equal(a, b), "backend outputs diverge"
        print(
            f"{name:<18} {slots / t_py:>12.0f}/s {slots / t_c:>12.0f}/s "
            f"{t_py / t_c:>8.1f}x"
        )
    if _kernel is None:
        print("\ncompiled kernel not built; install with `pip install -e .`")


if __name__ == "__main__":
    main()
