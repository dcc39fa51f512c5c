#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Times the two hot paths of the receiver model on synthetic workloads:
per-node received-power rows and per-reception success probabilities.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from uwbsim import _core_py

try:
    from uwbsim import _core
except ImportError:
    _core = None

WAVELENGTH = 299792458.0 / 0.8e9


def make_cases(n_cases, max_interferers, seed=1):
    rng = np.random.default_rng(seed)
    cases = []
    for _ in range(n_cases):
        n = int(rng.integers(0, max_interferers + 1))
        signal = float(rng.uniform(0.5, 5.0) * 1e-9)
        mw = (rng.uniform(0.01, 3.0, n) * signal).tolist()
        a = rng.uniform(-5e-4, 1.152e-3, n).tolist()
        b = (np.array(a) + rng.uniform(1e-5, 2e-3, n)).tolist()
        cases.append((signal, 1e-12, 0.0, 1.152e-3, mw, a, b))
    return cases


def bench_reception(impl, cases, repeat):
    def work():
        for sig, noise, t0, t1, mw, a, b in cases:
            impl.reception_success_prob(sig, noise, t0, t1, mw, a, b,
                                        1e6, 100.0)
    return min(timeit.repeat(work, number=1, repeat=repeat))


def bench_rx_rows(impl, dists, repeat):
    def work():
        for _ in range(200):
            impl.rx_powers_mw(-18.3, dists, WAVELENGTH, 0.45, 0.45, True)
    return min(timeit.repeat(work, number=1, repeat=repeat))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5,
                        help="timing repetitions (best is reported)")
    args = parser.parse_args()

    impls = [_core_py] + ([_core] if _core is not None else [])
    cases = make_cases(n_cases=2000, max_interferers=10)
    dists = np.random.default_rng(2).uniform(0.1, 150.0, 66)

    print(f"{'backend':<10} {'reception x2000':>16} {'rx rows x200':>14}")
    results = {}
    for impl in impls:
        t_rec = bench_reception(impl, cases, args.repeat)
        t_row = bench_rx_rows(impl, dists, args.repeat)
        results[impl.BACKEND] = (t_rec, t_row)
        print(f"{impl.BACKEND:<10} {t_rec * 1e3:>13.2f} ms {t_row * 1e3:>11.2f} ms")

    if _core is None:
        print("compiled backend not built; only the fallback was timed")
    else:
        py, cy = results["python"], results["cython"]
        print(f"speedup: reception x{py[0] / cy[0]:.1f}, "
              f"rx rows x{py[1] / cy[1]:.1f}")

    # The two implementations must agree bit-for-bit on the same inputs.
    if _core is not None:
        for sig, noise, t0, t1, mw, a, b in cases[:200]:
            p_py = _core_py.reception_success_prob(sig, noise, t0, t1,
                                                   mw, a, b, 1e6, 100.0)
            p_cy = _core.reception_success_prob(sig, noise, t0, t1,
                                                mw, a, b, 1e6, 100.0)
            assert abs(p_py - p_cy) <= 1e-12 * max(p_py, 1e-300), \
                (p_py, p_cy)
        print("agreement check passed on 200 cases")


if __name__ == "__main__":
    main()
