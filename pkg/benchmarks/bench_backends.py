"""Compare the compiled and pure-Python codec kernels on the same streams.

    python benchmarks/bench_backends.py [--values N] [--repeat R]
"""

import argparse
import time

import numpy as np

from lcp import _backend, synth
from lcp.bench import hardware_note


def streams(n: int) -> dict[str, np.ndarray]:
    rng = np.random.default_rng(0)
    steps = rng.integers(-3, 4, n) * (rng.random(n) < 0.1)
    duration = n / 50
    return {
        "synth P": synth.generate(duration_s=duration, seed=0).aggregate.astype(np.int16)[:n],
        "random walk": (np.cumsum(steps) % 20000).astype(np.int16),
        "uniform": rng.integers(-32768, 32768, n, dtype=np.int16),
    }


def best_rate(fn, n: int, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return n / best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--values", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    kernels = [_backend.pycore] + ([_backend.ccore] if _backend.ccore else [])
    if _backend.ccore is None:
        print("compiled kernel not built; showing the Python kernel only")
    print(hardware_note())
    print(f"{'stream':<12} {'kernel':<8} {'encode/s':>14} {'decode/s':>14} {'bits/value':>10}")
    for name, values in streams(args.values).items():
        n = len(values)
        for k in kernels:
            data, nbits, _, _ = k.encode(values)
            out, _ = k.decode(data, 0, nbits, n)
            assert np.array_equal(out, values)
            enc = best_rate(lambda: k.encode(values), n, args.repeat)
            dec = best_rate(lambda: k.decode(data, 0, nbits, n), n, args.repeat)
            print(f"{name:<12} {k.NAME:<8} {enc:>14,.0f} {dec:>14,.0f} {nbits / n:>10.3f}")


if __name__ == "__main__":
    main()
