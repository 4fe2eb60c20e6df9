"""Compare the compiled field kernels with the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Each row times one kernel on both backends and checks the results agree.
"""
import argparse
import timeit

import numpy as np

from linsdmm import _backend
from linsdmm.galois import PrimeField

CASES = {
    "matmul 64x64 p=65537": (65537, lambda f, rng: (f.random((64, 64), rng), f.random((64, 64), rng)), "matmul"),
    "matmul 64x64 p=2^61-1": ((1 << 61) - 1, lambda f, rng: (f.random((64, 64), rng), f.random((64, 64), rng)), "matmul"),
    "batched matmul 256x(3x6)(6x3) p=2^61-1": (
        (1 << 61) - 1, lambda f, rng: (f.random((256, 3, 6), rng), f.random((256, 6, 3), rng)), "matmul",
    ),
    "mulmod 10^5 p=2^61-1": ((1 << 61) - 1, lambda f, rng: (f.random(100_000, rng), f.random(100_000, rng)), "mul"),
    "rref 48x96 p=2^61-1": ((1 << 61) - 1, lambda f, rng: (f.random((48, 96), rng),), "rref"),
}


def run(repeat):
    backends = _backend.available()
    print(f"{'kernel':42s}" + "".join(f"{b:>14s}" for b in backends) + "   speedup  agree")
    for label, (p, make, op) in CASES.items():
        f = PrimeField(p)
        args = make(f, np.random.default_rng(0))
        fn = getattr(f, op)
        times, outs = [], []
        for name in backends:
            prev = _backend.use(name)
            try:
                outs.append(fn(*args))
                times.append(min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat)))
            finally:
                _backend.use(prev)
        agree = all(_same(outs[0], o) for o in outs[1:])
        speed = times[0] / times[-1] if len(times) > 1 else 1.0
        cells = "".join(f"{1e3 * t:12.3f}ms" for t in times)
        print(f"{label:42s}{cells}{speed:9.1f}x  {agree}")


def _same(a, b):
    if isinstance(a, tuple):
        return np.array_equal(a[0], b[0]) and list(a[1]) == list(b[1])
    return np.array_equal(a, b)


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    run(parser.parse_args().repeat)
