"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_backends.py [--repeat N]

Each row times one operation on every available backend and reports the
best of N runs plus the speedup of the compiled kernels.
"""

import argparse
import random
import time

from entdistill import _backend
from entdistill.linalg import ComplexMatrix, conjugate_by, matmul
from entdistill.objective import ChannelModel, evaluate_at
from entdistill.optimize import SearchConfig, optimize_protocol
from entdistill.oracle import OracleConfig, mc_evaluate
from entdistill.protocol import ProtocolParams, dejmps, na_loccnet


def _random(n, rng):
    return ComplexMatrix(n, n, tuple(complex(rng.random(), rng.random()) for _ in range(n * n)))


def _cases():
    rng = random.Random(1)
    a, b = _random(16, rng), _random(16, rng)
    na = na_loccnet()
    ch = ChannelModel(0.25)
    return [
        ("matmul 16x16 (x200)", lambda: [matmul(a, b) for _ in range(200)]),
        ("sandwich 16x16 (x200)", lambda: [conjugate_by(a, b) for _ in range(200)]),
        ("evaluate na-loccnet (x50)", lambda: [evaluate_at(na, 1.3, 0.6, ch) for _ in range(50)]),
        ("optimize na-loccnet, 256-point grid", lambda: optimize_protocol(na, 0.6, ch, cfg=SearchConfig(256))),
        ("oracle dejmps, 1e5 samples", lambda: mc_evaluate(dejmps(), None, 0.6, ch, OracleConfig(100_000, seed=3))),
        ("oracle na-loccnet, 1e5 samples",
         lambda: mc_evaluate(na, ProtocolParams(1.3), 0.6, ch, OracleConfig(100_000, seed=3))),
    ]


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    names = _backend.available()
    print(f"{'case':<40}" + "".join(f"{n + ' [s]':>14}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, fn in _cases():
        times = {}
        for name in names:
            with _backend.use(name):
                fn()  # warm caches
                times[name] = _best(fn, args.repeat)
        row = f"{label:<40}" + "".join(f"{times[n]:14.4f}" for n in names)
        if len(names) > 1:
            row += f"{times['python'] / times['cython']:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
