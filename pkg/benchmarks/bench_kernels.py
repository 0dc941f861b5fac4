"""Compare the numba and numpy kernel backends.

    python benchmarks/bench_kernels.py [--repeat 5] [--max-qubits 20]

Each row is the best of ``--repeat`` timings after one warm-up call (which
also triggers numba compilation).
"""

import argparse
import time

import numpy as np

from cohsim import QuantumState, _kernels, simulate_stages
from cohsim.protocols import RepeaterSchedule, build_repeater, run_teleportation
from cohsim.randstate import random_pure, random_unitary


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(max_qubits, rng):
    u2, u4 = random_unitary(2, rng), random_unitary(4, rng)
    for n in range(12, max_qubits + 1, 4):
        vec = random_pure(n, rng).vector.copy()
        yield f"apply_1q n={n}", lambda v=vec, n=n: _kernels.apply_1q(v, u2, n // 2, n)
        yield f"apply_2q n={n}", lambda v=vec, n=n: _kernels.apply_2q(v, u4, 1, n - 2, n)
    for n in (8, 10):
        v = random_pure(n, rng).vector
        rho = np.outer(v, v.conj())
        mask = _kernels.qubit_mask([0, n - 1], n)
        yield f"scale_offdiag n={n}", lambda r=rho, m=mask: _kernels.scale_offdiag(r, m, 0.5)
    sched = RepeaterSchedule.parallel(5, 2)
    circuit = build_repeater(sched)
    yield "repeater parallel(5,2)", lambda: simulate_stages(circuit, QuantumState.zeros(10), keep_states=False)
    msg = random_pure(3, rng)
    yield "teleport 3 gadgets", lambda: run_teleportation(3, msg)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--max-qubits", type=int, default=20)
    args = ap.parse_args()

    backends = [b for b in ("numpy", "numba") if b in _kernels.AVAILABLE]
    results = {}
    for b in backends:
        prev = _kernels.set_backend(b)
        try:
            for name, fn in cases(args.max_qubits, np.random.default_rng(0)):
                results.setdefault(name, {})[b] = best_of(fn, args.repeat)
        finally:
            _kernels.set_backend(prev)

    print(f"{'case':<26}" + "".join(f"{b + ' ms':>12}" for b in backends) + f"{'speedup':>10}")
    for name, row in results.items():
        cells = "".join(f"{row[b] * 1e3:12.3f}" for b in backends)
        speed = f"{row['numpy'] / row['numba']:9.2f}x" if len(backends) == 2 else ""
        print(f"{name:<26}{cells}{speed}")


if __name__ == "__main__":
    main()
