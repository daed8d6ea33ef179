"""Compare the numba and numpy dynamics backends.

Times the two hot paths: a full-epoch evaluation (what every annealing
epoch pays) and single trajectories of long-transient networks.  Both
backends are checked to give identical results before timing.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from boolnet import kernels
from boolnet.network import StateVector, random_network, run_to_attractor
from boolnet.training import Evaluator, make_task_set


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def epoch_workload(n, tasks, count):
    ev = Evaluator(make_task_set(tasks, n))
    nets = [random_network(n, s) for s in range(count)]
    return lambda: [ev.energy(net) for net in nets]


def trajectory_workload(n, count):
    rng = np.random.default_rng(0)
    cases = []
    for s in range(count):
        s0 = np.where(rng.random(n) < 0.5, -1, 1).astype(np.int8)
        cases.append((random_network(n, s), StateVector(s0)))
    return lambda: [run_to_attractor(net, s) for net, s in cases]


WORKLOADS = {
    "epoch N=10 AND": lambda: epoch_workload(10, [("AND", 2)], 2000),
    "epoch N=15 AND,OR,NAND": lambda: epoch_workload(15, [("AND", 2), ("OR", 2), ("NAND", 2)],
                                                     1000),
    "trajectory N=20": lambda: trajectory_workload(20, 500),
}


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    backends = kernels.available_backends()
    print(f"{'workload':<26}" + "".join(f"{b:>12}" for b in backends) + "     speedup")
    for name, make in WORKLOADS.items():
        work = make()
        row, outputs = [], []
        for backend in backends:
            previous = kernels.use_backend(backend)
            try:
                outputs.append(repr(work()))  # also warms up the JIT
                row.append(best_of(work, args.repeat))
            finally:
                kernels.use_backend(previous)
        if len(set(outputs)) != 1:
            raise SystemExit(f"{name}: backends disagree")
        speed = f"{row[-1] / row[0]:8.1f}x" if len(row) == 2 else ""
        print(f"{name:<26}" + "".join(f"{t:11.4f}s" for t in row) + f"  {speed}")


if __name__ == "__main__":
    main()
