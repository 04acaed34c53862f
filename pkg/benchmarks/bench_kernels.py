"""Compare the compiled and pure-Python quadrature kernels.

Usage:
    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import time

from matterwave import quadrature
from matterwave.kinematics import DeviceFrame, ExperimentParams
from matterwave.phase import trajectory_term_residual
from matterwave.propertime import proper_time_oracle
from matterwave.quadrature import QuadratureSpec

P = ExperimentParams(m=2.2e-25, g=9.8, T=0.1, kappa=1.6e7, v_x0=1e3)
NEUTRON_LAB = DeviceFrame("neutron", "lab")


def oracle_sweep(q):
    total = 0.0
    for i in range(20):
        p = P.replace(g=9.8 * (1 + 0.05 * i))
        for df in DeviceFrame.all():
            total += proper_time_oracle(df, p, q).delta_tau
    return total


def bend_simpson(q):
    return sum(trajectory_term_residual(NEUTRON_LAB, P.replace(g=g), q) for g in (9.8, 4.9, 2.45))


CASES = {
    "oracle sweep, gauss": (oracle_sweep, QuadratureSpec()),
    "oracle sweep, simpson": (oracle_sweep, QuadratureSpec(method="simpson", rel_tol=1e-10)),
    "trajectory term, simpson": (bend_simpson, QuadratureSpec(method="simpson", rel_tol=1e-10)),
}


def timeit(fn, q, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        value = fn(q)
        best = min(best, time.perf_counter() - start)
    return best, value


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    backends = quadrature.available_backends()
    if "compiled" not in backends:
        print("compiled kernels not built; only the Python backend is available")
    print(f"{'case':28s}" + "".join(f"{b:>14s}" for b in backends) + "   speedup   max rel. diff")
    for name, (fn, q) in CASES.items():
        times, values = {}, {}
        for backend in backends:
            quadrature.use_backend(backend)
            times[backend], values[backend] = timeit(fn, q, args.repeat)
        row = f"{name:28s}" + "".join(f"{times[b] * 1e3:12.2f}ms" for b in backends)
        if len(backends) == 2:
            ref = values["python"]
            diff = abs(values["compiled"] - ref) / abs(ref) if ref else abs(values["compiled"])
            row += f"   {times['python'] / times['compiled']:7.1f}x   {diff:.1e}"
        print(row)
    quadrature.use_backend(backends[0])


if __name__ == "__main__":
    main()
