"""Timing comparison of the compiled and pure-Python rotation kernels.

Run from the repository root after building the extension:

    python3 benchmarks/bench_backends.py [--repeats N]

The eigensolver and one-sided SVD are the hot kernels; everything downstream
(certification, decomposition, witnesses) is dominated by them.
"""

import argparse
import statistics
import time

import sepfactory as sf
from sepfactory.rng import Prng


def _median_ms(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append((time.perf_counter() - t0) * 1e3)
    return statistics.median(times)


def bench_kernels(sizes, repeats):
    rows = []
    for n in sizes:
        m = Prng(1).complex_matrix(n, n)
        herm = 0.5 * (m + m.conj().T)
        rect = Prng(2).complex_matrix(n, max(2, n // 2))
        per_backend = {}
        for name in sf.available_backends():
            sf.set_backend(name)
            eig_ms = _median_ms(lambda: sf.hermitian_eig(herm), repeats)
            svd_ms = _median_ms(lambda: sf.singular_values(rect), repeats)
            per_backend[name] = (eig_ms, svd_ms)
        rows.append((n, per_backend))
    return rows


def bench_pipeline(repeats):
    def run():
        rho, cert = sf.random_semi_ssppt(3, 4, seed=7)
        sf.verify_semi_ssppt(cert)
        sf.is_ppt(rho)
        ens = sf.extract_ensemble(cert)
        sf.trace_distance(sf.reconstruct(ens), rho)

    out = {}
    for name in sf.available_backends():
        sf.set_backend(name)
        out[name] = _median_ms(run, repeats)
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=7)
    parser.add_argument("--sizes", type=int, nargs="+",
                        default=[8, 16, 24, 32, 48])
    args = parser.parse_args()

    names = sf.available_backends()
    print(f"backends available: {', '.join(names)}")
    if len(names) == 1:
        print("compiled kernel not built; timing the fallback only")

    print("\nhermitian eigensolver / one-sided SVD, median ms")
    header = f"{'n':>4}"
    for name in names:
        header += f"  {name + ' eig':>12}  {name + ' svd':>12}"
    if len(names) == 2:
        header += f"  {'eig speedup':>12}"
    print(header)
    for n, per_backend in bench_kernels(args.sizes, args.repeats):
        line = f"{n:>4}"
        for name in names:
            eig_ms, svd_ms = per_backend[name]
            line += f"  {eig_ms:>12.3f}  {svd_ms:>12.3f}"
        if len(names) == 2:
            speedup = per_backend["python"][0] / per_backend["cython"][0]
            line += f"  {speedup:>11.1f}x"
        print(line)

    print("\nfull certify + decompose pipeline on a 3 (x) 4 instance, median ms")
    for name, ms in bench_pipeline(args.repeats).items():
        print(f"  {name:>7}: {ms:.2f}")


if __name__ == "__main__":
    main()
