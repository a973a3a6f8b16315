"""Timing comparison: compiled refinement kernel vs the pure-Python twin.

Both backends get byte-identical starting isometries and coefficient data,
so the reported value deviation measures only floating-point path drift,
not problem noise.  Run from the repository root:

    python3 benchmarks/bench_kernels.py --sweeps 300 --repeats 5
"""

import argparse
import time

import numpy as np

from varroof.hermitian import eigh
from varroof.kernels import refine_py
from varroof.oracle import haar_random_stiefel, restart_rng
from varroof.sampling import iter_cases

try:
    from varroof.kernels import _refine
except ImportError:
    _refine = None


def build_problems(seed, count, dims):
    problems = []
    for index, dim, rank, rho, h in iter_cases(seed, count, dims):
        spec = eigh(rho)
        lam = spec.supported_eigenvalues()
        vr = spec.supported_vectors()
        h_sup = vr.conj().T @ h.matrix @ vr
        b = np.sqrt(np.outer(lam, lam)) * h_sup.conj()
        tr_h2 = float(np.trace(rho.matrix @ h.matrix @ h.matrix).real)
        w = np.ascontiguousarray(
            haar_random_stiefel(spec.rank, spec.rank, restart_rng(17, index)).matrix
        )
        problems.append((dim, rank, w, b, lam, tr_h2))
    return problems


def time_backend(kernel, problems, sweeps, repeats):
    """Best-of-``repeats`` wall time for one full pass over the problems."""
    best = float("inf")
    values = None
    for _ in range(repeats):
        run_values = []
        t0 = time.perf_counter()
        for _, _, w, b, lam, tr_h2 in problems:
            out = kernel.refine_isometry(w.copy(), b, lam, tr_h2, 1.0, sweeps, 1e-12)
            run_values.append(out[0])
        best = min(best, time.perf_counter() - t0)
        values = run_values
    return best, np.asarray(values)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--cases", type=int, default=40)
    parser.add_argument("--dims", type=str, default="2,3,4,5,6")
    parser.add_argument("--sweeps", type=int, default=300)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=99)
    args = parser.parse_args()

    dims = [int(d) for d in args.dims.split(",")]
    problems = build_problems(args.seed, args.cases, dims)
    print(
        f"{len(problems)} problems, dims {dims}, {args.sweeps} sweeps, "
        f"best of {args.repeats} runs"
    )

    t_py, v_py = time_backend(refine_py, problems, args.sweeps, args.repeats)
    print(f"python   : {t_py * 1e3:9.2f} ms")

    if _refine is None:
        print("compiled : not built (pip install -e . --no-build-isolation)")
        return

    t_c, v_c = time_backend(_refine, problems, args.sweeps, args.repeats)
    dev = float(np.abs(v_py - v_c).max())
    print(f"compiled : {t_c * 1e3:9.2f} ms")
    print(f"speedup  : {t_py / t_c:9.1f}x")
    print(f"max |value_py - value_c| = {dev:.3e}")


if __name__ == "__main__":
    main()
