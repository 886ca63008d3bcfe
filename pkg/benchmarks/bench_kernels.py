"""Time the compiled and numpy Pauli kernels against each other.

    python3 benchmarks/bench_kernels.py --qubits 3 4 5 6 --repeat 20
"""
import argparse
import timeit

import numpy as np

from sgqst import _kernels_py
from sgqst.pauli import enumerate_paulis, pauli_masks

try:
    from sgqst import _kernels as _compiled
except ImportError:
    _compiled = None


def random_state(n, rng):
    d = 2 ** n
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def time_call(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--qubits", type=int, nargs="+", default=[3, 4, 5, 6])
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args(argv)
    impls = {"python": _kernels_py}
    if _compiled is not None:
        impls["cython"] = _compiled
    else:
        print("compiled extension not built; timing the numpy kernels only")
    rng = np.random.default_rng(0)
    print(f"{'n':>2} {'kernel':<20}" + "".join(f"{name:>12}" for name in impls) + "  (ms, best of repeats)")
    for n in args.qubits:
        paulis = enumerate_paulis(n)
        xm, zm, ny = pauli_masks(paulis)
        rho = random_state(n, rng)
        coeffs = rng.normal(size=len(paulis))
        cases = {
            "expectations": lambda k: k.pauli_expectations(rho, xm, zm, ny),
            "combination": lambda k: k.pauli_combination(coeffs, xm, zm, ny, 2 ** n),
        }
        for label, call in cases.items():
            ms = [1000 * time_call(lambda: call(k), args.repeat) for k in impls.values()]
            print(f"{n:>2} {label:<20}" + "".join(f"{t:>12.3f}" for t in ms))


if __name__ == "__main__":
    main()
