"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--cutoff 60] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from tdsts import StateSpec, _kernels_py
from tdsts.oracle.fock import displacement_generator, squeeze_generator, thermal_generator

try:
    from tdsts import _kernels as _compiled
except ImportError:
    _compiled = None


def workloads(cutoff):
    work = 2 * cutoff + 1
    psi = np.zeros((work, work), complex)
    psi[0, 0] = 1
    gens = [thermal_generator(0.4), displacement_generator(0.5 + 0.3j), squeeze_generator(0.7 * np.exp(1j))]
    xi = np.linspace(-12, 12, 2001)

    def circuit(mod):
        def run():
            out = psi
            for g in gens:
                out = mod.expm_apply(out, g)
            return out

        return run

    return {
        "apply_generator": lambda mod: (lambda: mod.apply_generator(psi, gens[2])),
        "expm circuit": circuit,
        "hermite_functions": lambda mod: (lambda: mod.hermite_functions(cutoff, xi)),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--cutoff", type=int, default=60)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = [("python", _kernels_py)]
    if _compiled is None:
        print("compiled extension not built; timing the numpy backend only")
    else:
        backends.append(("cython", _compiled))

    print(f"{'kernel':<20}" + "".join(f"{name:>12}" for name, _ in backends) + ("     speedup" if len(backends) == 2 else ""))
    for label, make in workloads(args.cutoff).items():
        best = []
        for _, mod in backends:
            fn = make(mod)
            fn()  # warm up
            number = max(1, int(0.2 / max(timeit.timeit(fn, number=1), 1e-6)))
            best.append(min(timeit.repeat(fn, number=number, repeat=args.repeat)) / number)
        line = f"{label:<20}" + "".join(f"{t * 1e3:>10.3f}ms" for t in best)
        if len(best) == 2:
            line += f"{best[0] / best[1]:>11.1f}x"
        print(line)

    if _compiled is not None:
        wl = workloads(args.cutoff)["expm circuit"]
        diff = np.abs(wl(_kernels_py)() - wl(_compiled)()).max()
        print(f"max backend difference on the circuit: {diff:.1e}")


if __name__ == "__main__":
    main()
