"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py [--size 1024] [--subframes 24] [--repeat 5]

Times the per-pixel kernels on both backends, plus the phase generation cost
of an independent PRNG+trig source against a LUT lookup, and a full OSPR
frame-set generation.
"""

import argparse
import timeit

import numpy as np

import lutcgh
from lutcgh import _kernels_py, cgh
from lutcgh.images import texture
from lutcgh.random_phase import IndependentSource, build_lut


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=1024)
    ap.add_argument("--subframes", type=int, default=24)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    n, k = args.size, args.subframes
    rng = np.random.default_rng(0)
    amp = rng.random((k, n, n))
    lut = build_lut(1, 10007)
    field = rng.standard_normal((k, n, n)) + 1j * rng.standard_normal((k, n, n))
    bits = (rng.random((k, n, n)) < 0.5).astype(np.uint8)

    backends = lutcgh.available_backends()
    print(f"{k} x {n}x{n} pixels; backends: {', '.join(backends)}")
    rows = {}
    for name in backends:
        lutcgh.use_backend(name)
        kern = lutcgh._backend.kernels
        rows[name] = {
            "lut_modulate": best(lambda: kern.lut_modulate(amp, lut.re, lut.im, 0), args.repeat),
            "binary_quantise": best(lambda: kern.binary_quantise(field), args.repeat),
            "pack_rows": best(lambda: kern.pack_rows(bits), args.repeat),
        }
        spec = cgh.TargetSpec(texture(n // 2, n), n, n)
        rows[name]["ospr_generate"] = best(lambda: cgh.ospr_generate(spec, k, build_lut(1, 10007)), 1)

    names = list(rows[backends[0]])
    print(f"{'kernel':<18}" + "".join(f"{b:>12}" for b in backends) + ("   speed-up" if len(backends) > 1 else ""))
    for kname in names:
        times = [rows[b][kname] for b in backends]
        line = f"{kname:<18}" + "".join(f"{t * 1e3:>10.1f}ms" for t in times)
        if len(backends) > 1:
            line += f"   x{times[-1] / times[0]:.2f}"
        print(line)

    count = amp.size
    indep = best(lambda: IndependentSource(1).take(count), args.repeat)
    table = best(lambda: _kernels_py.lut_modulate(amp, lut.re, lut.im, 0), args.repeat)
    print(f"\nphase factors for {count} pixels: PRNG+cos/sin {indep * 1e3:.1f}ms, "
          f"LUT lookup (python) {table * 1e3:.1f}ms")


if __name__ == "__main__":
    main()
