"""Acceptance criteria, one test each.

Every test records a ``[PASS]``/``[FAIL]`` line with the measured numbers
before asserting; the lines are printed together at the end of the pytest run.
Thresholds are the frozen ones; nothing is relaxed.
"""

import itertools
import math
import os

import numpy as np
import pytest

from lutcgh import cgh
from lutcgh.experiments import SweepConfig, emit_csv, run_cell, run_sweep
from lutcgh.field import dft2, idft2, total_energy
from lutcgh.images import rectangle, texture
from lutcgh.metrics import INDEPENDENT, aggregate, edge_interior_ratio
from lutcgh.random_phase import IndependentSource, build_lut, flat_phase_source

from conftest import SCORECARD, direct_dft2

TARGET = [("texture", "synthetic:texture")]
RUNS = 20


def report(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}: {detail}"
    SCORECARD.append(line)
    assert ok, line


def cell_mse(resolution, n_lut, runs=RUNS, n_sf=24, base_seed=0):
    config = SweepConfig(TARGET, resolution, n_sf=n_sf, runs=runs, lut_lengths=[0], base_seed=base_seed)
    return aggregate(run_cell(config, "texture", n_lut, r).mse for r in range(runs))


def test_criterion_1_dft_correctness():
    rng = np.random.default_rng(1)
    worst = 0.0
    for n_y, n_x in itertools.product(range(1, 17), repeat=2):
        f = rng.standard_normal((n_y, n_x)) + 1j * rng.standard_normal((n_y, n_x))
        F = dft2(f)
        worst = max(worst, np.abs(F - direct_dft2(f, -1)).max(), np.abs(idft2(F) - direct_dft2(F, +1)).max())
    f = rng.standard_normal((256, 256)) + 1j * rng.standard_normal((256, 256))
    F = dft2(f)
    parseval = abs(total_energy(F) - total_energy(f)) / total_energy(f)
    trip = np.abs(idft2(F) - f).max() / np.abs(f).max()
    ok = worst < 1e-9 and parseval < 1e-10 and trip < 1e-10
    report(1, "DFT oracle / Parseval / round trip", ok,
           f"max direct-sum error {worst:.2e} (<1e-9), Parseval {parseval:.2e}, round trip {trip:.2e} (<1e-10)")


def test_criterion_2_bit_exact_lut_equivalence():
    n_x = n_y = 64
    n_sf = 4
    spec = cgh.TargetSpec(texture(n_y // 2, n_x), n_x, n_y)
    a = cgh.ospr_generate(spec, n_sf, IndependentSource(42))
    b = cgh.ospr_generate(spec, n_sf, build_lut(42, n_x * n_y * n_sf))
    differing = int(np.count_nonzero(a.indices != b.indices))
    report(2, "full-length LUT equals independent stream", a.equals(b),
           f"{differing} differing pixels over {a.indices.size}")


def test_criterion_3_headline_additional_error():
    base = cell_mse((256, 256), INDEPENDENT)
    lut = cell_mse((256, 256), 10007)
    extra = lut.mean / base.mean - 1.0
    report(3, "N_LUT=10007 vs independent at 256x256", extra < 0.075,
           f"independent {base.mean:.5g}, lut {lut.mean:.5g}, additional error {100 * extra:+.1f}% (<7.5%)")


def test_criterion_4_rapid_descent():
    big = cell_mse((64, 64), 10007)
    small = {n: cell_mse((64, 64), n) for n in (0, 13)}
    factors = {n: a.mean / big.mean for n, a in small.items()}
    ok = all(f >= 1.5 for f in factors.values())
    report(4, "short LUTs much worse than N_LUT=10007 at 64x64", ok,
           ", ".join(f"N_LUT={n}: x{f:.2f}" for n, f in factors.items()) + " (>=1.5)")


def test_criterion_5_resolution_spike():
    a, b = cell_mse((256, 256), 256), cell_mse((256, 256), 257)
    gap = a.mean - b.mean
    se = math.hypot(a.sem, b.sem)
    report(5, "N_LUT=256 spike over 257 at 256x256", gap > 2 * se,
           f"256: {a.mean:.5g}, 257: {b.mean:.5g}, gap {gap:.3g} = {gap / se:.1f} standard errors (>2)")


def test_criterion_6_subframe_averaging():
    counts = (1, 2, 4, 8, 16, 24)
    means = [cell_mse((128, 128), INDEPENDENT, n_sf=k).mean for k in counts]
    decreasing = all(x > y for x, y in zip(means, means[1:]))
    ratio = means[-1] / means[0]
    report(6, "time averaging reduces MSE at 128x128", decreasing and ratio < 0.2,
           "means " + ", ".join(f"{k}:{m:.4g}" for k, m in zip(counts, means))
           + f"; strictly decreasing={decreasing}, MSE(24)/MSE(1) = {ratio:.3f} (<0.2)")


def test_criterion_7_gs_monotonic():
    n = 64
    targets = {
        "rectangle": rectangle(n // 2, n),
        "texture": texture(n // 2, n),
        "texture-7": texture(n // 2, n, seed=7),
        "ramp": np.linspace(0, 1, n // 2 * n).reshape(n // 2, n),
        "full-random": np.random.default_rng(3).random((n, n)),
    }
    worst = -np.inf
    failures = []
    for name, img in targets.items():
        placement = "full" if img.shape[0] == n else "upper"
        spec = cgh.TargetSpec(img, n, n, placement)
        _, errors = cgh.gs_generate(spec, 50, IndependentSource(9), return_errors=True)
        steps = [(e1 - e0) / e0 for e0, e1 in zip(errors, errors[1:])]
        worst = max(worst, max(steps))
        if max(steps) > 1e-12:
            failures.append(name)
    report(7, "GS error non-increasing over 50 iterations", not failures,
           f"{len(targets)} targets, largest relative step {worst:+.2e} (<=1e-12), failing: {failures or 'none'}")


TOY = dict(images=TARGET, resolution=(64, 64), n_sf=24, runs=5, lut_lengths=[0, 29, 10007],
           base_seed=8, nmse_reference=29)


def test_criterion_8_determinism(tmp_path):
    paths = []
    most = max(2, os.cpu_count() or 1)
    for name, workers in (("serial-a", 1), ("serial-b", 1), ("parallel", most)):
        path = tmp_path / f"{name}.csv"
        emit_csv(run_sweep(SweepConfig(**TOY), workers=workers), path)
        paths.append(path)
    data = [p.read_bytes() for p in paths]
    ok = data[0] == data[1] == data[2]
    report(8, "toy sweep CSV byte-identical across reruns and worker counts", ok,
           f"{len(data[0].splitlines()) - 1} rows, workers 1/1/{most}")


def test_criterion_9_edge_enhancement():
    n = 128
    spec = cgh.TargetSpec(rectangle(n // 2, n), n, n)
    shape = cgh.embed_target(spec) > 0

    def ratio(source):
        return edge_interior_ratio(cgh.reconstruct_average(cgh.ospr_generate(spec, 24, source)), shape)

    runs = 10
    flat = aggregate(ratio(flat_phase_source()) for _ in range(runs)).mean
    indep = aggregate(ratio(IndependentSource(100 + r)) for r in range(runs)).mean
    report(9, "flat phase enhances edges", flat > 2 * indep,
           f"edge/interior ratio flat {flat:.3g} vs independent {indep:.3g} (flat > 2 x independent)")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s", "-p", "no:cacheprovider"]))
