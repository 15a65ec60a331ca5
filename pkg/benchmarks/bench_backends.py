#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

Covers the three hot kernels at several dimensions plus one end-to-end
solver run per backend. Run from the repository root:

    python benchmarks/bench_backends.py
"""

import time

import numpy as np

from fixopt import ExperimentConfig, StepSchedule, _backend, run_experiment


def time_call(fn, *args, repeat=2000):
    best = np.inf
    for _ in range(5):
        t0 = time.perf_counter()
        for _ in range(repeat):
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / repeat)
    return best


def kernel_rows():
    from fixopt import _kernels_py

    impls = {"python": _kernels_py}
    try:
        from fixopt import _kernels

        impls["compiled"] = _kernels
    except ImportError:
        pass
    rng = np.random.default_rng(0)
    rows = []
    for d in (16, 64, 256, 1024):
        x = rng.normal(size=d)
        center = np.zeros(d)
        inner_c = np.ascontiguousarray(rng.uniform(-0.1, 0.1, (3, d)))
        inner_r = np.ascontiguousarray(0.3 + rng.random(3))
        cases = [
            (f"ball_project d={d}", "ball_project", (x, center, 1.0)),
            (f"gcfs_apply   d={d}", "gcfs_apply", (x, center, 1.0, inner_c, inner_r)),
            (f"gcfs_residual d={d}", "gcfs_residual", (x, center, 1.0, inner_c, inner_r)),
        ]
        for label, fname, args in cases:
            timings = {name: time_call(getattr(impl, fname), *args)
                       for name, impl in impls.items()}
            rows.append((label, timings))
    return rows


def end_to_end(backend):
    _backend.use(backend)
    cfg = ExperimentConfig(
        d=64, I=4, K=3, objective="quadratic", algorithm="gradient",
        sampler="iid", schedule=StepSchedule(0.25, 0.5, 1e-3, 1e-3),
        samplings=5, n_max=500, d_threshold=1e-2, f_delta_threshold=1e-5,
        master_seed=7449,
    )
    t0 = time.perf_counter()
    run_experiment(cfg)
    return time.perf_counter() - t0


def main():
    print(f"available backends: {', '.join(_backend.available())}")
    rows = kernel_rows()
    have_compiled = "compiled" in _backend.available()
    print(f"\n{'kernel':24s} {'python':>12s} {'compiled':>12s} {'speedup':>9s}")
    for label, timings in rows:
        py = timings["python"] * 1e6
        if "compiled" in timings:
            cy = timings["compiled"] * 1e6
            print(f"{label:24s} {py:10.2f}us {cy:10.2f}us {py / cy:8.1f}x")
        else:
            print(f"{label:24s} {py:10.2f}us {'-':>12s} {'-':>9s}")

    default = _backend.current()
    try:
        t_py = end_to_end("python")
        line = f"\nend-to-end experiment   {t_py:10.2f}s "
        if have_compiled:
            t_cy = end_to_end("compiled")
            line += f"{t_cy:10.2f}s  {t_py / t_cy:8.1f}x"
        print(line)
    finally:
        _backend.use(default)


if __name__ == "__main__":
    main()
