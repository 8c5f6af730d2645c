"""Time the compiled and numpy kernels on full 7-city LON extraction.

    python benchmarks/bench_kernels.py [--repeat 5] [--seed 0]

Reports the best-of-N wall time of each stage per backend and checks that
both backends return the same LON.
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from ttplon import backend
from ttplon.generator import GeneratorConfig, generate_instance
from ttplon.graph import metrics
from ttplon.lon import evaluate_space, extract_lon
from ttplon.model import Model
from ttplon.space import build_tables


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return min(times), out


def run(name, inst, model, repeat):
    backend.use(name)
    k = backend.kernels
    tables = build_tables(inst)
    row = {}
    row["evaluate"], fit = best_of(lambda: evaluate_space(inst, model, tables), repeat)
    row["sweep"], nxt = best_of(
        lambda: np.asarray(k.sweep_next(fit, tables.plan_ok, tables.tsp_table, inst.m, False, 0, tables.size)),
        repeat,
    )
    row["resolve"], _ = best_of(lambda: k.resolve_optima(nxt.astype(np.int64)), repeat)
    row["extract"], lon = best_of(lambda: extract_lon(inst, model), repeat)
    row["metrics"], _ = best_of(lambda: metrics(lon), repeat)
    return row, lon


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    base = generate_instance(GeneratorConfig("u", 10, seed=args.seed))
    inst = base.replace(capacity=math.fsum(base.weights))  # all 46080 solutions feasible

    names = ["numpy"] + (["cython"] if backend.compiled() is not None else [])
    results, lons = {}, {}
    for model in (Model.TTPA, Model.TTPC):
        for name in names:
            results[(model, name)], lons[(model, name)] = run(name, inst, model, args.repeat)
        if len(names) == 2:
            assert lons[(model, "numpy")] == lons[(model, "cython")], "backends disagree"

    stages = ["evaluate", "sweep", "resolve", "extract", "metrics"]
    print(f"{'model':<6}{'backend':<9}" + "".join(f"{s:>10}" for s in stages) + "   (seconds, best of "
          f"{args.repeat})")
    for (model, name), row in results.items():
        print(f"{model.value:<6}{name:<9}" + "".join(f"{row[s]:>10.4f}" for s in stages))
    if len(names) == 2:
        for model in (Model.TTPA, Model.TTPC):
            ratio = results[(model, "numpy")]["extract"] / results[(model, "cython")]["extract"]
            print(f"{model.value}: compiled extraction is {ratio:.1f}x faster than numpy")
    else:
        print("compiled kernels not built; only the numpy fallback was timed")


if __name__ == "__main__":
    main()
