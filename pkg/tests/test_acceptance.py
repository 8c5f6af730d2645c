"""Acceptance criteria, one test each, with a PASS/FAIL line per criterion.

The lines are collected and printed in the terminal summary under
"acceptance criteria" so a plain ``pytest`` run shows them.
"""

import filecmp
import math
import time

import numpy as np
import pytest

from ttplon import backend
from ttplon.export import write_report
from ttplon.generator import CAPACITY_CLASSES, CORRELATIONS, DROP_RATES, GeneratorConfig, generate_instance
from ttplon.graph import metrics
from ttplon.lon import enumerate_solutions, evaluate_space, extract_lon
from ttplon.model import Model, fitness
from ttplon.search import Policy, is_local_optimum
from ttplon.space import decode
from ttplon.stats import ExperimentConfig, fisher_mean, run_experiment, spearman

from conftest import ACCEPTANCE_LINES, TOY_SPECS, toy_instance
from oracle import brute_lon, objective

pytestmark = pytest.mark.acceptance


def report(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def _soundness_instances():
    out = []
    for model in Model:
        for i in range(10):
            corr = CORRELATIONS[i % 3]
            cap = CAPACITY_CLASSES[(i // 3) % 3]
            drop = DROP_RATES[i % 3] if model.value_drops else None
            cfg = GeneratorConfig(corr, cap, drop, seed=(2024, i), model=model)
            out.append((model, generate_instance(cfg)))
    return out


@pytest.fixture(scope="module")
def soundness_set():
    start = time.perf_counter()
    items = [(model, inst, extract_lon(inst, model)) for model, inst in _soundness_instances()]
    return items, time.perf_counter() - start


def test_c01_local_optimum_soundness(soundness_set):
    items, build_time = soundness_set
    start = time.perf_counter()
    checked = bad = 0
    for model, inst, lon in items:
        for node in lon.nodes:
            checked += 1
            if not is_local_optimum(inst, model, node.solution, Policy.STRICT):
                bad += 1
    elapsed = build_time + time.perf_counter() - start
    ok = bad == 0 and elapsed <= 120
    report(1, "local-optimum soundness", ok,
           f"{checked - bad}/{checked} nodes have no improving neighbour over {len(items)} instances, "
           f"{elapsed:.1f}s (limit 120s)")


def test_c02_basin_partition(soundness_set):
    items, _ = soundness_set
    failures = []
    for k, (model, inst, lon) in enumerate(items):
        feasible = sum(1 for _ in enumerate_solutions(inst))
        if int(lon.basin_sizes.sum()) != lon.space_size or lon.space_size != feasible:
            failures.append(f"#{k} partition")
        best = max(
            objective(inst, s.tour, s.plan, model.load_dependent, model.value_drops)
            for _, s in enumerate_solutions(inst)
        )
        if lon.fitnesses.max() != best:
            failures.append(f"#{k} optimum")
    report(2, "basin partition", not failures,
           f"{len(items) - len(failures)}/{len(items)} instances exact" + (f" ({failures})" if failures else ""))


def test_c03_oracle_equivalence():
    compared = mismatched = 0
    for i in range(len(TOY_SPECS)):
        inst = toy_instance(i)
        for model in Model:
            for policy in Policy:
                lon = extract_lon(inst, model, policy)
                _, basins, basin_of, edges = brute_lon(
                    inst, model.load_dependent, model.value_drops, policy is Policy.IDENTITIES
                )
                sol = [(nd.solution.tour, nd.solution.plan) for nd in lon.nodes]
                nodes_ok = {s: nd.basin_size for s, nd in zip(sol, lon.nodes)} == {
                    o: len(b) for o, b in basins.items()
                }
                edges_ok = {frozenset((sol[a], sol[b])) for a, b in zip(lon.edge_lo, lon.edge_hi)} == set(edges)
                got = {}
                for index in np.flatnonzero(lon.basin_of >= 0):
                    s = decode(int(index), inst.n, inst.m)
                    got[(s.tour, s.plan)] = sol[lon.basin_of[index]]
                compared += 1
                mismatched += not (nodes_ok and edges_ok and got == basin_of)
    report(3, "oracle equivalence", mismatched == 0,
           f"{compared - mismatched}/{compared} toy LONs equal the brute-force construction "
           f"({len(TOY_SPECS)} instances x 4 models x 2 policies)")


def test_c04_model_coincidences():
    checked = bad = 0
    for seed in range(3):
        base = generate_instance(GeneratorConfig("u", 5, 0.9, seed=(77, seed), model=Model.TTPC))
        roomy = base.replace(capacity=math.fsum(base.weights))
        no_drop = roomy.replace(drop_rate=1.0)
        flat = roomy.replace(v_min=roomy.v_max)
        arrays = {
            (tag, m): evaluate_space(inst, m)
            for tag, inst in (("nd", no_drop), ("fl", flat))
            for m in Model
        }
        pairs = [(("nd", Model.TTPB), ("nd", Model.TTP0)), (("nd", Model.TTPC), ("nd", Model.TTPA)),
                 (("fl", Model.TTPA), ("fl", Model.TTP0)), (("fl", Model.TTPC), ("fl", Model.TTPB))]
        for a, b in pairs:
            assert len(arrays[a]) == 46080
            bad += arrays[a].tobytes() != arrays[b].tobytes()
        for _, s in enumerate_solutions(roomy):
            checked += 1
            bad += fitness(no_drop, s, Model.TTPB) != fitness(no_drop, s, Model.TTP0)
            bad += fitness(no_drop, s, Model.TTPC) != fitness(no_drop, s, Model.TTPA)
            bad += fitness(flat, s, Model.TTPA) != fitness(flat, s, Model.TTP0)
            bad += fitness(flat, s, Model.TTPC) != fitness(flat, s, Model.TTPB)
    report(4, "model-coincidence identities", bad == 0 and checked == 3 * 46080,
           f"{checked} solutions x 4 identities bit-exact (scalar and vectorised), {bad} mismatches")


def test_c05_capacity_trend():
    start = time.perf_counter()
    rep = run_experiment(ExperimentConfig(models=(Model.TTPA,), correlations=("u",), drop_rates=(),
                                          instances_per_class=30))
    elapsed = time.perf_counter() - start
    nv = [s.mean["n_v"] for s in rep.summaries]
    b = [s.mean["B_mean"] for s in rep.summaries]
    ok = nv[0] > nv[1] > nv[2] and b[0] < b[1] < b[2] and elapsed <= 1200
    report(5, "capacity trend (TTPA, u)", ok,
           "n_v " + " > ".join(f"{v:.1f}" for v in nv) + ", |B| " + " < ".join(f"{v:.1f}" for v in b)
           + f" over C=2,5,10; {elapsed:.0f}s (limit 1200s)")


@pytest.fixture(scope="module")
def full_run():
    return run_experiment(ExperimentConfig(instances_per_class=20))


def test_c06_correlation_ordering(full_run):
    rho = {m: v[0] for m, v in full_run.model_rho.items()}
    others = [rho[m] for m in Model if m is not Model.TTP0]
    ok = all(r > 0 for r in rho.values()) and rho[Model.TTP0] < min(others)
    report(6, "correlation ordering", ok,
           ", ".join(f"rho({m.value})={rho[m]:.3f}" for m in Model)
           + " (20 per class, seed 0; TTP0 must be strictly smallest)")


def test_c07_small_world(full_run):
    rows = [r for r in full_run.instances
            if r.key.model is Model.TTPA and r.key.capacity_class in (2, 5)]
    hits = sum(r.record.C >= r.record.C_r for r in rows)
    share = hits / len(rows)
    ls = [s.mean["l"] for s in full_run.summaries]
    ok = share >= 0.95 and all(1 <= v <= 3 for v in ls)
    report(7, "small-world direction", ok,
           f"C >= C_r on {hits}/{len(rows)} TTPA instances at C in {{2,5}} ({share:.0%}); "
           f"class mean l in [{min(ls):.2f}, {max(ls):.2f}]")


def test_c08_determinism(tmp_path):
    dirs = []
    for workers in (1, 8):
        rep = run_experiment(ExperimentConfig(instances_per_class=2, workers=workers))
        out = tmp_path / f"w{workers}"
        write_report(rep, out)
        dirs.append(out)
    names = sorted(p.name for p in dirs[0].iterdir())
    match, mismatch, errors = filecmp.cmpfiles(dirs[0], dirs[1], names, shallow=False)
    ok = not mismatch and not errors and len(match) == 4
    report(8, "determinism", ok, f"{len(match)}/{len(names)} CSV files byte-identical for workers 1 vs 8")


def test_c09_performance():
    # room for every plan, so all 46080 solutions are starts
    base = generate_instance(GeneratorConfig("u", 10, seed=9))
    inst = base.replace(capacity=math.fsum(base.weights))
    previous = backend.kernels.NAME
    timings = {}
    try:
        for name in ("cython", "numpy"):
            if name == "cython" and backend.compiled() is None:
                continue
            backend.use(name)
            start = time.perf_counter()
            lon = extract_lon(inst, Model.TTPA)
            metrics(lon)
            timings[name] = time.perf_counter() - start
    finally:
        backend.use(previous)
    ok = lon.space_size == 46080 and all(t <= 60 for t in timings.values())
    report(9, "performance budget", ok,
           ", ".join(f"{k} {v:.2f}s" for k, v in timings.items())
           + f" for {lon.space_size} starts (limit 60s)")


def test_c10_statistics_kernels():
    trivial = [
        spearman([1, 2, 3, 4], [2, 4, 6, 8]).rho == 1.0,
        spearman([1, 2, 3, 4], [8, 6, 4, 2]).rho == -1.0,
        spearman([1, 2, 2, 4], [10, 20, 20, 40]).rho == 1.0,
        fisher_mean([0.5, 0.5, 0.5]) == pytest.approx(0.5, abs=1e-15),
        fisher_mean([0.4, -0.4]) == 0.0,
    ]
    import mpmath

    mpmath.mp.dps = 50
    exact = mpmath.tanh((mpmath.atanh(mpmath.mpf("0.2")) + mpmath.atanh(mpmath.mpf("0.8"))) / 2)
    err = abs(mpmath.mpf(fisher_mean([0.2, 0.8])) - exact)
    ok = all(trivial) and err <= 1e-12
    report(10, "statistics kernels", ok,
           f"{sum(trivial)}/{len(trivial)} exact cases, fisher_mean(0.2, 0.8) error {float(err):.1e} (limit 1e-12)")
