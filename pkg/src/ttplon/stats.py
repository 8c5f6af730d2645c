"""Fitness/basin correlations, per-class aggregation and the experiment runner."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.stats import rankdata

from .generator import (
    CAPACITY_CLASSES,
    CORRELATIONS,
    DROP_RATES,
    DegenerateInstanceError,
    GeneratorConfig,
    draw_coords,
    generate_instance,
)
from .graph import MetricsRecord, metrics
from .lon import extract_lon
from .model import Model
from .search import Policy

log = logging.getLogger(__name__)

RHO_CLAMP = 1 - 1e-6
MAX_ATTEMPTS = 100
METRIC_FIELDS = ("n_v", "n_e", "C", "C_r", "l", "B_mean")


class Correlation(NamedTuple):
    rho: float
    degenerate: bool  # one input was constant; rho is reported as 0


def spearman(fitness: Sequence[float], basin_sizes: Sequence[float]) -> Correlation:
    """Spearman's rho with average ranks for ties."""
    x = np.asarray(fitness, dtype=np.float64)
    y = np.asarray(basin_sizes, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("inputs must be 1-d sequences of equal length")
    if len(x) < 2:
        raise ValueError("need at least two observations")
    rx = rankdata(x) - (len(x) + 1) / 2
    ry = rankdata(y) - (len(y) + 1) / 2
    sxx = float(np.dot(rx, rx))
    syy = float(np.dot(ry, ry))
    if sxx == 0 or syy == 0:
        return Correlation(0.0, True)
    rho = float(np.dot(rx, ry)) / math.sqrt(sxx * syy)
    return Correlation(min(1.0, max(-1.0, rho)), False)


def fisher_mean(rhos: Sequence[float]) -> float:
    """Average correlations in Fisher z space: tanh(mean(atanh(rho)))."""
    if len(rhos) == 0:
        raise ValueError("fisher_mean of an empty sequence")
    z = [math.atanh(min(RHO_CLAMP, max(-RHO_CLAMP, r))) for r in rhos]
    return math.tanh(math.fsum(z) / len(z))


@dataclass(frozen=True)
class ClassKey:
    model: Model
    correlation: str
    capacity_class: int
    drop_rate: float | None = None

    def __post_init__(self) -> None:
        if (self.drop_rate is not None) != self.model.value_drops:
            raise ValueError("a drop rate is given exactly for the value-drop models")

    @property
    def label(self) -> str:
        parts = [self.model.value, self.correlation, str(self.capacity_class)]
        if self.drop_rate is not None:
            parts.append(repr(self.drop_rate))
        return "_".join(parts)


@dataclass(frozen=True)
class ClassSummary:
    key: ClassKey
    count: int
    mean: dict[str, float]
    std: dict[str, float]
    rho_fisher: float  # NaN when every instance was degenerate
    n_degenerate: int
    std_defined: bool = True


def aggregate_class(
    records: Sequence[tuple[MetricsRecord, Correlation]], key: ClassKey | None = None
) -> ClassSummary:
    """Sample means and (n-1) standard deviations of every metric, plus Fisher-mean rho."""
    if not records:
        raise ValueError("cannot aggregate an empty class")
    count = len(records)
    mean, std = {}, {}
    for name in METRIC_FIELDS:
        values = [float(getattr(rec, name)) for rec, _ in records]
        mu = math.fsum(values) / count
        mean[name] = mu
        std[name] = (
            math.sqrt(math.fsum((v - mu) ** 2 for v in values) / (count - 1))
            if count > 1
            else 0.0
        )
    usable = [c.rho for _, c in records if not c.degenerate]
    return ClassSummary(
        key=key,
        count=count,
        mean=mean,
        std=std,
        rho_fisher=fisher_mean(usable) if usable else math.nan,
        n_degenerate=count - len(usable),
        std_defined=count > 1,
    )


# --- experiment ------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    models: tuple[Model, ...] = tuple(Model)
    correlations: tuple[str, ...] = CORRELATIONS
    capacity_classes: tuple[int, ...] = CAPACITY_CLASSES
    drop_rates: tuple[float, ...] = DROP_RATES
    instances_per_class: int = 100
    n_cities: int = 7
    n_items: int = 6
    seed: int = 0
    policy: Policy = Policy.STRICT
    workers: int = 1
    coord_box: float = 100
    v_max: float = 1.0
    v_min: float = 0.1
    scatter_all: bool = False  # node rows for every instance, not just the first per class
    non_paper: bool = False

    def __post_init__(self) -> None:
        if self.instances_per_class < 1:
            raise ValueError("instances_per_class must be positive")
        if self.non_paper:
            return
        if any(c not in CORRELATIONS for c in self.correlations):
            raise ValueError(f"correlations must be drawn from {CORRELATIONS}")
        if any(c not in CAPACITY_CLASSES for c in self.capacity_classes):
            raise ValueError(f"capacity classes must be drawn from {CAPACITY_CLASSES}")
        if any(d not in DROP_RATES for d in self.drop_rates):
            raise ValueError(f"drop rates must be drawn from {DROP_RATES}")
        if self.n_items != self.n_cities - 1:
            raise ValueError("the standard layout places exactly one item in each non-start city (or pass non_paper)")

    def class_keys(self) -> list[ClassKey]:
        keys = []
        for model in self.models:
            for corr in self.correlations:
                for cap in self.capacity_classes:
                    if model.value_drops:
                        keys += [ClassKey(model, corr, cap, d) for d in self.drop_rates]
                    else:
                        keys.append(ClassKey(model, corr, cap))
        return keys


@dataclass(frozen=True)
class InstanceResult:
    key: ClassKey
    index: int
    attempt: int
    space_size: int
    record: MetricsRecord
    correlation: Correlation
    node_fitness: tuple[float, ...] = ()
    node_basin: tuple[int, ...] = ()


@dataclass
class Report:
    config: ExperimentConfig
    summaries: list[ClassSummary]
    instances: list[InstanceResult]
    model_rho: dict[Model, tuple[float, int, int]]  # fisher mean, used, degenerate
    failures: list[tuple[ClassKey, int, str]] = field(default_factory=list)

    @property
    def complete(self) -> bool:
        want = self.config.instances_per_class
        return all(s.count == want for s in self.summaries) and len(self.summaries) == len(
            self.config.class_keys()
        )


def instance_seed(cfg: ExperimentConfig, key: ClassKey, index: int, attempt: int) -> tuple[int, ...]:
    """Seed words for one instance.

    Model and drop rate are deliberately absent so every model sees the same
    items for a given (correlation, capacity class, index).
    """
    return (cfg.seed, 1, CORRELATIONS.index(key.correlation), int(key.capacity_class), index, attempt)


def shared_coords(cfg: ExperimentConfig) -> tuple[tuple[float, float], ...]:
    return draw_coords(cfg.n_cities, cfg.coord_box, np.random.default_rng([cfg.seed, 0]))


def _run_one(task) -> InstanceResult | tuple[ClassKey, int, str]:
    cfg, key, index, coords, keep_nodes = task
    last_error = ""
    for attempt in range(MAX_ATTEMPTS):
        gen = GeneratorConfig(
            correlation=key.correlation,
            capacity_class=key.capacity_class,
            drop_rate=key.drop_rate,
            n_cities=cfg.n_cities,
            n_items=cfg.n_items,
            coord_box=cfg.coord_box,
            seed=instance_seed(cfg, key, index, attempt),
            shared_coords=coords,
            model=key.model,
            v_max=cfg.v_max,
            v_min=cfg.v_min,
            non_paper=cfg.non_paper,
        )
        try:
            inst = generate_instance(gen)
        except DegenerateInstanceError as exc:
            last_error = str(exc)
            log.warning("%s #%d attempt %d degenerate, regenerating", key.label, index, attempt)
            continue
        lon = extract_lon(inst, key.model, cfg.policy)
        rec = metrics(lon)
        fit, sizes = lon.fitnesses, lon.basin_sizes
        corr = spearman(fit, sizes) if lon.n_nodes >= 2 else Correlation(0.0, True)
        return InstanceResult(
            key, index, attempt, lon.space_size, rec, corr,
            tuple(fit.tolist()) if keep_nodes else (),
            tuple(sizes.tolist()) if keep_nodes else (),
        )
    return key, index, f"gave up after {MAX_ATTEMPTS} attempts: {last_error}"


def run_experiment(cfg: ExperimentConfig) -> Report:
    coords = shared_coords(cfg)
    keys = cfg.class_keys()
    tasks = [
        (cfg, key, i, coords, cfg.scatter_all or i == 0)
        for key in keys
        for i in range(cfg.instances_per_class)
    ]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            outcomes = list(pool.map(_run_one, tasks, chunksize=max(1, len(tasks) // (4 * cfg.workers))))
    else:
        outcomes = [_run_one(t) for t in tasks]

    results = [o for o in outcomes if isinstance(o, InstanceResult)]
    failures = [o for o in outcomes if not isinstance(o, InstanceResult)]
    for key, index, msg in failures:
        log.error("%s #%d failed: %s", key.label, index, msg)

    summaries = []
    for key in keys:
        rows = [r for r in results if r.key == key]
        if rows:
            summaries.append(aggregate_class([(r.record, r.correlation) for r in rows], key))

    model_rho = {}
    for model in cfg.models:
        rows = [r for r in results if r.key.model is model]
        usable = [r.correlation.rho for r in rows if not r.correlation.degenerate]
        rho = fisher_mean(usable) if usable else math.nan
        model_rho[model] = (rho, len(usable), len(rows) - len(usable))
    return Report(cfg, summaries, results, model_rho, failures)
