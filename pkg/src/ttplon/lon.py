"""Exact Local Optima Network extraction by exhaustive enumeration."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import backend
from .model import Instance, Model, Solution
from .search import Policy
from .space import SpaceTables, build_tables, decode


@dataclass(frozen=True)
class LonNode:
    index: int  # solution index of the optimum
    solution: Solution
    fitness: float
    basin_size: int


@dataclass(eq=False)
class Lon:
    """Local optima, their basins, and basin adjacency.

    ``basin_of[i]`` is the node id of solution index ``i`` (-1 when the plan
    is infeasible). Edges are unordered ``(lo, hi)`` node pairs with
    ``lo < hi``, sorted; ``edge_count[e]`` is the number of ordered
    neighbour pairs crossing between the two basins.
    """

    nodes: tuple[LonNode, ...]
    edge_lo: np.ndarray
    edge_hi: np.ndarray
    edge_count: np.ndarray
    basin_of: np.ndarray
    space_size: int

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.edge_lo)

    @property
    def edges(self) -> set[tuple[int, int]]:
        return set(zip(self.edge_lo.tolist(), self.edge_hi.tolist()))

    @property
    def fitnesses(self) -> np.ndarray:
        return np.array([nd.fitness for nd in self.nodes])

    @property
    def basin_sizes(self) -> np.ndarray:
        return np.array([nd.basin_size for nd in self.nodes], dtype=np.int64)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Lon):
            return NotImplemented
        return (
            self.nodes == other.nodes
            and self.space_size == other.space_size
            and np.array_equal(self.edge_lo, other.edge_lo)
            and np.array_equal(self.edge_hi, other.edge_hi)
            and np.array_equal(self.edge_count, other.edge_count)
            and np.array_equal(self.basin_of, other.basin_of)
        )


def enumerate_solutions(inst: Instance) -> Iterator[tuple[int, Solution]]:
    """Every feasible solution in ascending index order."""
    tables = build_tables(inst)
    feasible = np.flatnonzero(tables.plan_ok)
    for t in range(tables.n_tours):
        for z in feasible:
            index = (t << inst.m) | int(z)
            yield index, decode(index, inst.n, inst.m)


def evaluate_space(inst: Instance, model: Model, tables: SpaceTables | None = None) -> np.ndarray:
    """Fitness of every solution index (NaN for infeasible plans)."""
    tables = tables or build_tables(inst)
    return backend.kernels.evaluate_space(
        tables.tours,
        tables.plan_ok,
        np.ascontiguousarray(inst.dist_array),
        np.asarray(inst.weights, dtype=np.float64),
        np.asarray(inst.profits, dtype=np.float64),
        np.asarray(inst.item_city, dtype=np.int64),
        float(inst.capacity),
        float(inst.v_max),
        float(inst.v_min),
        float(inst.renting_rate),
        float(inst.drop_rate),
        float(inst.drop_interval),
        model.load_dependent,
        model.value_drops,
    )


def _chunks(size: int, workers: int) -> list[tuple[int, int]]:
    step = -(-size // workers)
    return [(lo, min(size, lo + step)) for lo in range(0, size, step)]


def _call(name: str, *args):
    return getattr(backend.kernels, name)(*args)


def _run_chunked(name: str, args: tuple, size: int, workers: int) -> list:
    if workers <= 1:
        return [_call(name, *args, 0, size)]
    bounds = _chunks(size, workers)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_call, name, *args, lo, hi) for lo, hi in bounds]
        return [f.result() for f in futures]


def extract_lon(
    inst: Instance,
    model: Model,
    policy: Policy = Policy.STRICT,
    workers: int = 1,
) -> Lon:
    tables = build_tables(inst)
    fit = evaluate_space(inst, model, tables)
    with_ids = policy is Policy.IDENTITIES
    m = inst.m

    parts = _run_chunked(
        "sweep_next", (fit, tables.plan_ok, tables.tsp_table, m, with_ids), tables.size, workers
    )
    nxt = np.concatenate(parts).astype(np.int64)
    optimum = backend.kernels.resolve_optima(nxt)

    feasible = optimum >= 0
    optima, inverse, sizes = np.unique(
        optimum[feasible], return_inverse=True, return_counts=True
    )
    basin_of = np.full(tables.size, -1, dtype=np.int64)
    basin_of[feasible] = inverse
    nodes = tuple(
        LonNode(int(i), decode(int(i), inst.n, m), float(fit[i]), int(c))
        for i, c in zip(optima, sizes)
    )

    parts = _run_chunked(
        "edge_pairs", (basin_of, tables.plan_ok, tables.tsp_table, m, with_ids),
        tables.size, workers,
    )
    lo, hi, count = _merge_edges(parts, len(nodes))
    return Lon(nodes, lo, hi, count, basin_of, int(feasible.sum()))


def _merge_edges(parts: list, n_nodes: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if len(parts) == 1:
        lo, hi, count = parts[0]
        return lo.astype(np.int64), hi.astype(np.int64), count.astype(np.int64)
    keys = np.concatenate([p[0] * n_nodes + p[1] for p in parts])
    counts = np.concatenate([p[2] for p in parts])
    uniq, inverse = np.unique(keys, return_inverse=True)
    total = np.bincount(inverse, weights=counts, minlength=len(uniq)).astype(np.int64)
    return uniq // max(n_nodes, 1), uniq % max(n_nodes, 1), total
