"""Per-LON graph statistics: node/edge counts, clustering, path length, basin size."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.sparse.csgraph import connected_components
from scipy.sparse import csr_matrix

from . import backend
from .lon import Lon

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph in CSR form (both directions stored, sorted)."""

    n_nodes: int
    indptr: np.ndarray  # int32
    indices: np.ndarray  # int32

    @classmethod
    def from_edges(cls, n_nodes: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        pairs = np.array([(u, v) for u, v in edges if u != v], dtype=np.int64).reshape(-1, 2)
        return cls.from_arrays(n_nodes, pairs[:, 0], pairs[:, 1])

    @classmethod
    def from_arrays(cls, n_nodes: int, lo: np.ndarray, hi: np.ndarray) -> "Graph":
        src = np.concatenate([lo, hi]).astype(np.int64)
        dst = np.concatenate([hi, lo]).astype(np.int64)
        key = np.unique(src * max(n_nodes, 1) + dst)
        src, dst = key // max(n_nodes, 1), key % max(n_nodes, 1)
        indptr = np.zeros(n_nodes + 1, dtype=np.int32)
        np.add.at(indptr, src + 1, 1)
        return cls(n_nodes, np.cumsum(indptr, dtype=np.int32), dst.astype(np.int32))

    @property
    def n_edges(self) -> int:
        return len(self.indices) // 2

    def degree(self) -> np.ndarray:
        return np.diff(self.indptr)


@dataclass(frozen=True)
class PathLength:
    value: float
    defined: bool  # False when no pair of nodes is connected
    n_components: int


@dataclass(frozen=True)
class MetricsRecord:
    n_v: int
    n_e: int
    C: float
    C_r: float
    l: float
    B_mean: float
    l_defined: bool = True
    n_components: int = 1


def clustering_coefficient(graph: Graph) -> float:
    """Mean local clustering; nodes of degree below 2 count as 0."""
    if graph.n_nodes == 0:
        return 0.0
    local = backend.kernels.clustering(graph.indptr, graph.indices, graph.n_nodes)
    return float(np.mean(local))


def er_clustering(n_v: int, n_e: int) -> float:
    """Expected clustering of a random graph with the same node and edge counts."""
    if n_v < 1:
        raise ValueError("n_v must be positive")
    if n_v < 2:
        return 0.0
    return 2.0 * n_e / (n_v * (n_v - 1))


def components(graph: Graph) -> int:
    if graph.n_nodes == 0:
        return 0
    adj = csr_matrix(
        (np.ones(len(graph.indices)), graph.indices, graph.indptr),
        shape=(graph.n_nodes, graph.n_nodes),
    )
    return int(connected_components(adj, directed=False)[0])


def avg_path_length(graph: Graph) -> PathLength:
    """Mean shortest-path length over connected pairs; other pairs are ignored."""
    n_comp = components(graph)
    total, pairs = backend.kernels.bfs_distance_sum(graph.indptr, graph.indices, graph.n_nodes)
    if pairs == 0:
        log.info("path length undefined: no connected pair among %d nodes", graph.n_nodes)
        return PathLength(0.0, False, n_comp)
    return PathLength(total / pairs, True, n_comp)


def lon_graph(lon: Lon) -> Graph:
    return Graph.from_arrays(lon.n_nodes, lon.edge_lo, lon.edge_hi)


def metrics(lon: Lon) -> MetricsRecord:
    graph = lon_graph(lon)
    path = avg_path_length(graph)
    return MetricsRecord(
        n_v=lon.n_nodes,
        n_e=graph.n_edges,
        C=clustering_coefficient(graph),
        C_r=er_clustering(lon.n_nodes, graph.n_edges),
        l=path.value,
        B_mean=lon.space_size / lon.n_nodes,
        l_defined=path.defined,
        n_components=path.n_components,
    )
