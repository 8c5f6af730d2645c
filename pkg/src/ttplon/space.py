"""Dense indexing of the solution space.

A solution index is ``tour_rank * 2**m + plan_bits`` where ``tour_rank`` is
the lexicographic rank of the tour's free positions (factorial number
system) and bit ``k`` of ``plan_bits`` is item ``k``'s picking status.
Ascending index order therefore walks tours lexicographically and, within
a tour, plans as ascending integers.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .model import Instance, Solution

MAX_SPACE = 10**7


class SpaceTooLargeError(ValueError):
    """The solution space is too large for exhaustive enumeration."""


def space_size(n: int, m: int) -> int:
    return math.factorial(n - 1) * 2**m


def check_enumerable(n: int, m: int) -> None:
    size = space_size(n, m)
    if size > MAX_SPACE:
        raise SpaceTooLargeError(
            f"(n-1)! * 2^m = {size} exceeds the enumeration bound {MAX_SPACE}"
        )


def tour_rank(tour: Sequence[int]) -> int:
    free = list(tour[1:])
    rank = 0
    remaining = sorted(free)
    for pos, city in enumerate(free):
        i = remaining.index(city)
        rank += i * math.factorial(len(free) - 1 - pos)
        remaining.pop(i)
    return rank


def tour_unrank(rank: int, n: int) -> tuple[int, ...]:
    remaining = list(range(1, n))
    tour = [0]
    for pos in range(n - 1):
        f = math.factorial(n - 2 - pos)
        i, rank = divmod(rank, f)
        tour.append(remaining.pop(i))
    return tuple(tour)


def plan_to_bits(plan: Sequence[int]) -> int:
    return sum(1 << k for k, b in enumerate(plan) if b)


def bits_to_plan(bits: int, m: int) -> tuple[int, ...]:
    return tuple((bits >> k) & 1 for k in range(m))


def encode(s: Solution) -> int:
    return (tour_rank(s.tour) << len(s.plan)) | plan_to_bits(s.plan)


def decode(index: int, n: int, m: int) -> Solution:
    return Solution(tour_unrank(index >> m, n), bits_to_plan(index & ((1 << m) - 1), m))


def two_opt_pairs(n: int) -> list[tuple[int, int]]:
    """Segment bounds (i, j), 1 <= i < j <= n-1, in lexicographic order."""
    return [(i, j) for i in range(1, n) for j in range(i + 1, n)]


def two_opt(tour: Sequence[int], i: int, j: int) -> tuple[int, ...]:
    t = list(tour)
    t[i : j + 1] = t[i : j + 1][::-1]
    return tuple(t)


@dataclass(frozen=True)
class SpaceTables:
    """Precomputed arrays describing one instance's enumerable space."""

    n: int
    m: int
    tours: np.ndarray  # (n_tours, n) int64, row r is tour_unrank(r)
    tsp_table: np.ndarray  # (n_tours, 1 + n_moves) int64, column 0 is the tour itself
    plan_ok: np.ndarray  # (2**m,) uint8, plan feasibility

    @property
    def n_tours(self) -> int:
        return self.tours.shape[0]

    @property
    def size(self) -> int:
        return self.n_tours << self.m

    @cached_property
    def feasible_count(self) -> int:
        return self.n_tours * int(self.plan_ok.sum())


def build_tables(inst: Instance) -> SpaceTables:
    n, m = inst.n, inst.m
    check_enumerable(n, m)
    # itertools.permutations of a sorted list yields lexicographic order, so row r has rank r.
    tours = np.array(
        [(0, *p) for p in itertools.permutations(range(1, n))], dtype=np.int64
    ).reshape(-1, n)
    weights = np.asarray(inst.weights, dtype=np.float64)
    bits = (np.arange(1 << m)[:, None] >> np.arange(m)[None, :]) & 1
    load = np.zeros(1 << m)
    for k in range(m):
        load = load + weights[k] * bits[:, k]
    plan_ok = (load <= inst.capacity).astype(np.uint8)

    pairs = two_opt_pairs(n)
    table = np.empty((tours.shape[0], 1 + len(pairs)), dtype=np.int64)
    table[:, 0] = np.arange(tours.shape[0])
    if pairs:
        weights_rank = _rank_weights(n)
        for col, (i, j) in enumerate(pairs, start=1):
            moved = tours.copy()
            moved[:, i : j + 1] = tours[:, i : j + 1][:, ::-1]
            table[:, col] = _rank_rows(moved, weights_rank)
    return SpaceTables(n, m, tours, table, plan_ok)


def _rank_weights(n: int) -> np.ndarray:
    return np.array([math.factorial(n - 2 - pos) for pos in range(n - 1)], dtype=np.int64)


def _rank_rows(tours: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Vectorised tour_rank over the rows of ``tours``."""
    free = tours[:, 1:]
    # Lehmer digit at position p: how many later entries are smaller.
    smaller = (free[:, :, None] > free[:, None, :]) & np.triu(
        np.ones((free.shape[1], free.shape[1]), dtype=bool), k=1
    )
    digits = smaller.sum(axis=2)
    return digits @ weights
