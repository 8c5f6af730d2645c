"""Problem data types and exact objective evaluators for the four TTP models.

Cities and items are 0-based throughout the library; city 0 is the fixed
start. The instance file format in :mod:`ttplon.generator` is 1-based.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Sequence

import numpy as np


class FeasibilityError(ValueError):
    """A picking plan exceeds the knapsack capacity."""


class Model(enum.Enum):
    TTP0 = "ttp0"
    TTPA = "ttpa"
    TTPB = "ttpb"
    TTPC = "ttpc"

    @property
    def load_dependent(self) -> bool:
        """Travel time depends on the knapsack load (velocity coupling)."""
        return self in (Model.TTPA, Model.TTPC)

    @property
    def value_drops(self) -> bool:
        """Item value decays with carrying time."""
        return self in (Model.TTPB, Model.TTPC)

    @classmethod
    def parse(cls, text: str) -> "Model":
        return cls(text.strip().lower())


@dataclass(frozen=True)
class Instance:
    """A TTP instance. Sequences are stored as tuples so instances hash and compare."""

    coords: tuple[tuple[float, float], ...]
    dist: tuple[tuple[float, ...], ...]
    profits: tuple[float, ...]
    weights: tuple[float, ...]
    item_city: tuple[int, ...]
    capacity: float
    v_max: float = 1.0
    v_min: float = 0.1
    renting_rate: float = 0.0
    drop_rate: float = 1.0
    drop_interval: float = 10.0
    name: str = field(default="", compare=False)
    knapsack_type: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        n = len(self.coords)
        m = len(self.profits)
        if n < 2:
            raise ValueError("an instance needs at least two cities")
        if m < 1:
            raise ValueError("an instance needs at least one item")
        if len(self.dist) != n or any(len(row) != n for row in self.dist):
            raise ValueError("distance matrix must be n x n")
        if len(self.weights) != m or len(self.item_city) != m:
            raise ValueError("profits, weights and item_city must have equal length")
        for i in range(n):
            if self.dist[i][i] != 0:
                raise ValueError("distance matrix must have a zero diagonal")
            for j in range(i + 1, n):
                if self.dist[i][j] != self.dist[j][i] or self.dist[i][j] < 0:
                    raise ValueError("distance matrix must be symmetric and non-negative")
        if any(not 1 <= a < n for a in self.item_city):
            raise ValueError("items cannot be placed at the start city")
        if any(p <= 0 for p in self.profits) or any(w <= 0 for w in self.weights):
            raise ValueError("profits and weights must be positive")
        if self.capacity <= 0:
            raise ValueError("capacity must be positive")
        if not self.v_max >= self.v_min > 0:
            raise ValueError("velocities must satisfy v_max >= v_min > 0")
        if self.renting_rate < 0:
            raise ValueError("renting rate must be non-negative")
        if not 0 < self.drop_rate <= 1:
            raise ValueError("drop rate must lie in (0, 1]")
        if self.drop_interval <= 0:
            raise ValueError("drop interval must be positive")

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def m(self) -> int:
        return len(self.profits)

    @cached_property
    def dist_array(self) -> np.ndarray:
        return np.array(self.dist, dtype=np.float64)

    @cached_property
    def items_at(self) -> tuple[tuple[int, ...], ...]:
        """Item indices located at each city, ascending."""
        buckets: list[list[int]] = [[] for _ in range(self.n)]
        for k, a in enumerate(self.item_city):
            buckets[a].append(k)
        return tuple(tuple(b) for b in buckets)

    def replace(self, **changes) -> "Instance":
        return replace(self, **changes)


@dataclass(frozen=True)
class Solution:
    tour: tuple[int, ...]
    plan: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.tour or self.tour[0] != 0:
            raise ValueError("tour must start at city 0")
        if sorted(self.tour) != list(range(len(self.tour))):
            raise ValueError("tour must be a permutation of the cities")
        if any(b not in (0, 1) for b in self.plan):
            raise ValueError("plan must be binary")

    @classmethod
    def of(cls, tour: Sequence[int], plan: Sequence[int]) -> "Solution":
        return cls(tuple(int(c) for c in tour), tuple(int(b) for b in plan))


@dataclass(frozen=True)
class Trajectory:
    leg_times: tuple[float, ...]
    load_at: tuple[float, ...]
    total_time: float
    carry_time: tuple[float, ...]


def plan_weight(inst: Instance, plan: Sequence[int]) -> float:
    total = 0.0
    for k, picked in enumerate(plan):
        if picked:
            total += inst.weights[k]
    return total


def is_feasible(inst: Instance, plan: Sequence[int]) -> bool:
    if len(plan) != inst.m:
        raise ValueError(f"plan has {len(plan)} bits, instance has {inst.m} items")
    return plan_weight(inst, plan) <= inst.capacity


def _check_feasible(inst: Instance, plan: Sequence[int]) -> None:
    if not is_feasible(inst, plan):
        raise FeasibilityError(
            f"plan weight {plan_weight(inst, plan)} exceeds capacity {inst.capacity}"
        )


def velocity_at(load: float, inst: Instance) -> float:
    """Thief velocity when carrying ``load``; linear from v_max (empty) to v_min (full)."""
    if load < 0 or load > inst.capacity:
        raise ValueError(f"load {load} outside [0, {inst.capacity}]")
    return _velocity(inst, load)


def _velocity(inst: Instance, load: float) -> float:
    # Kernels in _fallback and _kernels repeat this exact expression; keep them in sync.
    return inst.v_max - ((inst.v_max - inst.v_min) / inst.capacity) * load


def simulate(inst: Instance, s: Solution, load_dependent: bool) -> Trajectory:
    """Walk the tour, picking items on arrival, and record times and loads.

    Each item's carrying time runs from arrival at its city to the return at
    city 0. With ``load_dependent`` false the thief always travels at v_max.
    """
    _check_feasible(inst, s.plan)
    n = inst.n
    tour = s.tour
    if len(tour) != n:
        raise ValueError("tour length does not match the instance")
    leg_times = []
    load_at = []
    arrival = [0.0] * n
    load = 0.0
    elapsed = 0.0
    for i in range(n):
        city = tour[i]
        arrival[i] = elapsed
        for k in inst.items_at[city]:
            if s.plan[k]:
                load = load + inst.weights[k]
        nxt = tour[(i + 1) % n]
        v = _velocity(inst, load) if load_dependent else inst.v_max
        t = inst.dist[city][nxt] / v
        leg_times.append(t)
        load_at.append(load)
        elapsed = elapsed + t
    total = elapsed
    position = {c: i for i, c in enumerate(tour)}
    carry = tuple(
        total - arrival[position[inst.item_city[k]]] if s.plan[k] else 0.0
        for k in range(inst.m)
    )
    return Trajectory(tuple(leg_times), tuple(load_at), total, carry)


def raw_value(inst: Instance, plan: Sequence[int]) -> float:
    _check_feasible(inst, plan)
    total = 0.0
    for k, picked in enumerate(plan):
        if picked:
            total = total + inst.profits[k]
    return total


def drop_factor(inst: Instance, carry_time: float) -> float:
    return inst.drop_rate ** math.ceil(carry_time / inst.drop_interval)


def dropped_value(inst: Instance, traj: Trajectory, plan: Sequence[int]) -> float:
    total = 0.0
    for k, picked in enumerate(plan):
        if picked:
            total = total + inst.profits[k] * drop_factor(inst, traj.carry_time[k])
    return total


def fitness(inst: Instance, s: Solution, model: Model) -> float:
    """Total gain of ``s`` under ``model`` (to be maximised)."""
    traj = simulate(inst, s, model.load_dependent)
    if model.value_drops:
        value = dropped_value(inst, traj, s.plan)
    else:
        value = raw_value(inst, s.plan)
    return value - inst.renting_rate * traj.total_time
