"""2-OPT and one-bit-flip neighbourhoods and the joint first-improvement search.

This is the reference (per-solution) implementation. Whole-space basin
mapping in :mod:`ttplon.lon` runs the same scan through the array kernels.
"""

from __future__ import annotations

import enum
from typing import Iterator, Sequence

from .model import Instance, Model, Solution, fitness, is_feasible
from .space import two_opt, two_opt_pairs


class Policy(enum.Enum):
    """Whether the joint neighbourhood also contains pure TSP and pure KP moves.

    ``STRICT`` is the literal nesting (every neighbour changes both the tour
    and the plan); ``IDENTITIES`` lets either component stay unchanged.
    """

    STRICT = "strict"
    IDENTITIES = "identities"

    @classmethod
    def parse(cls, text: str) -> "Policy":
        text = text.strip().lower()
        aliases = {"strict_composition": "strict", "with_identities": "identities"}
        return cls(aliases.get(text, text))


def tsp_neighbours(tour: Sequence[int]) -> list[tuple[int, ...]]:
    return [two_opt(tour, i, j) for i, j in two_opt_pairs(len(tour))]


def kp_neighbours(plan: Sequence[int], inst: Instance) -> list[tuple[int, ...]]:
    out = []
    for k in range(len(plan)):
        flipped = list(plan)
        flipped[k] ^= 1
        if is_feasible(inst, flipped):
            out.append(tuple(flipped))
    return out


def joint_neighbours(
    s: Solution, inst: Instance, policy: Policy = Policy.STRICT
) -> list[Solution]:
    return list(iter_joint_neighbours(s, inst, policy))


def iter_joint_neighbours(
    s: Solution, inst: Instance, policy: Policy = Policy.STRICT
) -> Iterator[Solution]:
    tours = tsp_neighbours(s.tour)
    plans = kp_neighbours(s.plan, inst)
    if policy is Policy.IDENTITIES:
        tours = [s.tour, *tours]
        plans = [s.plan, *plans]
    for x in tours:
        for z in plans:
            if x == s.tour and z == s.plan:
                continue
            yield Solution(x, z)


def local_search(
    inst: Instance,
    model: Model,
    start: Solution,
    policy: Policy = Policy.STRICT,
) -> Solution:
    """Joint-neighbourhood hill climber with strict first improvement.

    Each sweep scans the neighbourhood of the solution held at the start of
    the sweep; an improving neighbour replaces the incumbent immediately and
    later candidates are compared against it. Sweeps repeat until one
    accepts nothing.
    """
    current = start
    current_fit = fitness(inst, current, model)
    while True:
        incumbent, incumbent_fit = current, current_fit
        for cand in iter_joint_neighbours(current, inst, policy):
            f = fitness(inst, cand, model)
            if f > incumbent_fit:
                incumbent, incumbent_fit = cand, f
        if incumbent == current:
            return current
        current, current_fit = incumbent, incumbent_fit


def is_local_optimum(
    inst: Instance, model: Model, s: Solution, policy: Policy = Policy.STRICT
) -> bool:
    f = fitness(inst, s, model)
    return all(fitness(inst, c, model) <= f for c in iter_joint_neighbours(s, inst, policy))
