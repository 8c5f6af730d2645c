"""Instance generation across feature classes, and the ``.ttp`` text format."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .model import Instance, Model, Solution, raw_value, simulate
from .space import check_enumerable, tour_unrank

CORRELATIONS = ("u", "usw", "bsc")
CAPACITY_CLASSES = (2, 5, 10)
DROP_RATES = (0.9, 0.95, 0.98)


class DegenerateInstanceError(ValueError):
    """No item fits in the knapsack, so the renting rate is undefined."""


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class GeneratorConfig:
    """Parameters of one generated instance.

    ``model`` selects which travel-time rule enters the renting rate;
    ``drop_rate`` of None means no value drop (stored as 1.0).
    """

    correlation: str = "u"
    capacity_class: int = 2
    drop_rate: float | None = None
    n_cities: int = 7
    n_items: int = 6
    coord_box: float = 100
    seed: int | tuple[int, ...] = 0
    shared_coords: tuple[tuple[float, float], ...] | None = None
    model: Model = Model.TTPA
    v_max: float = 1.0
    v_min: float = 0.1
    drop_interval: float = 10.0
    non_paper: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        if self.correlation not in CORRELATIONS:
            raise ValueError(f"unknown correlation {self.correlation!r}")
        if self.n_cities < 2 or self.n_items < 1:
            raise ValueError("need at least 2 cities and 1 item")
        if self.shared_coords is not None and len(self.shared_coords) != self.n_cities:
            raise ValueError("shared_coords must hold one point per city")
        if self.non_paper:
            if not 0 < self.capacity_class < 11:
                raise ValueError("capacity class must lie in (0, 11)")
            if self.drop_rate is not None and not 0 < self.drop_rate <= 1:
                raise ValueError("drop rate must lie in (0, 1]")
            return
        if self.capacity_class not in CAPACITY_CLASSES:
            raise ValueError(f"capacity class must be one of {CAPACITY_CLASSES}")
        if self.drop_rate is not None and self.drop_rate not in DROP_RATES:
            raise ValueError(f"drop rate must be one of {DROP_RATES}")
        if self.n_items != self.n_cities - 1:
            raise ValueError("the standard layout places exactly one item in each non-start city (or pass non_paper)")


def compute_capacity(weights: Sequence[float], capacity_class: float) -> float:
    if len(weights) == 0:
        raise ValueError("weights must be non-empty")
    if capacity_class not in CAPACITY_CLASSES:
        raise ValueError(f"capacity class must be one of {CAPACITY_CLASSES}")
    return _capacity(weights, capacity_class)


def _capacity(weights: Sequence[float], capacity_class: float) -> float:
    return capacity_class * math.fsum(weights) / 11


def generate_items(
    correlation: str, m: int, rng: np.random.Generator
) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Profits and weights following the usual knapsack benchmark classes."""
    if m < 1:
        raise ValueError("m must be at least 1")
    if correlation == "u":
        weights = rng.integers(1, 1001, size=m)
        profits = rng.integers(1, 1001, size=m)
    elif correlation == "usw":
        weights = rng.integers(1000, 1011, size=m)
        profits = rng.integers(1, 1001, size=m)
    elif correlation == "bsc":
        weights = rng.integers(1, 1001, size=m)
        profits = weights + 100
    else:
        raise ValueError(f"unknown correlation {correlation!r}")
    return tuple(float(p) for p in profits), tuple(float(w) for w in weights)


def ceil2d(coords: Sequence[tuple[float, float]]) -> tuple[tuple[float, ...], ...]:
    return tuple(
        tuple(float(math.ceil(math.hypot(ax - bx, ay - by))) for bx, by in coords)
        for ax, ay in coords
    )


def draw_coords(n: int, box: float, rng: np.random.Generator) -> tuple[tuple[float, float], ...]:
    pts = rng.integers(0, int(box) + 1, size=(n, 2))
    return tuple((float(x), float(y)) for x, y in pts)


def optimal_plan(inst: Instance) -> tuple[int, ...]:
    """Feasible plan of maximal total profit; ties go to the lowest bit pattern."""
    best, best_value = None, -1.0
    for bits in range(1 << inst.m):
        plan = tuple((bits >> k) & 1 for k in range(inst.m))
        w = sum(inst.weights[k] for k in range(inst.m) if plan[k])
        if w > inst.capacity:
            continue
        value = raw_value(inst, plan)
        if value > best_value:
            best, best_value = plan, value
    return best


def optimal_tour(inst: Instance) -> tuple[int, ...]:
    """Tour of minimal constant-speed travel time; ties go to the lowest rank."""
    empty = (0,) * inst.m
    best, best_time = None, math.inf
    for rank in range(math.factorial(inst.n - 1)):
        tour = tour_unrank(rank, inst.n)
        t = simulate(inst, Solution(tour, empty), load_dependent=False).total_time
        if t < best_time:
            best, best_time = tour, t
    return best


def compute_renting_rate(inst: Instance, model: Model) -> float:
    """Best plan value divided by the travel time of best tour with that plan."""
    check_enumerable(inst.n, inst.m)
    plan = optimal_plan(inst)
    if plan is None or not any(plan):
        raise DegenerateInstanceError("no item fits in the knapsack")
    tour = optimal_tour(inst)
    time = simulate(inst, Solution(tour, plan), model.load_dependent).total_time
    return raw_value(inst, plan) / time


def generate_instance(cfg: GeneratorConfig) -> Instance:
    coord_seq, item_seq = np.random.SeedSequence(cfg.seed).spawn(2)
    if cfg.shared_coords is not None:
        coords = tuple((float(x), float(y)) for x, y in cfg.shared_coords)
    else:
        coords = draw_coords(cfg.n_cities, cfg.coord_box, np.random.default_rng(coord_seq))
    profits, weights = generate_items(cfg.correlation, cfg.n_items, np.random.default_rng(item_seq))
    item_city = tuple(k % (cfg.n_cities - 1) + 1 for k in range(cfg.n_items))
    capacity = _capacity(weights, cfg.capacity_class)
    drop = 1.0 if cfg.drop_rate is None else float(cfg.drop_rate)
    inst = Instance(
        coords=coords,
        dist=ceil2d(coords),
        profits=profits,
        weights=weights,
        item_city=item_city,
        capacity=capacity,
        v_max=cfg.v_max,
        v_min=cfg.v_min,
        drop_rate=drop,
        drop_interval=cfg.drop_interval,
        knapsack_type=cfg.correlation,
    )
    return inst.replace(renting_rate=compute_renting_rate(inst, cfg.model))


# --- file format -----------------------------------------------------------

_HEADER_KEYS = {
    "PROBLEM NAME": "name",
    "KNAPSACK DATA TYPE": "knapsack_type",
    "DIMENSION": "n",
    "NUMBER OF ITEMS": "m",
    "CAPACITY OF KNAPSACK": "capacity",
    "MIN SPEED": "v_min",
    "MAX SPEED": "v_max",
    "RENTING RATIO": "renting_rate",
    "DROPPING RATE": "drop_rate",
    "DROP INTERVAL": "drop_interval",
    "EDGE_WEIGHT_TYPE": "edge_weight_type",
}
_REQUIRED = ("n", "m", "capacity", "v_min", "v_max", "renting_rate")
_COORD_SECTION = "NODE_COORD_SECTION"
_ITEM_SECTION = "ITEMS SECTION"


def format_instance(inst: Instance) -> str:
    lines = [
        f"PROBLEM NAME: {inst.name or 'ttp'}",
        f"KNAPSACK DATA TYPE: {inst.knapsack_type or 'u'}",
        f"DIMENSION: {inst.n}",
        f"NUMBER OF ITEMS: {inst.m}",
        f"CAPACITY OF KNAPSACK: {inst.capacity!r}",
        f"MIN SPEED: {inst.v_min!r}",
        f"MAX SPEED: {inst.v_max!r}",
        f"RENTING RATIO: {inst.renting_rate!r}",
    ]
    if inst.drop_rate != 1.0:
        lines.append(f"DROPPING RATE: {inst.drop_rate!r}")
    if inst.drop_interval != 10.0:
        lines.append(f"DROP INTERVAL: {inst.drop_interval!r}")
    lines.append("EDGE_WEIGHT_TYPE: CEIL_2D")
    lines.append(f"{_COORD_SECTION} (INDEX, X, Y):")
    lines += [f"{i + 1} {x!r} {y!r}" for i, (x, y) in enumerate(inst.coords)]
    lines.append(f"{_ITEM_SECTION} (INDEX, PROFIT, WEIGHT, ASSIGNED NODE NUMBER):")
    lines += [
        f"{k + 1} {p!r} {w!r} {a + 1}"
        for k, (p, w, a) in enumerate(zip(inst.profits, inst.weights, inst.item_city))
    ]
    return "\n".join(lines) + "\n"


def write_instance(inst: Instance, path: str | Path) -> None:
    Path(path).write_text(format_instance(inst), encoding="utf-8")


def read_instance(path: str | Path) -> Instance:
    return parse_instance(Path(path).read_text(encoding="utf-8"))


def _number(text: str, lineno: int, kind=float):
    try:
        return kind(text)
    except ValueError:
        raise ParseError(f"expected a number, got {text!r}", lineno) from None


def parse_instance(text: str) -> Instance:
    header: dict[str, str] = {}
    coords: list[tuple[float, float]] = []
    items: list[tuple[float, float, int]] = []
    section = None
    seen_items = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith(_COORD_SECTION):
            section = "coords"
            continue
        if line.startswith(_ITEM_SECTION):
            section, seen_items = "items", True
            continue
        if section is None:
            key, sep, value = line.partition(":")
            if not sep or key.strip() not in _HEADER_KEYS:
                raise ParseError(f"malformed header line {line!r}", lineno)
            header[_HEADER_KEYS[key.strip()]] = value.strip()
            continue
        fields = line.split()
        if section == "coords":
            if len(fields) != 3:
                raise ParseError("coordinate lines need INDEX X Y", lineno)
            idx = _number(fields[0], lineno, int)
            if idx != len(coords) + 1:
                raise ParseError(f"expected city index {len(coords) + 1}, got {idx}", lineno)
            coords.append((_number(fields[1], lineno), _number(fields[2], lineno)))
        else:
            if len(fields) != 4:
                raise ParseError("item lines need INDEX PROFIT WEIGHT NODE", lineno)
            idx = _number(fields[0], lineno, int)
            if idx != len(items) + 1:
                raise ParseError(f"expected item index {len(items) + 1}, got {idx}", lineno)
            items.append(
                (
                    _number(fields[1], lineno),
                    _number(fields[2], lineno),
                    _number(fields[3], lineno, int) - 1,
                )
            )

    for key in _REQUIRED:
        if key not in header:
            raise ParseError(f"missing header field {key}")
    if not seen_items:
        raise ParseError(f"missing {_ITEM_SECTION}")
    ewt = header.get("edge_weight_type", "CEIL_2D")
    if ewt != "CEIL_2D":
        raise ParseError(f"unsupported EDGE_WEIGHT_TYPE {ewt!r}")
    n = _number(header["n"], None, int)
    m = _number(header["m"], None, int)
    if len(coords) != n:
        raise ParseError(f"DIMENSION is {n} but {len(coords)} coordinates were given")
    if len(items) != m:
        raise ParseError(f"NUMBER OF ITEMS is {m} but {len(items)} items were given")
    try:
        return Instance(
            coords=tuple(coords),
            dist=ceil2d(coords),
            profits=tuple(p for p, _, _ in items),
            weights=tuple(w for _, w, _ in items),
            item_city=tuple(a for _, _, a in items),
            capacity=_number(header["capacity"], None),
            v_max=_number(header["v_max"], None),
            v_min=_number(header["v_min"], None),
            renting_rate=_number(header["renting_rate"], None),
            drop_rate=_number(header.get("drop_rate", "1.0"), None),
            drop_interval=_number(header.get("drop_interval", "10"), None),
            name=header.get("name", ""),
            knapsack_type=header.get("knapsack_type", ""),
        )
    except ParseError:
        raise
    except ValueError as exc:
        raise ParseError(str(exc)) from None
