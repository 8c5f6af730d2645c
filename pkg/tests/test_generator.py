import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ttplon.generator import (
    DegenerateInstanceError,
    GeneratorConfig,
    ParseError,
    compute_capacity,
    compute_renting_rate,
    format_instance,
    generate_instance,
    generate_items,
    parse_instance,
    read_instance,
    write_instance,
)
from ttplon.model import Model
from ttplon.space import SpaceTooLargeError

from conftest import make_instance


def test_capacity_examples():
    w = [10, 20, 30, 50]
    assert compute_capacity(w, 2) == 20
    assert compute_capacity(w, 10) == 100
    with pytest.raises(ValueError):
        compute_capacity(w, 11)
    with pytest.raises(ValueError):
        compute_capacity([], 2)


@pytest.mark.parametrize("seed", range(5))
def test_item_classes(seed):
    rng = np.random.default_rng(seed)
    p, w = generate_items("bsc", 50, rng)
    assert all(pk - wk == 100 for pk, wk in zip(p, w))
    p, w = generate_items("usw", 50, rng)
    assert max(w) - min(w) <= 10
    assert all(1 <= x <= 1000 for x in p)
    p, w = generate_items("u", 50, rng)
    assert all(1 <= x <= 1000 for x in p + w)
    assert all(float(x).is_integer() for x in p + w)


def test_items_deterministic():
    a = generate_items("u", 6, np.random.default_rng(3))
    b = generate_items("u", 6, np.random.default_rng(3))
    assert a == b


def test_single_heavy_item_is_degenerate():
    inst = make_instance([(0, 0), (5, 0)], [10], [50], 40, item_city=[1], renting_rate=0)
    with pytest.raises(DegenerateInstanceError):
        compute_renting_rate(inst, Model.TTPA)


def test_renting_rate_ignores_model_when_speed_is_constant():
    base = generate_instance(GeneratorConfig("u", 5, seed=2))
    flat = base.replace(v_min=base.v_max)
    values = {compute_renting_rate(flat, m) for m in Model}
    assert len(values) == 1


def _oracle_rate(inst, load_dependent):
    """Double brute force written without the package's search helpers."""
    best_value, best_plan = -1.0, None
    for plan in itertools.product((0, 1), repeat=inst.m):
        if sum(w * b for w, b in zip(inst.weights, plan)) > inst.capacity:
            continue
        value = sum(p * b for p, b in zip(inst.profits, plan))
        if value > best_value:
            best_value, best_plan = value, plan
    best_len, best_tour = math.inf, None
    for perm in itertools.permutations(range(1, inst.n)):
        tour = (0, *perm)
        length = sum(inst.dist[tour[i]][tour[(i + 1) % inst.n]] for i in range(inst.n))
        if length < best_len:
            best_len, best_tour = length, tour
    t, load = 0.0, 0.0
    for i, city in enumerate(best_tour):
        load += sum(inst.weights[k] for k in range(inst.m) if best_plan[k] and inst.item_city[k] == city)
        v = inst.v_max - (inst.v_max - inst.v_min) * load / inst.capacity if load_dependent else inst.v_max
        t += inst.dist[city][best_tour[(i + 1) % inst.n]] / v
    return best_value / t


@pytest.mark.parametrize(
    "model, pinned",
    [(Model.TTP0, 1.9515418502202644), (Model.TTPA, 1.3300940569274384)],
)
def test_renting_rate_toy_regression(model, pinned):
    inst = generate_instance(GeneratorConfig("u", 5, n_cities=4, n_items=3, seed=7, model=model))
    assert inst.renting_rate == pytest.approx(_oracle_rate(inst, model.load_dependent), rel=1e-12)
    assert inst.renting_rate == pinned


def test_renting_rate_size_guard():
    inst = make_instance([(i, i * i % 7) for i in range(12)], [1] * 11, [1] * 11, 5)
    with pytest.raises(SpaceTooLargeError):
        compute_renting_rate(inst, Model.TTP0)


def test_generate_is_deterministic():
    cfg = GeneratorConfig("bsc", 10, 0.95, seed=(4, 2), model=Model.TTPC)
    assert generate_instance(cfg) == generate_instance(cfg)


def test_item_layout_one_per_city():
    inst = generate_instance(GeneratorConfig("u", 2, seed=1))
    assert inst.item_city == (1, 2, 3, 4, 5, 6)


def test_shared_coords_fix_the_tsp_component():
    coords = ((0, 0), (10, 3), (40, 40), (7, 90), (66, 12), (50, 50), (99, 1))
    insts = [
        generate_instance(GeneratorConfig(c, k, seed=s, shared_coords=coords))
        for s in range(4)
        for c in ("u", "usw", "bsc")
        for k in (2, 5, 10)
    ]
    assert len({i.dist for i in insts}) == 1
    assert len({i.weights for i in insts}) > 1


def test_published_domain_guards():
    with pytest.raises(ValueError):
        GeneratorConfig("u", 4)
    with pytest.raises(ValueError):
        GeneratorConfig("u", 2, 0.5)
    with pytest.raises(ValueError):
        GeneratorConfig("u", 2, n_items=3)
    GeneratorConfig("u", 4, 0.5, n_items=3, non_paper=True)


@settings(max_examples=25, deadline=None)
@given(
    corr=st.sampled_from(("u", "usw", "bsc")),
    cap=st.sampled_from((2, 5, 10)),
    drop=st.sampled_from((None, 0.9, 0.95, 0.98)),
    seed=st.integers(0, 2**31),
)
def test_file_round_trip(tmp_path_factory, corr, cap, drop, seed):
    inst = generate_instance(GeneratorConfig(corr, cap, drop, seed=seed))
    path = tmp_path_factory.mktemp("rt") / "a.ttp"
    write_instance(inst, path)
    back = read_instance(path)
    assert back == inst
    assert back.knapsack_type == corr
    assert format_instance(back) == format_instance(inst)


def test_missing_drop_rate_means_no_drop():
    inst = generate_instance(GeneratorConfig("u", 2, seed=1))
    text = format_instance(inst)
    assert "DROPPING RATE" not in text
    assert parse_instance(text).drop_rate == 1.0


def test_missing_item_section():
    text = format_instance(generate_instance(GeneratorConfig("u", 2, seed=1)))
    head = text.split("ITEMS SECTION")[0]
    with pytest.raises(ParseError):
        parse_instance(head)


def test_parse_errors_name_the_line():
    text = format_instance(generate_instance(GeneratorConfig("u", 2, seed=1)))
    lines = text.splitlines()
    bad = [i for i, l in enumerate(lines) if l.startswith("3 ")][-1]
    lines[bad] = "3 abc 10 4"
    with pytest.raises(ParseError) as err:
        parse_instance("\n".join(lines))
    assert err.value.line == bad + 1
    lines = text.splitlines()
    lines[0] = "garbage"
    with pytest.raises(ParseError) as err:
        parse_instance("\n".join(lines))
    assert err.value.line == 1


def test_item_count_mismatch():
    text = format_instance(generate_instance(GeneratorConfig("u", 2, seed=1)))
    text = text.replace("NUMBER OF ITEMS: 6", "NUMBER OF ITEMS: 7")
    with pytest.raises(ParseError):
        parse_instance(text)
