"""Pure numpy implementations of the hot kernels.

Used when the compiled ``_kernels`` extension is unavailable or when
``TTPLON_PURE=1`` is set. Every function here has a twin with the same
signature in ``_kernels.pyx``; both must return bit-identical arrays.
"""

from __future__ import annotations

import numpy as np

NAME = "numpy"


def evaluate_space(
    tours, plan_ok, dist, weights, profits, item_city,
    capacity, v_max, v_min, renting_rate, drop_rate, drop_interval,
    load_dependent, value_drops,
):
    """Fitness of every (tour, plan) pair; NaN where the plan is infeasible.

    Floating point operations follow ``model.simulate`` step for step so the
    results agree with the scalar evaluator to the last bit.
    """
    n_tours, n = tours.shape
    m = len(weights)
    n_plans = 1 << m
    bits = ((np.arange(n_plans)[:, None] >> np.arange(m)[None, :]) & 1).astype(bool)
    slope = (v_max - v_min) / capacity

    load = np.zeros((n_tours, n_plans))
    elapsed = np.zeros((n_tours, n_plans))
    arrival = np.zeros((m, n_tours, n_plans))
    for i in range(n):
        city = tours[:, i]
        nxt = tours[:, (i + 1) % n]
        for k in range(m):
            here = city == item_city[k]
            if not here.any():
                continue
            arrival[k][here] = elapsed[here]
            load[here] = load[here] + np.where(bits[:, k], weights[k], 0.0)
        d = dist[city, nxt][:, None]
        if load_dependent:
            leg = d / (v_max - slope * load)
        else:
            leg = d / v_max + np.zeros((1, n_plans))
        elapsed = elapsed + leg
    total = elapsed

    value = np.zeros((n_tours, n_plans))
    for k in range(m):
        if value_drops:
            steps = np.ceil((total - arrival[k]) / drop_interval)
            term = profits[k] * _powers(drop_rate, steps)
        else:
            term = np.full((n_tours, n_plans), profits[k])
        value = value + np.where(bits[:, k], term, 0.0)
    fit = value - renting_rate * total
    fit[:, plan_ok == 0] = np.nan
    return fit.reshape(-1)


def _powers(base, exponents):
    # Python's float ** goes through libm pow(); np.power may not, so map each distinct step count.
    uniq, inverse = np.unique(exponents, return_inverse=True)
    table = np.array([base ** float(e) for e in uniq])
    return table[inverse].reshape(exponents.shape)


def _moves(n_cols, m, with_identities):
    for a in range(0 if with_identities else 1, n_cols):
        for b in range(0 if with_identities else 1, m + 1):
            if a == 0 and b == 0:
                continue
            yield a, b


def sweep_next(fit, plan_ok, tsp_table, m, with_identities, start, stop):
    """Solution held after one first-improvement sweep from each index in [start, stop).

    Infeasible indices map to -1; local optima map to themselves.
    """
    idx = np.arange(start, stop, dtype=np.int64)
    mask = (1 << m) - 1
    tour = idx >> m
    plan = idx & mask
    feasible = plan_ok[plan].astype(bool)
    inc = idx.copy()
    inc_fit = fit[idx]
    for a, b in _moves(tsp_table.shape[1], m, with_identities):
        z2 = plan if b == 0 else plan ^ (1 << (b - 1))
        ok = feasible & plan_ok[z2].astype(bool)
        cand = (tsp_table[tour, a] << m) | z2
        f = np.where(ok, fit[np.where(ok, cand, idx)], np.nan)
        better = ok & (f > inc_fit)
        inc[better] = cand[better]
        inc_fit[better] = f[better]
    inc[~feasible] = -1
    return inc


def edge_pairs(basin, plan_ok, tsp_table, m, with_identities, start, stop):
    """Ordered (basin of s, basin of s') pairs for neighbours in different basins.

    Returns ``(lo, hi, count)`` arrays: unordered node pairs with ``lo < hi``
    sorted ascending, and the number of ordered neighbour pairs behind each.
    """
    idx = np.arange(start, stop, dtype=np.int64)
    mask = (1 << m) - 1
    tour = idx >> m
    plan = idx & mask
    src = basin[idx]
    feasible = src >= 0
    n_nodes = int(basin.max()) + 1 if basin.size else 0
    keys = []
    for a, b in _moves(tsp_table.shape[1], m, with_identities):
        z2 = plan if b == 0 else plan ^ (1 << (b - 1))
        ok = feasible & plan_ok[z2].astype(bool)
        cand = (tsp_table[tour[ok], a] << m) | z2[ok]
        s, t = src[ok], basin[cand]
        cross = s != t
        s, t = s[cross], t[cross]
        keys.append(np.minimum(s, t) * n_nodes + np.maximum(s, t))
    if not keys:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, empty
    uniq, counts = np.unique(np.concatenate(keys), return_counts=True)
    return uniq // max(n_nodes, 1), uniq % max(n_nodes, 1), counts.astype(np.int64)


def resolve_optima(nxt):
    """Follow sweep successors to their fixed points (pointer jumping)."""
    opt = nxt.copy()
    feasible = opt >= 0
    while True:
        jumped = opt.copy()
        jumped[feasible] = opt[opt[feasible]]
        if np.array_equal(jumped, opt):
            return opt
        opt = jumped


def bfs_distance_sum(indptr, indices, n_nodes):
    """Sum of shortest-path lengths and number of connected ordered pairs."""
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import shortest_path

    graph = csr_matrix(
        (np.ones(len(indices)), indices, indptr), shape=(n_nodes, n_nodes)
    )
    total = 0
    pairs = 0
    chunk = max(1, 2_000_000 // max(n_nodes, 1))
    for lo in range(0, n_nodes, chunk):
        rows = np.arange(lo, min(n_nodes, lo + chunk))
        d = shortest_path(graph, method="D", unweighted=True, indices=rows)
        reach = np.isfinite(d) & (d > 0)
        total += int(d[reach].sum())
        pairs += int(reach.sum())
    return total, pairs


def clustering(indptr, indices, n_nodes):
    """Local clustering coefficient of every node (0 where degree < 2)."""
    from scipy.sparse import csr_matrix

    adj = csr_matrix(
        (np.ones(len(indices)), indices, indptr), shape=(n_nodes, n_nodes)
    )
    links = np.asarray((adj @ adj).multiply(adj).sum(axis=1)).ravel() / 2
    deg = np.diff(indptr).astype(np.float64)
    out = np.zeros(n_nodes)
    ok = deg >= 2
    out[ok] = links[ok] / (deg[ok] * (deg[ok] - 1) / 2.0)
    return out
