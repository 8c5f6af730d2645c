# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Signatures and results mirror ttplon._fallback."""

import numpy as np
cimport numpy as cnp
from libc.math cimport ceil, pow, NAN

cnp.import_array()

NAME = "cython"


def evaluate_space(
    const long long[:, ::1] tours, const unsigned char[::1] plan_ok,
    const double[:, ::1] dist, const double[::1] weights, const double[::1] profits,
    const long long[::1] item_city,
    double capacity, double v_max, double v_min, double renting_rate,
    double drop_rate, double drop_interval, bint load_dependent, bint value_drops,
):
    cdef Py_ssize_t n_tours = tours.shape[0], n = tours.shape[1]
    cdef Py_ssize_t m = weights.shape[0]
    cdef Py_ssize_t n_plans = 1 << m
    cdef double slope = (v_max - v_min) / capacity
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_arr = np.empty(n_tours * n_plans)
    cdef double[::1] out = out_arr
    cdef double[::1] arrival = np.zeros(m)
    # items grouped by city, ascending item index
    cdef long long[::1] start = np.zeros(n + 1, dtype=np.int64)
    cdef long long[::1] items = np.zeros(m, dtype=np.int64)
    cdef Py_ssize_t t, z, i, k, c, city, nxt, pos
    cdef double load, elapsed, leg, total, value
    for k in range(m):
        start[item_city[k] + 1] += 1
    for c in range(n):
        start[c + 1] += start[c]
    pos_arr = np.asarray(start[:n]).copy()
    cdef long long[::1] fill = pos_arr
    for k in range(m):
        items[fill[item_city[k]]] = k
        fill[item_city[k]] += 1

    for t in range(n_tours):
        for z in range(n_plans):
            if not plan_ok[z]:
                out[t * n_plans + z] = NAN
                continue
            load = 0.0
            elapsed = 0.0
            for i in range(n):
                city = tours[t, i]
                nxt = tours[t, (i + 1) % n]
                for pos in range(start[city], start[city + 1]):
                    k = items[pos]
                    arrival[k] = elapsed
                    if (z >> k) & 1:
                        load = load + weights[k]
                if load_dependent:
                    leg = dist[city, nxt] / (v_max - slope * load)
                else:
                    leg = dist[city, nxt] / v_max
                elapsed = elapsed + leg
            total = elapsed
            value = 0.0
            for k in range(m):
                if (z >> k) & 1:
                    if value_drops:
                        value = value + profits[k] * pow(
                            drop_rate, ceil((total - arrival[k]) / drop_interval))
                    else:
                        value = value + profits[k]
            out[t * n_plans + z] = value - renting_rate * total
    return out_arr


def sweep_next(
    const double[::1] fit, const unsigned char[::1] plan_ok,
    const long long[:, ::1] tsp_table, int m, bint with_identities,
    Py_ssize_t start, Py_ssize_t stop,
):
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out_arr = np.empty(stop - start, dtype=np.int64)
    cdef long long[::1] out = out_arr
    cdef Py_ssize_t n_cols = tsp_table.shape[1]
    cdef long long mask = (1 << m) - 1
    cdef Py_ssize_t s, a, b, a0
    cdef long long tour, plan, z2, cand, inc
    cdef double inc_fit, f
    a0 = 0 if with_identities else 1
    for s in range(start, stop):
        plan = s & mask
        if not plan_ok[plan]:
            out[s - start] = -1
            continue
        tour = s >> m
        inc = s
        inc_fit = fit[s]
        for a in range(a0, n_cols):
            for b in range(a0, m + 1):
                if a == 0 and b == 0:
                    continue
                z2 = plan if b == 0 else plan ^ (1 << (b - 1))
                if not plan_ok[z2]:
                    continue
                cand = (tsp_table[tour, a] << m) | z2
                f = fit[cand]
                if f > inc_fit:
                    inc = cand
                    inc_fit = f
        out[s - start] = inc
    return out_arr


def edge_pairs(
    const long long[::1] basin, const unsigned char[::1] plan_ok,
    const long long[:, ::1] tsp_table, int m, bint with_identities,
    Py_ssize_t start, Py_ssize_t stop,
):
    cdef Py_ssize_t n_cols = tsp_table.shape[1]
    cdef long long mask = (1 << m) - 1
    cdef Py_ssize_t s, a, b, a0, used = 0
    cdef long long tour, plan, z2, cand, u, v, n_nodes = 0
    for s in range(basin.shape[0]):
        if basin[s] + 1 > n_nodes:
            n_nodes = basin[s] + 1
    cdef Py_ssize_t cap = 1024
    keys_arr = np.empty(cap, dtype=np.int64)
    cdef long long[::1] keys = keys_arr
    a0 = 0 if with_identities else 1
    for s in range(start, stop):
        u = basin[s]
        if u < 0:
            continue
        plan = s & mask
        tour = s >> m
        for a in range(a0, n_cols):
            for b in range(a0, m + 1):
                if a == 0 and b == 0:
                    continue
                z2 = plan if b == 0 else plan ^ (1 << (b - 1))
                if not plan_ok[z2]:
                    continue
                cand = (tsp_table[tour, a] << m) | z2
                v = basin[cand]
                if v == u:
                    continue
                if used == cap:
                    cap *= 2
                    keys_arr = np.resize(keys_arr, cap)
                    keys = keys_arr
                keys[used] = (u if u < v else v) * n_nodes + (v if u < v else u)
                used += 1
    uniq, counts = np.unique(keys_arr[:used], return_counts=True)
    div = max(n_nodes, 1)
    return uniq // div, uniq % div, counts.astype(np.int64)


def resolve_optima(const long long[::1] nxt):
    cdef Py_ssize_t size = nxt.shape[0], s
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out_arr = np.asarray(nxt).copy()
    cdef long long[::1] opt = out_arr
    cdef long long cur
    for s in range(size):
        cur = s
        if nxt[s] < 0:
            continue
        while nxt[cur] != cur:
            cur = nxt[cur]
        opt[s] = cur
    return out_arr


def bfs_distance_sum(const int[::1] indptr, const int[::1] indices, Py_ssize_t n_nodes):
    cdef long long[::1] dist = np.full(n_nodes, -1, dtype=np.int64)
    cdef int[::1] queue = np.empty(max(n_nodes, 1), dtype=np.int32)
    cdef Py_ssize_t src, head, tail, u, e, w
    cdef long long total = 0, pairs = 0, du
    for src in range(n_nodes):
        for u in range(n_nodes):
            dist[u] = -1
        dist[src] = 0
        queue[0] = <int>src
        head = 0
        tail = 1
        while head < tail:
            u = queue[head]
            head += 1
            du = dist[u]
            for e in range(indptr[u], indptr[u + 1]):
                w = indices[e]
                if dist[w] < 0:
                    dist[w] = du + 1
                    total += du + 1
                    pairs += 1
                    queue[tail] = <int>w
                    tail += 1
    return total, pairs


def clustering(const int[::1] indptr, const int[::1] indices, Py_ssize_t n_nodes):
    """Local clustering coefficient of every node (0 where degree < 2)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_arr = np.zeros(n_nodes)
    cdef double[::1] out = out_arr
    cdef unsigned char[::1] mark = np.zeros(max(n_nodes, 1), dtype=np.uint8)
    cdef Py_ssize_t u, e, f, v, w, deg
    cdef long long links
    for u in range(n_nodes):
        deg = indptr[u + 1] - indptr[u]
        if deg < 2:
            continue
        for e in range(indptr[u], indptr[u + 1]):
            mark[indices[e]] = 1
        links = 0
        for e in range(indptr[u], indptr[u + 1]):
            v = indices[e]
            for f in range(indptr[v], indptr[v + 1]):
                w = indices[f]
                if w > v and mark[w]:
                    links += 1
        for e in range(indptr[u], indptr[u + 1]):
            mark[indices[e]] = 0
        out[u] = links / (deg * (deg - 1) / 2.0)
    return out_arr
