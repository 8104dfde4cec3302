"""Primal network simplex for the balanced transportation problem.

Nodes ``0..m-1`` are sources, ``m..m+n-1`` are sinks and ``m+n`` is an
artificial root.  The initial basis is the star of artificial arcs through the
root; pivots follow the strongly feasible tree rule (leaving arc is the last
blocking arc along the cycle orientation), which excludes cycling under
degeneracy.  Entering arcs are chosen by block search.

Potentials are stored as an offset per root subtree plus a potential relative
to the subtree top, so reduced costs of arcs inside one subtree never see the
large artificial cost.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _rebuild(root, n_nodes, tree_arcs, src, tgt, cost, parent, pred, depth, rel, off, top, adj_ptr, adj, order):
    adj_ptr[:] = 0
    for k in range(tree_arcs.shape[0]):
        e = tree_arcs[k]
        adj_ptr[src[e] + 1] += 1
        adj_ptr[tgt[e] + 1] += 1
    for u in range(n_nodes):
        adj_ptr[u + 1] += adj_ptr[u]
    fill = adj_ptr[:-1].copy()
    for k in range(tree_arcs.shape[0]):
        e = tree_arcs[k]
        adj[fill[src[e]]] = e
        fill[src[e]] += 1
        adj[fill[tgt[e]]] = e
        fill[tgt[e]] += 1
    parent[root] = -1
    pred[root] = -1
    depth[root] = 0
    rel[root] = 0.0
    off[root] = 0.0
    top[root] = root
    order[0] = root
    head = 0
    tail = 1
    while head < tail:
        u = order[head]
        head += 1
        for q in range(adj_ptr[u], adj_ptr[u + 1]):
            e = adj[q]
            v = tgt[e] if src[e] == u else src[e]
            if v == parent[u]:
                continue
            parent[v] = u
            pred[v] = e
            depth[v] = depth[u] + 1
            # tree arcs have zero reduced cost: c + pi[src] - pi[tgt] = 0
            step = cost[e] if src[e] == u else -cost[e]
            if u == root:
                top[v] = v
                off[v] = step
                rel[v] = 0.0
            else:
                top[v] = top[u]
                off[v] = off[u]
                rel[v] = rel[u] + step
            order[tail] = v
            tail += 1
    return tail


@njit(cache=True, nogil=True)
def _solve(a, b, dist, eps_rel, max_iter):
    m = a.shape[0]
    n = b.shape[0]
    root = m + n
    n_nodes = m + n + 1
    e_real = m * n
    n_arcs = e_real + m + n

    src = np.empty(n_arcs, np.int64)
    tgt = np.empty(n_arcs, np.int64)
    cost = np.empty(n_arcs, np.float64)
    flow = np.zeros(n_arcs, np.float64)
    maxc = 0.0
    for i in range(m):
        for j in range(n):
            k = i * n + j
            src[k] = i
            tgt[k] = m + j
            cost[k] = dist[i, j]
            if dist[i, j] > maxc:
                maxc = dist[i, j]
    art = (maxc + 1.0) * n_nodes
    for i in range(m):
        k = e_real + i
        src[k] = i
        tgt[k] = root
        cost[k] = art
        flow[k] = a[i]
    for j in range(n):
        k = e_real + m + j
        src[k] = root
        tgt[k] = m + j
        cost[k] = art
        flow[k] = b[j]

    tree_arcs = np.empty(n_nodes - 1, np.int64)
    tree_pos = np.full(n_arcs, -1, np.int64)
    for k in range(n_nodes - 1):
        tree_arcs[k] = e_real + k
        tree_pos[e_real + k] = k

    parent = np.empty(n_nodes, np.int64)
    pred = np.empty(n_nodes, np.int64)
    depth = np.empty(n_nodes, np.int64)
    rel = np.empty(n_nodes, np.float64)
    off = np.empty(n_nodes, np.float64)
    top = np.empty(n_nodes, np.int64)
    adj_ptr = np.zeros(n_nodes + 1, np.int64)
    adj = np.empty(2 * (n_nodes - 1), np.int64)
    order = np.empty(n_nodes, np.int64)
    _rebuild(root, n_nodes, tree_arcs, src, tgt, cost, parent, pred, depth, rel, off, top, adj_ptr, adj, order)

    eps = eps_rel * (maxc if maxc > 0 else 1.0)
    block = max(int(np.sqrt(n_arcs)), 10)
    nxt = 0
    it = 0
    status = 0
    while True:
        # block search for an entering arc
        e_in = -1
        best = -eps
        cnt = 0
        for _ in range(n_arcs):
            e = nxt
            nxt += 1
            if nxt == n_arcs:
                nxt = 0
            if tree_pos[e] < 0:
                s = src[e]
                t = tgt[e]
                rc = cost[e] + (off[s] - off[t]) + (rel[s] - rel[t])
                if rc < best:
                    best = rc
                    e_in = e
            cnt += 1
            if cnt == block:
                if e_in >= 0:
                    break
                cnt = 0
        if e_in < 0:
            break
        it += 1
        if it > max_iter:
            status = 1
            break

        first = src[e_in]
        second = tgt[e_in]
        u = first
        v = second
        while u != v:
            if depth[u] > depth[v]:
                u = parent[u]
            elif depth[v] > depth[u]:
                v = parent[v]
            else:
                u = parent[u]
                v = parent[v]
        join = u

        delta = np.inf
        u_out = -1
        u = first
        while u != join:
            e = pred[u]
            if src[e] == u:  # arc points to the parent: flow decreases
                if flow[e] < delta:
                    delta = flow[e]
                    u_out = u
            u = parent[u]
        u = second
        while u != join:
            e = pred[u]
            if src[e] != u:  # arc points away from the parent: flow decreases
                if flow[e] <= delta:
                    delta = flow[e]
                    u_out = u
            u = parent[u]
        if u_out < 0:
            status = 2
            break

        if delta > 0:
            u = first
            while u != join:
                e = pred[u]
                if src[e] == u:
                    flow[e] -= delta
                else:
                    flow[e] += delta
                u = parent[u]
            u = second
            while u != join:
                e = pred[u]
                if src[e] == u:
                    flow[e] += delta
                else:
                    flow[e] -= delta
                u = parent[u]
            flow[e_in] += delta
        e_out = pred[u_out]
        flow[e_out] = 0.0
        k = tree_pos[e_out]
        tree_pos[e_out] = -1
        tree_arcs[k] = e_in
        tree_pos[e_in] = k
        _rebuild(root, n_nodes, tree_arcs, src, tgt, cost, parent, pred, depth, rel, off, top, adj_ptr, adj, order)

    plan = np.zeros((m, n), np.float64)
    for k in range(e_real):
        if flow[k] > 0:
            plan[k // n, k % n] = flow[k]
    residual = 0.0
    for k in range(e_real, n_arcs):
        residual += flow[k]
    return plan, residual, it, status


def transport_plan(a: np.ndarray, b: np.ndarray, dist: np.ndarray, eps_rel: float = 1e-12,
                   max_iter: int | None = None) -> tuple[np.ndarray, float, int]:
    """Optimal plan for supplies ``a``, demands ``b`` and ground costs ``dist``.

    Returns ``(plan, artificial_residual, pivots)``.  ``a`` and ``b`` must be
    positive with equal sums.
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    dist = np.ascontiguousarray(dist, dtype=np.float64)
    if max_iter is None:
        max_iter = 50 * (a.size + b.size + 1) * max(a.size, b.size) + 1000
    plan, residual, it, status = _solve(a, b, dist, eps_rel, max_iter)
    if status == 1:
        raise RuntimeError(f"network simplex exceeded {max_iter} pivots")
    if status == 2:
        raise RuntimeError("network simplex found an unbounded cycle")
    return plan, residual, it
