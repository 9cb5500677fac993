"""Independent correctness oracles: Edmonds-Karp and brute-force min cut.

These share the Network data model but none of the Push-Relabel code paths,
so they can certify the engine without circularity.  Performance is a
non-goal here.
"""

from __future__ import annotations

from array import array
from collections import deque
from dataclasses import dataclass

import numpy as np

from .network import CutPartition, PseudoFlow, cut_capacity


@dataclass
class OracleResult:
    value: int
    flow: PseudoFlow
    cut: CutPartition


def reference_maxflow(net):
    """Shortest-augmenting-path max-flow with deterministic arc-order ties.

    Returns the value, one max-flow assignment, and the min-cut induced by
    residual reachability from s.
    """
    res = array("q", bytes(16 * net.m))
    for i in range(net.m):
        res[2 * i] = net.caps[i]
    first_out, adj, slot_to = net.first_out, net.adj, net.slot_to
    s, t, n = net.source, net.sink, net.n

    parent_slot = [-1] * n
    while True:
        for u in range(n):
            parent_slot[u] = -1
        parent_slot[s] = -2
        q = deque([s])
        found = False
        while q and not found:
            u = q.popleft()
            for k in range(first_out[u], first_out[u + 1]):
                e = adj[k]
                v = slot_to[e]
                if res[e] > 0 and parent_slot[v] == -1:
                    parent_slot[v] = e
                    if v == t:
                        found = True
                        break
                    q.append(v)
        if not found:
            break
        bottleneck = 1 << 62
        v = t
        while v != s:
            e = parent_slot[v]
            if res[e] < bottleneck:
                bottleneck = res[e]
            v = slot_to[e ^ 1]
        v = t
        while v != s:
            e = parent_slot[v]
            res[e] -= bottleneck
            res[e ^ 1] += bottleneck
            v = slot_to[e ^ 1]

    values = array("q", bytes(8 * net.m))
    value = 0
    for i in range(net.m):
        values[i] = net.caps[i] - res[2 * i]
        if net.tails[i] == s:
            value += values[i]
    flow = PseudoFlow(values)

    # min cut: nodes s can still reach in the residual graph form the S side
    reach = bytearray(n)
    reach[s] = 1
    q = deque([s])
    while q:
        u = q.popleft()
        for k in range(first_out[u], first_out[u + 1]):
            e = adj[k]
            v = slot_to[e]
            if res[e] > 0 and not reach[v]:
                reach[v] = 1
                q.append(v)
    t_side = bytes(0 if reach[u] else 1 for u in range(n))
    cut = CutPartition(t_side=t_side, cut_capacity=cut_capacity(net, t_side), saturated=True)
    return OracleResult(value=value, flow=flow, cut=cut)


def brute_force_mincut(net, chunk=1 << 15):
    """Minimum forward capacity over all 2^(n-2) partitions with s in S, t in T."""
    if net.n > 20:
        raise ValueError("brute force limited to n <= 20")
    k = net.n - 2
    pos = {}
    for u in range(net.n):
        if u not in (net.source, net.sink):
            pos[u] = len(pos)
    if net.m == 0:
        return 0

    tails = np.fromiter(net.tails, dtype=np.int64)
    heads = np.fromiter(net.heads, dtype=np.int64)
    caps = np.fromiter(net.caps, dtype=np.int64)

    def side_bits(nodes, subsets):
        """1 where the node is on the S side, per subset row."""
        out = np.empty((len(subsets), len(nodes)), dtype=np.int64)
        for j, u in enumerate(nodes):
            if u == net.source:
                out[:, j] = 1
            elif u == net.sink:
                out[:, j] = 0
            else:
                out[:, j] = (subsets >> pos[u]) & 1
        return out

    best = None
    total = 1 << k
    for start in range(0, total, chunk):
        subsets = np.arange(start, min(start + chunk, total), dtype=np.int64)
        tin = side_bits(tails, subsets)
        hin = side_bits(heads, subsets)
        cut_vals = ((tin == 1) & (hin == 0)) @ caps
        m = int(cut_vals.min())
        if best is None or m < best:
            best = m
    return best
