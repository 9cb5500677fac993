"""Seeded random instances for tests, acceptance runs, and the CLI generator."""

from __future__ import annotations

import random
from array import array

from .network import Network, PseudoFlow, build_network


def random_network(n, density, max_cap, seed):
    """Random directed network on n nodes; arcs appear i.i.d. with ``density``.

    Source is node 0, sink node n-1, capacities uniform in 1..max_cap.
    Deterministic for a fixed seed.
    """
    if n < 2:
        raise ValueError("need at least source and sink")
    rng = random.Random(seed)
    arcs = []
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < density:
                arcs.append((u, v, rng.randint(1, max_cap)))
    return build_network(n, arcs, 0, n - 1)


def random_pseudoflow(net, seed):
    """Independent uniform flow on every arc within its capacity."""
    rng = random.Random(seed)
    values = array("q", bytes(8 * net.m))
    for i in range(net.m):
        if net.caps[i] > 0:
            values[i] = rng.randint(0, net.caps[i])
    return PseudoFlow(values)
