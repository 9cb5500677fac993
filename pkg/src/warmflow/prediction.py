"""Prediction error metric and controlled-error prediction generation.

The error of a prediction is the larger of two quantities: how much flow the
residual graph still admits from s to t (distance from cut-saturating), and
the total conservation violation (excess plus deficit).  Both are integers.
"""

from __future__ import annotations

import random
from array import array
from dataclasses import dataclass

from .engine import solve_maxflow
from .network import PseudoFlow, flow_accounting
from .pipeline import _residual_network


@dataclass
class PredictionErrorReport:
    sigma: int  # distance from cut-saturating: residual max-flow value
    imbalance: int  # total excess + deficit
    eta: int  # max of the two
    l1_to_reference: int | None = None

    def csv_row(self):
        l1 = "" if self.l1_to_reference is None else self.l1_to_reference
        return f"{self.sigma},{self.imbalance},{self.eta},{l1}"


def prediction_error(net, prediction, reference_flow=None):
    """Error report for a capacity-respecting prediction.

    sigma is computed as a full max-flow on the prediction's residual graph
    (any flow making the prediction cut-saturating is a residual flow, and
    the cheapest one is the residual max-flow).  Note that the imbalance
    component can exceed the l1 distance to an optimum: one unit of arc
    difference shifts conservation at both endpoints.
    """
    rnet, _ = _residual_network(net, prediction)
    aux_flow, _, _ = solve_maxflow(rnet)
    sigma = _sink_inflow(rnet, aux_flow)
    acc = flow_accounting(net, prediction)
    imbalance = acc.total_excess + acc.total_deficit
    l1 = None
    if reference_flow is not None:
        l1 = l1_distance(prediction, reference_flow)
    return PredictionErrorReport(
        sigma=sigma, imbalance=imbalance, eta=max(sigma, imbalance), l1_to_reference=l1
    )


def _sink_inflow(net, f):
    total = 0
    for i in range(net.m):
        if net.heads[i] == net.sink:
            total += f.values[i]
        elif net.tails[i] == net.sink:
            total -= f.values[i]
    return total


def l1_distance(f, g):
    """Sum of per-arc absolute differences; flows must share a network."""
    if len(f.values) != len(g.values):
        raise ValueError("flows belong to networks with different arc counts")
    return sum(abs(a - b) for a, b in zip(f.values, g.values))


def perturb_flow(net, f_star, k, seed):
    """Apply k random unit edits to a feasible flow, then cap.

    Each edit decrements a positive-flow arc or increments a slack arc, so a
    single edit changes the total imbalance by at most 2 and the resulting
    prediction has error at most 2k.  Deterministic for a fixed seed.
    """
    rng = random.Random(seed)
    values = array("q", f_star.values)
    caps = net.caps
    for _ in range(k):
        decrement = rng.randrange(2) == 0
        if decrement:
            candidates = [i for i in range(net.m) if values[i] > 0]
            if not candidates:
                decrement = False
                candidates = [i for i in range(net.m) if values[i] < caps[i]]
        else:
            candidates = [i for i in range(net.m) if values[i] < caps[i]]
            if not candidates:
                decrement = True
                candidates = [i for i in range(net.m) if values[i] > 0]
        if not candidates:
            break
        i = candidates[rng.randrange(len(candidates))]
        values[i] += -1 if decrement else 1
    return PseudoFlow(values)
