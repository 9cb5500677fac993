"""Warm start from an arbitrary predicted pseudo-flow, in three phases plus
flow restoration:

1. saturate a cut (max-flow on the prediction's residual graph, bounded by
   the prediction error),
2. route t-side excess to deficits/t within the t-side, expelling blocked
   excess to the s-side,
3. the mirror pass on the reversed network, pinning every deficit to the
   t-side, after which the maintained cut is a minimum cut,
4. return s-side excess to s and pull t-side deficits from t, yielding a
   feasible maximum flow (skipped in cut-only mode).

Early termination stops each inner solve at its min cut, trading a bounded
amount of extra excess/deficit for less work.
"""

from __future__ import annotations

import logging
import time
from array import array
from dataclasses import dataclass, field

from .engine import (
    HeightLabels,
    InvariantError,
    SolverStats,
    _excess_array,
    _extract_flow,
    _make_cut,
    _run_vanilla,
    bounded_maxflow,
    bounded_maxflow_doubling,
    gap_warm_push_relabel,
    global_relabel,
    init_cold_preflow,
)
from .network import (
    CutPartition,
    Network,
    PseudoFlow,
    _induced_arrays,
    apply_slot_flows,
    cancel_terminal_cycles,
    cap_prediction,
    flow_accounting,
    flow_value,
    is_saturated_cut,
    node_imbalances,
    residual_reachability_cut,
    reverse_network,
)

log = logging.getLogger("warmflow.pipeline")

PHASES = ("saturate", "excess_t_side", "deficit_s_side", "restore")


@dataclass
class PipelinePhaseReport:
    phase: str
    stats: SolverStats
    total_excess: int
    total_deficit: int
    cut_capacity: int
    aux_value: int = 0

    def csv_row(self, elapsed=True):
        return (
            f"{self.phase},{self.total_excess},{self.total_deficit},"
            f"{self.cut_capacity},{self.stats.csv_row(elapsed=elapsed)}"
        )


@dataclass
class Solution:
    flow: PseudoFlow
    cut: CutPartition
    mode: str  # full_flow | cut_only
    value: int
    phase_reports: list

    def total_ops(self):
        return sum(r.stats.total_ops() for r in self.phase_reports)

    def summary(self):
        lines = [f"mode={self.mode} value={self.value} cut_capacity={self.cut.cut_capacity}"]
        for r in self.phase_reports:
            s = r.stats
            lines.append(
                f"  {r.phase}: pushes={s.pushes} relabels={s.relabels} "
                f"gap_events={s.gap_events} excess={r.total_excess} deficit={r.total_deficit} "
                f"cut={r.cut_capacity}"
            )
        return "\n".join(lines)


@dataclass
class WarmStartOptions:
    eta: int | None = None  # None: unknown, solved by doubling
    mode: str = "full_flow"  # or "cut_only"
    early_termination: bool = False
    seed_strategy: str = "residual"  # or "predicted_cut"
    predicted_cut: CutPartition | None = None
    global_relabel_every: int | None = None
    debug: bool = False

    def __post_init__(self):
        if self.mode not in ("full_flow", "cut_only"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.seed_strategy not in ("residual", "predicted_cut"):
            raise ValueError(f"unknown seed strategy {self.seed_strategy!r}")
        if self.seed_strategy == "predicted_cut" and self.predicted_cut is None:
            raise ValueError("predicted_cut strategy requires a predicted cut")


def _residual_network(net, f):
    """The prediction's residual graph as a standalone Network plus origin map."""
    res = net.residual_array(f)
    tails = array("q")
    heads = array("q")
    caps = array("q")
    origins = []
    slot_to = net.slot_to
    for e in range(2 * net.m):
        if res[e] > 0:
            tails.append(slot_to[e ^ 1])
            heads.append(slot_to[e])
            caps.append(res[e])
            origins.append(e)
    rnet = Network(net.n, net.source, net.sink, tails, heads, caps)
    return rnet, origins


def saturate_cut(net, prediction, eta=None, *, early_termination=False,
                 global_relabel_every=None):
    """Augment the prediction into a cut-saturating pseudo-flow.

    Runs the bounded cold start on the prediction's residual graph (doubling
    when eta is unknown), drops the super-source arc, and folds the auxiliary
    flow back in.  Exact mode leaves total excess+deficit unchanged; early
    termination can add up to the bound's worth of excess.
    """
    rnet, origins = _residual_network(net, prediction)
    if eta is None:
        aux_flow, aux_cut, stats = bounded_maxflow_doubling(
            rnet, 1, cut_only=early_termination,
            global_relabel_every=global_relabel_every, phase="saturate",
        )
    else:
        outcome = bounded_maxflow(
            rnet, eta, cut_only=early_termination,
            global_relabel_every=global_relabel_every,
        )
        if outcome.exhausted:
            # the supplied bound undershot the true error; keep growing it
            log.info("saturate: eta=%d exhausted, continuing by doubling", eta)
            aux_flow, aux_cut, stats2 = bounded_maxflow_doubling(
                rnet, max(1, 2 * eta), cut_only=early_termination,
                global_relabel_every=global_relabel_every, phase="saturate",
            )
            stats = outcome.stats
            stats.merge(stats2)
        else:
            aux_flow, aux_cut, stats = outcome.flow, outcome.cut, outcome.stats
        stats.phase = "saturate"
    f = prediction.copy()
    apply_slot_flows(net, f, aux_flow.values, origins)
    aux_value = _inflow(rnet, aux_flow, rnet.sink)
    return f, stats, aux_value


def _inflow(net, f, node):
    total = 0
    for i in range(net.m):
        if net.heads[i] == node:
            total += f.values[i]
        if net.tails[i] == node:
            total -= f.values[i]
    return total


def saturate_predicted_cut(net, prediction, cut):
    """Seed from a trusted cut: saturate its forward arcs, empty its backward
    arcs, transferring all error onto excess/deficit at the cut boundary."""
    t_side = cut.t_side if isinstance(cut, CutPartition) else cut
    if t_side[net.source] or not t_side[net.sink]:
        raise ValueError("predicted cut must keep s on the s-side and t on the t-side")
    f = prediction.copy()
    values = f.values
    for i in range(net.m):
        tin = t_side[net.tails[i]]
        hin = t_side[net.heads[i]]
        if not tin and hin:
            values[i] = net.caps[i]
        elif tin and not hin:
            values[i] = 0
    return f, SolverStats(phase="saturate"), 0


def move_excess_to_s_side(net, f, eta=None, *, t_side=None, early_termination=False,
                          global_relabel_every=None, phase="excess_t_side"):
    """Resolve all t-side excess by routing it to deficits or t within the
    t-side; excess that cannot be routed is expelled across the cut.

    Returns the updated flow, the (weakly smaller-T) saturated cut, and the
    auxiliary solver stats.  Requires a cut-saturating input.
    """
    if t_side is None:
        cut0 = residual_reachability_cut(net, f)
        if cut0 is None:
            raise ValueError("flow is not cut-saturating")
        t_side = cut0.t_side
    else:
        t_side = t_side.t_side if isinstance(t_side, CutPartition) else t_side
        if t_side[net.source] or not t_side[net.sink]:
            raise ValueError("provided cut must separate s from t")
        if not is_saturated_cut(net, f, t_side):
            raise ValueError("flow does not saturate the provided cut")
    balance = node_imbalances(net, f)
    sink = net.sink
    exc_nodes = [
        u for u in range(net.n)
        if t_side[u] and u != sink and u != net.source and balance[u] > 0
    ]
    if not exc_nodes:
        return f, _make_cut(net, f, t_side), SolverStats(phase=phase)

    nodes = [u for u in range(net.n) if t_side[u]]
    res = net.residual_array(f)
    k, idmap, arcs, origins = _induced_arrays(net, res, nodes)
    cap_into_t = sum(c for (_, h, c) in arcs if h == idmap[sink])
    sstar, tstar = k, k + 1
    total_exc = 0
    for u in exc_nodes:
        arcs.append((sstar, idmap[u], balance[u]))
        origins.append(-1)
        total_exc += balance[u]
    for v in nodes:
        if v != sink and v != net.source and balance[v] < 0:
            arcs.append((idmap[v], tstar, -balance[v]))
            origins.append(-1)
    tt_cap = (eta + 1) if eta is not None else (min(total_exc, cap_into_t) + 1)
    arcs.append((idmap[sink], tstar, tt_cap))
    origins.append(-1)
    aux = Network(
        k + 2, sstar, tstar,
        array("q", [a[0] for a in arcs]),
        array("q", [a[1] for a in arcs]),
        array("q", [a[2] for a in arcs]),
    )
    aux_flow, aux_cut, stats = gap_warm_push_relabel(
        aux, init_cold_preflow(aux), cut_only=early_termination,
        global_relabel_every=global_relabel_every, phase=phase,
    )
    apply_slot_flows(net, f, aux_flow.values, origins)
    new_t = bytearray(net.n)
    for u in nodes:
        if aux_cut.t_side[idmap[u]]:
            new_t[u] = 1
    if not new_t[sink]:
        raise InvariantError("sink left the t-side: the (t, t*) guard arc was cut")
    for u in range(net.n):
        if new_t[u] and not t_side[u]:
            raise InvariantError(f"t-side regained node {u} in {phase}")
    return f, _make_cut(net, f, new_t), stats


def move_deficit_to_t_side(net, f, cut, eta=None, *, early_termination=False,
                           global_relabel_every=None):
    """Mirror pass: on the reversed network, s-side deficits become t-side
    excesses and are resolved by the same machinery; s-side flow that cannot
    feed a deficit is expelled to the t-side.  Flow on the original t-side is
    untouched.
    """
    t_side = cut.t_side if isinstance(cut, CutPartition) else cut
    balance = node_imbalances(net, f)
    has_deficit = any(
        not t_side[u] and u != net.source and u != net.sink and balance[u] < 0
        for u in range(net.n)
    )
    excess_in_t = any(
        t_side[u] and u != net.source and u != net.sink and balance[u] > 0
        for u in range(net.n)
    )
    if excess_in_t:
        raise ValueError("excess present on the t-side: run move_excess_to_s_side first")
    if not has_deficit:
        return f, _make_cut(net, f, t_side), SolverStats(phase="deficit_s_side")
    bnet, g = reverse_network(net, f)
    b_t_side = bytes(0 if t_side[u] else 1 for u in range(net.n))
    g2, b_cut, stats = move_excess_to_s_side(
        bnet, g, eta, t_side=b_t_side, early_termination=early_termination,
        global_relabel_every=global_relabel_every, phase="deficit_s_side",
    )
    f2 = PseudoFlow(array("q", g2.values))
    new_t = bytes(0 if b_cut.t_side[u] else 1 for u in range(net.n))
    return f2, _make_cut(net, f2, new_t), stats


def restore_flow(net, f, min_cut, *, global_relabel_every=None):
    """Turn a separated pseudo-flow into a feasible max-flow on the min cut.

    S-side nodes are parked at height n, t-side at 0; one vanilla pass sends
    s-side excess home, a second on the reversed network pulls flow from t to
    every deficit node.  The cut stays saturated throughout.
    """
    t_side = min_cut.t_side if isinstance(min_cut, CutPartition) else min_cut
    if not is_saturated_cut(net, f, t_side):
        raise ValueError("flow does not saturate the given cut")
    balance = node_imbalances(net, f)
    excess_s = False
    deficit_t = False
    for u in range(net.n):
        if u == net.source or u == net.sink:
            continue
        if balance[u] > 0:
            if t_side[u]:
                raise ValueError("excess on the t-side: phase order violated")
            excess_s = True
        elif balance[u] < 0:
            if not t_side[u]:
                raise ValueError("deficit on the s-side: phase order violated")
            deficit_t = True
    stats = SolverStats(phase="restore")
    grl = global_relabel_every
    if excess_s:
        res = net.residual_array(f)
        excess = _excess_array(net, f)
        height = _restore_heights(net, f, t_side, stats)
        _run_vanilla(net, res, excess, height,
                     net.m if grl is None else grl, stats)
        f = _extract_flow(net, res)
    if deficit_t:
        bnet, g = reverse_network(net, f)
        b_t_side = bytes(0 if t_side[u] else 1 for u in range(net.n))
        res = bnet.residual_array(g)
        excess = _excess_array(bnet, g)
        height = _restore_heights(bnet, g, b_t_side, stats)
        _run_vanilla(bnet, res, excess, height,
                     bnet.m if grl is None else grl, stats)
        f = PseudoFlow(array("q", _extract_flow(bnet, res).values))
    cancel_terminal_cycles(net, f)
    return f, stats


def _restore_heights(net, f, t_side, stats):
    """Seed labels (n on the s-side, 0 on the t-side) sharpened by one global
    relabel, so excess descends a BFS gradient instead of climbing blindly."""
    flat = HeightLabels(
        array("q", (net.n if not t_side[u] else 0 for u in range(net.n))), net.n
    )
    refined = global_relabel(net, f, flat)
    stats.global_relabels += 1
    return array("q", refined.values)


def warm_start_solve(net, raw_prediction, options=None, **kwargs):
    """End-to-end warm start; orchestrates capping, the three phases, and the
    optional restore, collecting one report per phase."""
    opts = options if options is not None else WarmStartOptions(**kwargs)
    if isinstance(raw_prediction, PseudoFlow):
        prediction = cap_prediction(net, list(raw_prediction.values))
    else:
        prediction = cap_prediction(net, raw_prediction)

    reports = []

    def report(phase, stats, f, cut_cap, aux_value=0):
        acc = flow_accounting(net, f)
        reports.append(PipelinePhaseReport(
            phase=phase,
            stats=stats,
            total_excess=acc.total_excess,
            total_deficit=acc.total_deficit,
            cut_capacity=cut_cap,
            aux_value=aux_value,
        ))
        return acc

    t0 = time.perf_counter_ns()
    if opts.seed_strategy == "predicted_cut":
        f, stats1, aux_value = saturate_predicted_cut(net, prediction, opts.predicted_cut)
    else:
        f, stats1, aux_value = saturate_cut(
            net, prediction, opts.eta, early_termination=opts.early_termination,
            global_relabel_every=opts.global_relabel_every,
        )
    stats1.elapsed_ns = max(stats1.elapsed_ns, time.perf_counter_ns() - t0)
    cut1 = residual_reachability_cut(net, f)
    if cut1 is None:
        raise InvariantError("saturate phase did not produce a cut-saturating flow")
    report("saturate", stats1, f, cut1.cut_capacity, aux_value)

    f, cut2, stats2 = move_excess_to_s_side(
        net, f, opts.eta, t_side=cut1.t_side, early_termination=opts.early_termination,
        global_relabel_every=opts.global_relabel_every,
    )
    report("excess_t_side", stats2, f, cut2.cut_capacity)

    f, cut3, stats3 = move_deficit_to_t_side(
        net, f, cut2, opts.eta, early_termination=opts.early_termination,
        global_relabel_every=opts.global_relabel_every,
    )
    # the s-side only ever shrinks in the mirror pass
    for u in range(net.n):
        if not cut3.t_side[u] and cut2.t_side[u]:
            raise InvariantError(f"s-side regained node {u} in deficit_s_side")
    report("deficit_s_side", stats3, f, cut3.cut_capacity)

    if opts.mode == "cut_only":
        if opts.debug and not cut3.saturated:
            raise InvariantError("cut-only result does not saturate its cut")
        return Solution(
            flow=f, cut=cut3, mode="cut_only",
            value=cut3.cut_capacity, phase_reports=reports,
        )

    f, stats4 = restore_flow(net, f, cut3, global_relabel_every=opts.global_relabel_every)
    acc = report("restore", stats4, f, cut3.cut_capacity)
    value = flow_value(net, f)
    if acc.classification != "feasible":
        raise InvariantError("restore phase left a conservation violation")
    if value != cut3.cut_capacity:
        raise InvariantError(
            f"max-flow/min-cut certificate failed: value {value} != cut {cut3.cut_capacity}"
        )
    final_cut = _make_cut(net, f, bytearray(cut3.t_side))
    return Solution(flow=f, cut=final_cut, mode="full_flow", value=value, phase_reports=reports)
