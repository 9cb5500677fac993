"""Push-Relabel engine: height labels, the vanilla loop, warm start with gap
relabeling, the bounded cold start and its doubling wrapper, and global
relabeling.

All solving happens on flat per-slot arrays (see network.py); the inner loops
live in the selected kernel (compiled or pure Python, behaviourally
identical).  Everything here is single-threaded per run; a Network itself is
immutable and may be shared across concurrent runs.
"""

from __future__ import annotations

import time
from array import array
from collections import deque
from dataclasses import dataclass, field

from . import kernels
from .network import (
    CAPACITY_SUM_LIMIT,
    CutPartition,
    Network,
    PseudoFlow,
    cancel_terminal_cycles,
    cut_capacity,
    flow_accounting,
    is_saturated_cut,
    node_imbalances,
    validate_capacities,
)


class InvariantError(RuntimeError):
    """A solver invariant failed; indicates a bug or corrupted input state."""


STATS_CSV_HEADER = "pushes_sat,pushes_unsat,relabels,gap_events,global_relabels,phase,elapsed_ns"


@dataclass
class SolverStats:
    """Operation counters for one solver run or phase; counters are monotone."""

    pushes_sat: int = 0
    pushes_unsat: int = 0
    relabels: int = 0
    gap_events: int = 0
    global_relabels: int = 0
    phase: str = ""
    elapsed_ns: int = 0
    nodes_removed: int = 0

    def add_kernel_array(self, arr):
        self.pushes_sat += arr[0]
        self.pushes_unsat += arr[1]
        self.relabels += arr[2]
        self.gap_events += arr[3]
        self.global_relabels += arr[4]
        self.nodes_removed += arr[5]

    def merge(self, other):
        self.pushes_sat += other.pushes_sat
        self.pushes_unsat += other.pushes_unsat
        self.relabels += other.relabels
        self.gap_events += other.gap_events
        self.global_relabels += other.global_relabels
        self.nodes_removed += other.nodes_removed
        self.elapsed_ns += other.elapsed_ns

    @property
    def pushes(self):
        return self.pushes_sat + self.pushes_unsat

    def total_ops(self):
        return self.pushes_sat + self.pushes_unsat + self.relabels

    def csv_row(self, elapsed=True):
        ns = self.elapsed_ns if elapsed else 0
        return (
            f"{self.pushes_sat},{self.pushes_unsat},{self.relabels},"
            f"{self.gap_events},{self.global_relabels},{self.phase},{ns}"
        )


class HeightLabels:
    """Per-node heights; valid when h(u) <= h(v)+1 over positive residual arcs."""

    __slots__ = ("values", "n")

    def __init__(self, values, n):
        self.values = values
        self.n = n

    def copy(self):
        return HeightLabels(array("q", self.values), self.n)

    def __getitem__(self, u):
        return self.values[u]

    def __repr__(self):
        return f"HeightLabels({list(self.values)}, n={self.n})"


def heights_valid(net, f, heights):
    """Check the validity contract, including h(s)=n and h(t)=0."""
    h = heights.values
    if h[net.source] != net.n or h[net.sink] != 0:
        return False
    res = net.residual_array(f)
    slot_to = net.slot_to
    for e in range(2 * net.m):
        if res[e] > 0 and h[slot_to[e ^ 1]] > h[slot_to[e]] + 1:
            return False
    return True


@dataclass
class BoundedOutcome:
    """Result of a bounded cold start; ``exhausted`` marks a too-small bound."""

    exhausted: bool
    flow: PseudoFlow | None
    cut: CutPartition | None
    stats: SolverStats
    eta_used: int = 0


def init_cold_preflow(net):
    """Saturate every source arc (except into inert nodes); a pre-flow."""
    f = PseudoFlow.zeros(net)
    for i in range(net.m):
        if net.tails[i] == net.source and not net.inert[net.heads[i]]:
            f.values[i] = net.caps[i]
    return f


def define_heights(net, f):
    """Heights and cut for a cut-saturating pseudo-flow.

    T-side nodes get their exact residual BFS distance to t, everything else
    (including s) height n.  Raises ValueError when f does not saturate a cut
    (s can still reach t in the residual graph).
    """
    res = net.residual_array(f)
    dist = _t_distances(net, res)
    if dist[net.source] >= 0:
        raise ValueError("flow is not cut-saturating: s still reaches t in the residual graph")
    n = net.n
    hvals = array("q", bytes(8 * n))
    t_side = bytearray(n)
    for u in range(n):
        if dist[u] >= 0:
            hvals[u] = dist[u]
            t_side[u] = 1
        else:
            hvals[u] = n
    cut = _make_cut(net, f, t_side)
    return HeightLabels(hvals, n), cut


def _t_distances(net, res):
    """Residual BFS distances to the sink; -1 when unreachable."""
    dist = [-1] * net.n
    dist[net.sink] = 0
    q = deque([net.sink])
    first_out, adj, slot_to = net.first_out, net.adj, net.slot_to
    while q:
        v = q.popleft()
        dv = dist[v]
        for k in range(first_out[v], first_out[v + 1]):
            e = adj[k]
            u = slot_to[e]
            if dist[u] < 0 and res[e ^ 1] > 0:
                dist[u] = dv + 1
                q.append(u)
    return dist


def _make_cut(net, f, t_side):
    cap = cut_capacity(net, t_side)
    saturated = is_saturated_cut(net, f, t_side) if f is not None else False
    return CutPartition(t_side=bytes(t_side), cut_capacity=cap, saturated=saturated)


def induced_cut_from_heights(net, heights, f=None):
    """Cut at the smallest positive height value missing from the labels.

    Raises ValueError when no gap exists in {1..n} (invalid heights) or when
    some node sits exactly at the gap.
    """
    h = heights.values
    n = net.n
    present = bytearray(n + 2)
    for u in range(n):
        if h[u] <= n + 1:
            present[h[u]] = 1
    theta = -1
    for z in range(1, n + 1):
        if not present[z]:
            theta = z
            break
    if theta < 0:
        raise ValueError("no height gap in 1..n: labels are not valid for a cut-saturating flow")
    t_side = bytearray(n)
    for u in range(n):
        if h[u] == theta:
            raise ValueError(f"node {u} sits exactly at the gap height {theta}")
        if h[u] < theta:
            t_side[u] = 1
    return _make_cut(net, f, t_side)


def _cadence(net, override):
    if override is None:
        return net.m
    return max(0, int(override))


_KERNEL_ERRORS = {
    kernels.ERR_NO_NEIGHBOR: "active node has no residual neighbour to relabel towards",
    kernels.ERR_RELABEL_BUDGET: "relabel budget exceeded (corrupted heights or residuals)",
    kernels.ERR_HEIGHT_BOUND: "height exceeded 2n during a vanilla run",
    kernels.ERR_BAD_ENTRY: "t-side heights not consistent with the gap threshold on entry",
}


def _check_kernel(arr):
    if arr[6]:
        raise InvariantError(_KERNEL_ERRORS.get(arr[6], f"kernel error {arr[6]}"))


def _run_gap(net, res, excess, height, in_t, grl_every, stats):
    arr = array("q", bytes(64))
    before = bytes(in_t)
    t0 = time.perf_counter_ns()
    kernels.gap_loop(
        net.n, net.source, net.sink, net.first_out, net.adj, net.slot_to,
        res, excess, height, in_t, grl_every, arr,
    )
    stats.elapsed_ns += time.perf_counter_ns() - t0
    _check_kernel(arr)
    stats.add_kernel_array(arr)
    _assert_t_monotone(before, in_t)


def _run_vanilla(net, res, excess, height, grl_every, stats):
    arr = array("q", bytes(64))
    t0 = time.perf_counter_ns()
    kernels.vanilla_loop(
        net.n, net.source, net.sink, net.first_out, net.adj, net.slot_to,
        res, excess, height, grl_every, arr,
    )
    stats.elapsed_ns += time.perf_counter_ns() - t0
    _check_kernel(arr)
    stats.add_kernel_array(arr)


def _assert_t_monotone(before, after):
    for u, b in enumerate(after):
        if b and not before[u]:
            raise InvariantError(f"t-side regained node {u}")


def _excess_array(net, f):
    """Nonnegative per-node excesses; terminals start at zero."""
    balance = node_imbalances(net, f)
    excess = array("q", bytes(8 * net.n))
    for u in range(net.n):
        if u != net.source and u != net.sink and balance[u] > 0:
            excess[u] = balance[u]
    return excess


def _extract_flow(net, res, m=None):
    m = net.m if m is None else m
    values = array("q", bytes(8 * m))
    caps = net.caps
    for i in range(m):
        values[i] = caps[i] - res[2 * i]
    return PseudoFlow(values)


def vanilla_push_relabel(net, preflow, heights=None, *, global_relabel_every=None, debug=False):
    """Plain Push-Relabel on a pre-flow with valid heights.

    With ``heights=None`` the classic cold labels (h(s)=n, all else 0) are
    used; they are only valid when every source arc is saturated, which the
    validity check enforces.  Returns the completed feasible flow and stats.
    """
    acc = flow_accounting(net, preflow)
    if acc.total_deficit:
        raise ValueError("input must be a pre-flow (deficits present)")
    if heights is None:
        hv = array("q", bytes(8 * net.n))
        hv[net.source] = net.n
        heights = HeightLabels(hv, net.n)
    if not heights_valid(net, preflow, heights):
        raise ValueError("heights are not valid for the given pre-flow")
    res = net.residual_array(preflow)
    excess = _excess_array(net, preflow)
    height = array("q", heights.values)
    stats = SolverStats(phase="vanilla")
    _run_vanilla(net, res, excess, height, _cadence(net, global_relabel_every), stats)
    out = cancel_terminal_cycles(net, _extract_flow(net, res))
    if debug:
        _debug_feasible(net, out)
    return out, stats


def _debug_feasible(net, f):
    acc = flow_accounting(net, f)
    if acc.classification != "feasible":
        raise InvariantError("solver output is not feasible")


def gap_warm_push_relabel(net, f, *, cut_only=False, global_relabel_every=None,
                          debug=False, phase="warm"):
    """Warm-start Push-Relabel with gap relabeling (pre-flow input).

    The main loop drains all excess from the monotonically shrinking t-side;
    the follow-up vanilla pass returns stranded s-side excess to the source
    unless ``cut_only`` is set, in which case the pre-flow and the discovered
    minimum cut are returned as-is.
    """
    acc = flow_accounting(net, f)
    if acc.total_deficit:
        raise ValueError("input must be a pre-flow (deficits present)")
    heights, cut0 = define_heights(net, f)  # raises when not cut-saturating
    res = net.residual_array(f)
    excess = _excess_array(net, f)
    height = array("q", heights.values)
    in_t = bytearray(cut0.t_side)
    grl = _cadence(net, global_relabel_every)
    stats = SolverStats(phase=phase)
    _run_gap(net, res, excess, height, in_t, grl, stats)
    if not cut_only:
        _run_vanilla(net, res, excess, height, grl, stats)
    out = _extract_flow(net, res)
    if not cut_only:
        cancel_terminal_cycles(net, out)
    cut = _make_cut(net, out, in_t)
    if debug:
        if not cut.saturated:
            raise InvariantError("returned cut is not saturated")
        if not cut_only:
            _debug_feasible(net, out)
    return out, cut, stats


class _BoundedRun:
    """Shared machinery for the bounded cold start and its doubling variant.

    Builds G' = G + super-source s* with arc (s*, s, eta), keeps the solver
    state alive between bound increases, and never lets the t-side regrow.
    """

    def __init__(self, net, eta, grl_every):
        if eta < 0:
            raise ValueError("eta must be nonnegative")
        if eta > CAPACITY_SUM_LIMIT:
            raise ValueError("eta exceeds the 64-bit accumulation limit")
        self.net = net
        self.eta = eta
        arcs = list(zip(net.tails, net.heads, net.caps))
        arcs.append((net.n, net.source, eta))
        self.gnet = Network(
            net.n + 1,
            net.n,
            net.sink,
            array("q", [a[0] for a in arcs]),
            array("q", [a[1] for a in arcs]),
            array("q", [a[2] for a in arcs]),
        )
        self.super_arc = net.m
        f_init = init_cold_preflow(self.gnet)
        heights, cut0 = define_heights(self.gnet, f_init)
        self.res = self.gnet.residual_array(f_init)
        self.excess = _excess_array(self.gnet, f_init)
        self.height = array("q", heights.values)
        self.in_t = bytearray(cut0.t_side)
        self.grl = grl_every if grl_every is not None else self.gnet.m
        self.stats = SolverStats(phase="bounded")

    def run_gap(self):
        _run_gap(self.gnet, self.res, self.excess, self.height, self.in_t,
                 self.grl, self.stats)
        return bool(self.in_t[self.net.source])  # exhausted: cut crosses (s*, s)

    def raise_bound(self):
        """Double eta and re-saturate the super arc, reusing flow and heights."""
        add = self.eta if self.eta > 0 else 1
        if self.eta + add > CAPACITY_SUM_LIMIT:
            raise InvariantError("doubling exceeded the capacity accumulation limit")
        # capacity grows by `add` and the new headroom is saturated at once,
        # so the forward residual stays 0 and the twin gains `add`.
        self.res[2 * self.super_arc + 1] += add
        self.excess[self.net.source] += add
        self.eta += add

    def finish(self, cut_only):
        if not cut_only:
            _run_vanilla(self.gnet, self.res, self.excess, self.height,
                         self.grl, self.stats)
        flow = _extract_flow(self.net, self.res)  # first m slots are G's arcs
        if not cut_only:
            cancel_terminal_cycles(self.net, flow)
        t_side = bytearray(self.in_t[: self.net.n])
        cut = _make_cut(self.net, flow, t_side)
        return flow, cut


def bounded_maxflow(net, eta, *, cut_only=False, global_relabel_every=None, debug=False):
    """Cold start through a super-source arc of capacity eta.

    When the discovered minimum cut crosses the artificial arc the bound was
    too small; that is reported as ``exhausted`` rather than an error, and the
    (feasible but possibly non-maximum) flow of value eta is still returned.
    """
    run = _BoundedRun(net, eta, _cadence(net, global_relabel_every))
    exhausted = run.run_gap()
    run.stats.phase = "bounded"
    flow, cut = run.finish(cut_only)
    if debug and not cut_only:
        _debug_feasible(net, flow)
    if exhausted:
        return BoundedOutcome(exhausted=True, flow=flow, cut=None, stats=run.stats, eta_used=eta)
    return BoundedOutcome(exhausted=False, flow=flow, cut=cut, stats=run.stats, eta_used=eta)


def bounded_maxflow_doubling(net, eta0=1, *, cut_only=False, global_relabel_every=None,
                             debug=False, phase="cold"):
    """Bounded cold start with geometric bound growth for unknown eta.

    The pre-flow and heights persist across bound increases, so the total
    work stays proportional to the true residual max-flow value.
    """
    if eta0 < 1:
        raise ValueError("eta0 must be at least 1")
    run = _BoundedRun(net, eta0, _cadence(net, global_relabel_every))
    run.stats.phase = phase
    while run.run_gap():
        run.raise_bound()
    flow, cut = run.finish(cut_only)
    if debug:
        if not cut.saturated:
            raise InvariantError("returned cut is not saturated")
        if not cut_only:
            _debug_feasible(net, flow)
    return flow, cut, run.stats


def solve_maxflow(net, *, cut_only=False, global_relabel_every=None, debug=False):
    """Canonical cold solve: doubling bounded start from eta0 = 1."""
    return bounded_maxflow_doubling(
        net, 1, cut_only=cut_only, global_relabel_every=global_relabel_every, debug=debug
    )


def cold_push_relabel(net, *, cut_only=False, global_relabel_every=None, debug=False):
    """Classic cold start: saturate the source arcs and run the gap-relabeling
    solver on the resulting pre-flow.  The benchmark baseline."""
    flow, cut, stats = gap_warm_push_relabel(
        net, init_cold_preflow(net), cut_only=cut_only,
        global_relabel_every=global_relabel_every, debug=debug, phase="cold",
    )
    return flow, cut, stats


def global_relabel(net, f, heights, cut_scope=None):
    """Fresh heights from exact residual BFS distances; never decreases any.

    With ``cut_scope`` (a CutPartition or t-side byte map) distances are
    computed within the t-side only and t-side nodes that lost their residual
    path to t are parked at height n.  Without a scope, nodes that cannot
    reach t get n plus their residual distance to s, per standard practice.
    """
    res = net.residual_array(f)
    n = net.n
    old = heights.values
    new = array("q", old)
    if cut_scope is not None:
        t_side = cut_scope.t_side if isinstance(cut_scope, CutPartition) else cut_scope
        dist = _scoped_t_distances(net, res, t_side)
        for u in range(n):
            if not t_side[u]:
                continue
            target = dist[u] if dist[u] >= 0 else n
            if target > new[u]:
                new[u] = target
    else:
        dist = _t_distances(net, res)
        dist_s = _scoped_source_distances(net, res, dist)
        for u in range(n):
            if dist[u] >= 0:
                target = dist[u]
            elif dist_s[u] >= 0:
                target = n + dist_s[u]
            else:
                target = old[u]
            if target > new[u]:
                new[u] = target
    return HeightLabels(new, n)


def _scoped_t_distances(net, res, t_side):
    dist = [-1] * net.n
    dist[net.sink] = 0
    q = deque([net.sink])
    first_out, adj, slot_to = net.first_out, net.adj, net.slot_to
    while q:
        v = q.popleft()
        dv = dist[v]
        for k in range(first_out[v], first_out[v + 1]):
            e = adj[k]
            u = slot_to[e]
            if t_side[u] and dist[u] < 0 and res[e ^ 1] > 0:
                dist[u] = dv + 1
                q.append(u)
    return dist


def _scoped_source_distances(net, res, dist_t):
    """Residual distances to s for nodes with no residual path to t."""
    dist = [-1] * net.n
    dist[net.source] = 0
    q = deque([net.source])
    first_out, adj, slot_to = net.first_out, net.adj, net.slot_to
    while q:
        v = q.popleft()
        dv = dist[v]
        for k in range(first_out[v], first_out[v + 1]):
            e = adj[k]
            u = slot_to[e]
            if dist_t[u] < 0 and dist[u] < 0 and res[e ^ 1] > 0:
                dist[u] = dv + 1
                q.append(u)
    return dist
