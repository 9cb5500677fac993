"""Directed flow networks with paired residual arcs, plus pseudo-flow accounting.

The residual graph is never materialized as a separate object: every real arc
``i`` owns two *slots*, ``2*i`` (forward, capacity ``c_i``) and ``2*i + 1``
(its reverse twin, capacity 0).  A residual-capacity array indexed by slot is
all any solver needs; the twin of slot ``e`` is always ``e ^ 1``.

Capacities and flows are nonnegative 64-bit integers.  ``build_network``
rejects inputs whose total capacity could overflow signed-64 accumulation.
"""

from __future__ import annotations

from array import array
from collections import deque
from dataclasses import dataclass, field

# Sum of all capacities must stay below this so that excesses, cut values and
# doubling bounds never overflow an int64 accumulator.
CAPACITY_SUM_LIMIT = 1 << 61


class Network:
    """Immutable directed network with integer capacities and paired arc slots.

    Nodes are 0-based ints.  Parallel arcs are kept distinct; self-loops are
    rejected.  Nodes without both an s-u and a u-t path are marked *inert*:
    they are excluded from solving (zero flow, parked at height n).
    """

    __slots__ = (
        "n",
        "m",
        "source",
        "sink",
        "tails",
        "heads",
        "caps",
        "slot_to",
        "first_out",
        "adj",
        "inert",
        "_pair_index",
    )

    def __init__(self, n, source, sink, tails, heads, caps):
        self.n = n
        self.m = len(caps)
        self.source = source
        self.sink = sink
        self.tails = tails
        self.heads = heads
        self.caps = caps
        self._pair_index = None
        self._build_slots()
        self._mark_inert()

    def _build_slots(self):
        n, m = self.n, self.m
        tails, heads = self.tails, self.heads
        slot_to = array("q", bytes(16 * m))
        deg = [0] * n
        for i in range(m):
            slot_to[2 * i] = heads[i]
            slot_to[2 * i + 1] = tails[i]
            deg[tails[i]] += 1
            deg[heads[i]] += 1
        first_out = array("q", bytes(8 * (n + 1)))
        acc = 0
        for u in range(n):
            first_out[u] = acc
            acc += deg[u]
        first_out[n] = acc
        fill = list(first_out[:n])
        adj = array("q", bytes(16 * m))
        for i in range(m):
            u, v = tails[i], heads[i]
            adj[fill[u]] = 2 * i
            fill[u] += 1
            adj[fill[v]] = 2 * i + 1
            fill[v] += 1
        self.slot_to = slot_to
        self.first_out = first_out
        self.adj = adj

    def _mark_inert(self):
        """Forward BFS from s and backward BFS from t over positive-cap arcs."""
        from_s = self._reach(self.source, forward=True)
        to_t = self._reach(self.sink, forward=False)
        inert = bytearray(self.n)
        for u in range(self.n):
            if not (from_s[u] and to_t[u]):
                inert[u] = 1
        # Terminals are never treated as inert themselves.
        inert[self.source] = 0
        inert[self.sink] = 0
        self.inert = bytes(inert)

    def _reach(self, start, forward):
        seen = bytearray(self.n)
        seen[start] = 1
        q = deque([start])
        tails, heads, caps = self.tails, self.heads, self.caps
        out = [[] for _ in range(self.n)]
        for i in range(self.m):
            if caps[i] > 0:
                if forward:
                    out[tails[i]].append(heads[i])
                else:
                    out[heads[i]].append(tails[i])
        while q:
            u = q.popleft()
            for v in out[u]:
                if not seen[v]:
                    seen[v] = 1
                    q.append(v)
        return seen

    # -- lookups -----------------------------------------------------------

    def arc_ids(self, u, v):
        """Ids of all parallel arcs u->v, in construction order."""
        if self._pair_index is None:
            idx = {}
            for i in range(self.m):
                idx.setdefault((self.tails[i], self.heads[i]), []).append(i)
            self._pair_index = idx
        return self._pair_index.get((u, v), [])

    def out_slots(self, u):
        return self.adj[self.first_out[u] : self.first_out[u + 1]]

    def residual_array(self, flow):
        """Per-slot residual capacities for a capacity-respecting flow."""
        res = array("q", bytes(16 * self.m))
        caps, values = self.caps, flow.values
        for i in range(self.m):
            res[2 * i] = caps[i] - values[i]
            res[2 * i + 1] = values[i]
        return res

    def __repr__(self):
        return f"Network(n={self.n}, m={self.m}, s={self.source}, t={self.sink})"


class PseudoFlow:
    """Per-arc flow values obeying capacity constraints only."""

    __slots__ = ("values",)

    def __init__(self, values):
        self.values = values

    @classmethod
    def zeros(cls, net):
        return cls(array("q", bytes(8 * net.m)))

    @classmethod
    def from_arc_values(cls, net, mapping):
        """Build from {(u, v): flow} or {(u, v, ordinal): flow}; others zero."""
        values = array("q", bytes(8 * net.m))
        for key, val in mapping.items():
            if len(key) == 2:
                u, v = key
                ordinal = 0
            else:
                u, v, ordinal = key
            ids = net.arc_ids(u, v)
            if ordinal >= len(ids):
                raise ValueError(f"no arc ({u}, {v}) with ordinal {ordinal}")
            i = ids[ordinal]
            if not 0 <= val <= net.caps[i]:
                raise ValueError(f"flow {val} violates capacity {net.caps[i]} on arc ({u}, {v})")
            values[i] = val
        return cls(values)

    def copy(self):
        return PseudoFlow(array("q", self.values))

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __eq__(self, other):
        return isinstance(other, PseudoFlow) and self.values == other.values

    def __repr__(self):
        return f"PseudoFlow({list(self.values)})"


@dataclass
class FlowAccounting:
    """Excess/deficit bookkeeping for a pseudo-flow (terminals never counted)."""

    excess: dict
    deficit: dict
    value: int
    classification: str  # feasible | pre-flow | pseudo-flow
    total_excess: int
    total_deficit: int


@dataclass
class CutPartition:
    """An s-t bipartition; ``t_side[u]`` is 1 for T-side nodes."""

    t_side: bytes
    cut_capacity: int
    saturated: bool = False

    def s_nodes(self):
        return [u for u, b in enumerate(self.t_side) if not b]

    def t_nodes(self):
        return [u for u, b in enumerate(self.t_side) if b]

    def __contains__(self, u):
        return bool(self.t_side[u])


def build_network(node_count, arc_descriptions, source, sink):
    """Construct a Network from (tail, head, capacity) triples.

    Raises ValueError for a self-loop, an out-of-range id, a negative
    capacity, source == sink, or a total capacity that could overflow.
    """
    if node_count <= 0:
        raise ValueError("node_count must be positive")
    if source == sink:
        raise ValueError("source and sink must differ")
    for label, node in (("source", source), ("sink", sink)):
        if not 0 <= node < node_count:
            raise ValueError(f"{label} id {node} out of range")
    tails = array("q")
    heads = array("q")
    caps = array("q")
    total = 0
    for k, (u, v, c) in enumerate(arc_descriptions):
        if not (0 <= u < node_count and 0 <= v < node_count):
            raise ValueError(f"arc {k}: node id out of range: ({u}, {v})")
        if u == v:
            raise ValueError(f"arc {k}: self-loop at node {u}")
        if not isinstance(c, int) or isinstance(c, bool):
            raise ValueError(f"arc {k}: capacity must be an integer, got {c!r}")
        if c < 0:
            raise ValueError(f"arc {k}: negative capacity {c}")
        total += c
        if total > CAPACITY_SUM_LIMIT:
            raise ValueError("total capacity exceeds 64-bit accumulation limit")
        tails.append(u)
        heads.append(v)
        caps.append(c)
    return Network(node_count, source, sink, tails, heads, caps)


def flow_value(net, f):
    """Total flow leaving the source (not net of inflow)."""
    return sum(f.values[i] for i in range(net.m) if net.tails[i] == net.source)


def validate_capacities(net, f):
    values = f.values
    if len(values) != net.m:
        raise ValueError(f"flow has {len(values)} arcs, network has {net.m}")
    for i in range(net.m):
        if not 0 <= values[i] <= net.caps[i]:
            raise ValueError(
                f"capacity violation on arc {i} "
                f"({net.tails[i]}->{net.heads[i]}): {values[i]} not in [0, {net.caps[i]}]"
            )


def node_imbalances(net, f):
    """Signed inflow-minus-outflow per node (terminals included, raw)."""
    net_in = [0] * net.n
    values = f.values
    for i in range(net.m):
        v = values[i]
        if v:
            net_in[net.tails[i]] -= v
            net_in[net.heads[i]] += v
    return net_in

def flow_accounting(net, f):
    """Excess/deficit per non-terminal, flow value, and classification.

    Raises ValueError if f violates a capacity bound (a corrupted prediction
    that was not passed through ``cap_prediction``).
    """
    validate_capacities(net, f)
    balance = node_imbalances(net, f)
    excess = {}
    deficit = {}
    for u in range(net.n):
        if u == net.source or u == net.sink:
            continue
        b = balance[u]
        if b > 0:
            excess[u] = b
        elif b < 0:
            deficit[u] = -b
    total_excess = sum(excess.values())
    total_deficit = sum(deficit.values())
    if total_excess == 0 and total_deficit == 0:
        classification = "feasible"
    elif total_deficit == 0:
        classification = "pre-flow"
    else:
        classification = "pseudo-flow"
    return FlowAccounting(
        excess=excess,
        deficit=deficit,
        value=flow_value(net, f),
        classification=classification,
        total_excess=total_excess,
        total_deficit=total_deficit,
    )


def cap_prediction(net, raw):
    """Clamp raw predicted values to capacities; missing arcs default to zero.

    ``raw`` is a mapping {(u, v): value} / {(u, v, ordinal): value} or a
    sequence of per-arc values.  Negative values are rejected.  Arcs incident
    to inert nodes are forced to zero so inert nodes keep zero flow.
    """
    values = array("q", bytes(8 * net.m))
    if isinstance(raw, dict):
        for key, val in raw.items():
            if len(key) == 2:
                u, v = key
                ordinal = 0
            else:
                u, v, ordinal = key
            if val < 0:
                raise ValueError(f"negative predicted flow {val} on arc ({u}, {v})")
            ids = net.arc_ids(u, v)
            if ordinal >= len(ids):
                raise ValueError(f"prediction references missing arc ({u}, {v}) ordinal {ordinal}")
            i = ids[ordinal]
            values[i] = min(val, net.caps[i])
    else:
        seq = list(raw)
        if len(seq) != net.m:
            raise ValueError(f"prediction has {len(seq)} values, network has {net.m} arcs")
        for i, val in enumerate(seq):
            if val < 0:
                raise ValueError(f"negative predicted flow {val} on arc {i}")
            values[i] = min(val, net.caps[i])
    if any(net.inert):
        inert = net.inert
        for i in range(net.m):
            if inert[net.tails[i]] or inert[net.heads[i]]:
                values[i] = 0
    return PseudoFlow(values)


def residual_reachability_cut(net, f):
    """Cut induced by residual reachability to t, or None if s still reaches t.

    T is every node with a positive-residual path to t; when s is not among
    them the partition (V \\ T, T) is a saturated cut (forward arcs full,
    backward arcs empty).
    """
    res = net.residual_array(f)
    t_side = _residual_t_reach(net, res)
    if t_side[net.source]:
        return None
    return _cut_from_t_side(net, f, t_side)


def _residual_t_reach(net, res):
    """Backward BFS from t over positive-residual slots; bytearray marker."""
    t_side = bytearray(net.n)
    t_side[net.sink] = 1
    q = deque([net.sink])
    first_out, adj, slot_to = net.first_out, net.adj, net.slot_to
    while q:
        v = q.popleft()
        for k in range(first_out[v], first_out[v + 1]):
            e = adj[k]
            # slot e leaves v; its twin enters v, so res[e ^ 1] > 0 means
            # slot_to[e] can step to v in the residual graph.
            u = slot_to[e]
            if not t_side[u] and res[e ^ 1] > 0:
                t_side[u] = 1
                q.append(u)
    return t_side


def _cut_from_t_side(net, f, t_side, check=True):
    cap = 0
    saturated = True
    values = f.values if f is not None else None
    for i in range(net.m):
        tin = t_side[net.tails[i]]
        hin = t_side[net.heads[i]]
        if not tin and hin:
            cap += net.caps[i]
            if check and values is not None and values[i] != net.caps[i]:
                saturated = False
        elif tin and not hin:
            if check and values is not None and values[i] != 0:
                saturated = False
    return CutPartition(t_side=bytes(t_side), cut_capacity=cap, saturated=saturated)


def cut_capacity(net, t_side):
    cap = 0
    for i in range(net.m):
        if not t_side[net.tails[i]] and t_side[net.heads[i]]:
            cap += net.caps[i]
    return cap


def is_saturated_cut(net, f, t_side):
    """Every S->T arc carries its capacity and every T->S arc carries zero."""
    values = f.values
    for i in range(net.m):
        tin = t_side[net.tails[i]]
        hin = t_side[net.heads[i]]
        if not tin and hin and values[i] != net.caps[i]:
            return False
        if tin and not hin and values[i] != 0:
            return False
    return True


def reverse_network(net, f):
    """Mirror network and flow: arcs flip direction, terminals swap roles.

    Node and arc ids are preserved, so excess/deficit swap per node and
    reversing twice reproduces the original exactly.
    """
    rev = Network(
        net.n,
        net.sink,
        net.source,
        array("q", net.heads),
        array("q", net.tails),
        array("q", net.caps),
    )
    return rev, PseudoFlow(array("q", f.values))


@dataclass
class InducedResidual:
    """Residual subgraph on a node subset, with maps back to the parent.

    ``origin_slots[j]`` is the parent slot whose residual capacity became arc
    j's capacity; adding auxiliary flow back means increasing flow on even
    parent slots and decreasing it on odd ones.
    """

    network: Network
    nodes: tuple
    origin_slots: tuple
    node_of: dict = field(repr=False, default_factory=dict)


def induced_residual_subgraph(net, f, node_set):
    """Residual graph of f restricted to node_set (positive residuals only)."""
    nodes = sorted(node_set)
    if not nodes:
        raise ValueError("node_set must be nonempty")
    for u in nodes:
        if not 0 <= u < net.n:
            raise ValueError(f"node {u} out of range")
    res = net.residual_array(f)
    k, idmap, arcs, origins = _induced_arrays(net, res, nodes)
    if len(nodes) == 1:
        # A single node cannot anchor an arc; synthesize a trivial network by
        # adding an isolated companion so source != sink holds.
        sub = build_network(2, [], 0, 1)
        return InducedResidual(network=sub, nodes=tuple(nodes), origin_slots=(), node_of=idmap)
    src = idmap[nodes[0]]
    snk = idmap[nodes[1]]
    sub = Network(
        k,
        src,
        snk,
        array("q", [a[0] for a in arcs]),
        array("q", [a[1] for a in arcs]),
        array("q", [a[2] for a in arcs]),
    )
    return InducedResidual(network=sub, nodes=tuple(nodes), origin_slots=tuple(origins), node_of=idmap)


def _induced_arrays(net, res, nodes):
    """Shared helper: residual arcs with both endpoints inside ``nodes``."""
    idmap = {u: i for i, u in enumerate(nodes)}
    member = bytearray(net.n)
    for u in nodes:
        member[u] = 1
    arcs = []
    origins = []
    slot_to = net.slot_to
    for i in range(net.m):
        for e in (2 * i, 2 * i + 1):
            if res[e] <= 0:
                continue
            head = slot_to[e]
            tail = slot_to[e ^ 1]
            if member[tail] and member[head]:
                arcs.append((idmap[tail], idmap[head], res[e]))
                origins.append(e)
    return len(nodes), idmap, arcs, origins


def cancel_terminal_cycles(net, f):
    """Remove flow cycles through s or t from a feasible flow.

    The return passes of Push-Relabel may leave circulation through a
    terminal, which distorts the gross value (flow leaving s) even though the
    net value is correct.  Flow cycles never cross a saturated cut, so
    cancelling them preserves every cut certificate.
    """
    values = f.values
    _cancel_cycles_at(net, values, net.source, entering=True)
    _cancel_cycles_at(net, values, net.sink, entering=False)
    return f


def _cancel_cycles_at(net, values, node, entering):
    if entering:
        offenders = [i for i in range(net.m) if net.heads[i] == node and values[i] > 0]
    else:
        offenders = [i for i in range(net.m) if net.tails[i] == node and values[i] > 0]
    if not offenders:
        return
    out_arcs = [[] for _ in range(net.n)]
    for i in range(net.m):
        out_arcs[net.tails[i]].append(i)
    for i in offenders:
        while values[i] > 0:
            if entering:
                start, goal = node, net.tails[i]
            else:
                start, goal = net.heads[i], node
            path = _flow_path(net, values, out_arcs, start, goal, skip=i)
            if path is None:
                break  # no closing cycle: flow is not feasible; leave as-is
            delta = min(values[i], min(values[j] for j in path))
            values[i] -= delta
            for j in path:
                values[j] -= delta


def _flow_path(net, values, out_arcs, start, goal, skip):
    """DFS path start->goal along positive-flow arcs; list of arc ids or None."""
    if start == goal:
        return []
    seen = bytearray(net.n)
    seen[start] = 1
    stack = [(start, iter(out_arcs[start]))]
    trail = {}
    while stack:
        u, it = stack[-1]
        advanced = False
        for j in it:
            if j == skip or values[j] <= 0:
                continue
            v = net.heads[j]
            if seen[v]:
                continue
            seen[v] = 1
            trail[v] = j
            if v == goal:
                path = []
                while v != start:
                    path.append(trail[v])
                    v = net.tails[trail[v]]
                path.reverse()
                return path
            stack.append((v, iter(out_arcs[v])))
            advanced = True
            break
        if not advanced:
            stack.pop()
    return None


def apply_slot_flows(net, f, aux_flow_values, origin_slots):
    """Fold auxiliary arc flows back onto the parent flow via origin slots.

    Positive flow on a forward slot raises the parent arc's flow; on a twin
    slot it lowers it.  The combined result must stay within [0, capacity];
    violations indicate a broken origin map and raise.
    """
    values = f.values
    for j, amount in enumerate(aux_flow_values):
        if amount == 0:
            continue
        e = origin_slots[j]
        if e < 0:
            continue  # synthetic auxiliary arc with no parent
        i = e >> 1
        if e & 1:
            values[i] -= amount
        else:
            values[i] += amount
    validate_capacities(net, f)
    return f
