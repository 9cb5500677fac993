"""DIMACS max-flow and prediction-file formats.

DIMACS grammar accepted here: optional ``c`` comment lines, one problem line
``p max <nodes> <arcs>``, exactly one ``n <id> s`` and one ``n <id> t`` line,
and ``<arcs>`` lines ``a <tail> <head> <capacity>``; node ids are 1-based.
The canonical writer emits the problem line, the two node lines, then arcs in
construction order, so parse -> emit -> parse round-trips bit-exactly.

Prediction files carry one ``f <tail> <head> <value>`` line per arc with
nonzero predicted flow; repeated (tail, head) lines address parallel arcs in
construction order.
"""

from __future__ import annotations

from .network import Network, PseudoFlow, build_network


class FormatError(ValueError):
    """Malformed input file; message carries the 1-based line number."""


def _fail(lineno, message):
    raise FormatError(f"line {lineno}: {message}")


def parse_dimacs(text):
    n = m = None
    source = sink = None
    arcs = []
    last_line = 0
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        last_line = lineno
        line = rawline.strip()
        if not line or line.startswith("c"):
            continue
        tokens = line.split()
        kind = tokens[0]
        if kind == "p":
            if n is not None:
                _fail(lineno, "duplicate problem line")
            if len(tokens) != 4 or tokens[1] != "max":
                _fail(lineno, f"malformed problem line {line!r}")
            try:
                n, m = int(tokens[2]), int(tokens[3])
            except ValueError:
                _fail(lineno, f"malformed problem line {line!r}")
            if n < 2 or m < 0:
                _fail(lineno, f"invalid sizes in problem line {line!r}")
        elif kind == "n":
            if n is None:
                _fail(lineno, "node line before problem line")
            if len(tokens) != 3 or tokens[2] not in ("s", "t"):
                _fail(lineno, f"malformed node line {line!r}")
            try:
                node = int(tokens[1])
            except ValueError:
                _fail(lineno, f"malformed node id in {line!r}")
            if not 1 <= node <= n:
                _fail(lineno, f"node id {node} out of range 1..{n}")
            if tokens[2] == "s":
                if source is not None:
                    _fail(lineno, "duplicate source line")
                source = node - 1
            else:
                if sink is not None:
                    _fail(lineno, "duplicate sink line")
                sink = node - 1
        elif kind == "a":
            if n is None:
                _fail(lineno, "arc line before problem line")
            if len(arcs) >= m:
                _fail(lineno, f"arc count mismatch: more than {m} arcs")
            if len(tokens) != 4:
                _fail(lineno, f"malformed arc line {line!r}")
            try:
                u, v, cap = int(tokens[1]), int(tokens[2]), int(tokens[3])
            except ValueError:
                _fail(lineno, f"malformed arc line {line!r}")
            if not (1 <= u <= n and 1 <= v <= n):
                _fail(lineno, f"arc endpoint out of range in {line!r}")
            if cap < 0:
                _fail(lineno, f"negative capacity in {line!r}")
            arcs.append((u - 1, v - 1, cap))
        else:
            _fail(lineno, f"unknown line type {kind!r}")
    if n is None:
        _fail(last_line or 1, "missing problem line")
    if source is None or sink is None:
        _fail(last_line, "missing source or sink line")
    if source == sink:
        _fail(last_line, "source and sink coincide")
    if len(arcs) != m:
        _fail(last_line, f"arc count mismatch: declared {m}, found {len(arcs)}")
    return build_network(n, arcs, source, sink)


def emit_dimacs(net):
    lines = [f"p max {net.n} {net.m}", f"n {net.source + 1} s", f"n {net.sink + 1} t"]
    for i in range(net.m):
        lines.append(f"a {net.tails[i] + 1} {net.heads[i] + 1} {net.caps[i]}")
    return "\n".join(lines) + "\n"


def parse_prediction(text, net):
    """Per-arc raw values from ``f`` lines; missing arcs are zero.

    Parallel arcs are addressed by repetition order.  Values are validated as
    nonnegative integers but deliberately not capped; pass the result through
    ``cap_prediction``.
    """
    values = [0] * net.m
    seen = {}
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.strip()
        if not line or line.startswith("c"):
            continue
        tokens = line.split()
        if tokens[0] != "f" or len(tokens) != 4:
            _fail(lineno, f"malformed prediction line {line!r}")
        try:
            u, v, val = int(tokens[1]), int(tokens[2]), int(tokens[3])
        except ValueError:
            _fail(lineno, f"malformed prediction line {line!r}")
        if not (1 <= u <= net.n and 1 <= v <= net.n):
            _fail(lineno, f"node id out of range in {line!r}")
        if val < 0:
            _fail(lineno, f"negative predicted flow in {line!r}")
        ordinal = seen.get((u, v), 0)
        seen[(u, v)] = ordinal + 1
        ids = net.arc_ids(u - 1, v - 1)
        if ordinal >= len(ids):
            _fail(lineno, f"no arc ({u}, {v}) with ordinal {ordinal} in the network")
        values[ids[ordinal]] = val
    return values


def emit_prediction(net, flow):
    values = flow.values if isinstance(flow, PseudoFlow) else flow
    lines = []
    for i in range(net.m):
        if values[i]:
            lines.append(f"f {net.tails[i] + 1} {net.heads[i] + 1} {values[i]}")
    return "\n".join(lines) + ("\n" if lines else "")
