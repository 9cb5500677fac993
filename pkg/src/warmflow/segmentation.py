"""Image-sequence segmentation benchmark.

Builds the standard seeded graph-cut network over a grayscale image: one node
per pixel plus object/background terminals, 4-neighborhood arcs with contrast
penalty beta = C * exp(-(Ip - Iq)^2 / (2 sigma^2)) rounded down, and
terminal arcs of capacity M large enough (C * |V|^2) never to sit in an
optimal cut.  Consecutive frames share topology, so an optimal flow projects
onto the next frame by rounding down to the new capacities; the projected
flow plus the previous cut seed the warm-start pipeline.
"""

from __future__ import annotations

import logging
import math
import random
import time
from dataclasses import dataclass, field

from .engine import cold_push_relabel
from .network import build_network, cap_prediction, flow_accounting, flow_value
from .oracle import reference_maxflow
from .pipeline import WarmStartOptions, warm_start_solve
from .prediction import prediction_error

log = logging.getLogger("warmflow.segmentation")

CSV_COLUMNS = (
    "frame,mode,eta,sigma,imbalance,flow_value,cut_capacity,"
    "pushes_sat,pushes_unsat,relabels,gap_events,global_relabels,phase,elapsed_ns"
)
CSV_VERSION = "c warmflow-seq-csv 1"


@dataclass(frozen=True)
class Image:
    width: int
    height: int
    pixels: bytes  # row-major intensities, 0..255

    def at(self, r, c):
        return self.pixels[r * self.width + c]


@dataclass(frozen=True)
class SeedSets:
    object_seeds: frozenset
    background_seeds: frozenset

    def validate(self, image):
        if not self.object_seeds or not self.background_seeds:
            raise ValueError("both seed sets must be nonempty")
        if self.object_seeds & self.background_seeds:
            raise ValueError("object and background seeds overlap")
        for r, c in self.object_seeds | self.background_seeds:
            if not (0 <= r < image.height and 0 <= c < image.width):
                raise ValueError(f"seed ({r}, {c}) outside the image")


@dataclass
class SegmentationConfig:
    penalty_scale: int = 100  # C
    sigma_noise: float = 30.0
    terminal_cap: int | None = None  # M; default C * |V|^2 per image

    def validate(self, n_nodes):
        if self.penalty_scale < 1:
            raise ValueError("penalty scale C must be at least 1")
        if self.sigma_noise <= 0:
            raise ValueError("sigma_noise must be positive")
        m = self.resolved_terminal_cap(n_nodes)
        if m < self.penalty_scale * n_nodes * n_nodes:
            raise ValueError("terminal capacity M must be at least C * |V|^2")
        return m

    def resolved_terminal_cap(self, n_nodes):
        if self.terminal_cap is not None:
            return self.terminal_cap
        return self.penalty_scale * n_nodes * n_nodes


# ---------------------------------------------------------------------------
# PGM / PPM


def load_pgm(path):
    with open(path, "rb") as fh:
        data = fh.read()
    return parse_pgm(data)


def parse_pgm(data):
    magic, fields, offset = _read_pnm_header(data, want=3)
    if magic not in (b"P2", b"P5"):
        raise ValueError(f"unsupported format {magic.decode('ascii', 'replace')!r}: not a P2/P5 PGM")
    width, height, maxval = fields
    if width <= 0 or height <= 0:
        raise ValueError("image dimensions must be positive")
    if maxval > 255:
        raise ValueError(f"maxval {maxval} exceeds 255")
    count = width * height
    if magic == b"P5":
        payload = data[offset : offset + count]
        if len(payload) < count:
            raise ValueError("truncated P5 payload")
        pixels = bytes(payload)
    else:
        tokens = _ascii_tokens(data[offset:])
        if len(tokens) < count:
            raise ValueError("truncated P2 payload")
        try:
            pixels = bytes(int(t) for t in tokens[:count])
        except ValueError as exc:
            raise ValueError(f"malformed P2 payload: {exc}") from None
    if any(p > maxval for p in pixels):
        raise ValueError("pixel value exceeds declared maxval")
    return Image(width=width, height=height, pixels=pixels)


def _read_pnm_header(data, want):
    """Magic plus `want` integer fields, honoring '#' comments; returns the
    offset one whitespace byte past the last field."""
    if len(data) < 2:
        raise ValueError("malformed header: file too short")
    magic = data[:2]
    pos = 2
    fields = []
    while len(fields) < want:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        token = data[start:pos]
        if not token:
            raise ValueError("malformed header: missing fields")
        try:
            fields.append(int(token))
        except ValueError:
            raise ValueError(f"malformed header token {token!r}") from None
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise ValueError("malformed header: expected whitespace after maxval")
    return magic, fields, pos + 1


def _ascii_tokens(blob):
    out = []
    for line in blob.split(b"\n"):
        if b"#" in line:
            line = line.split(b"#", 1)[0]
        out.extend(line.split())
    return out


def write_pgm(path, image, binary=True):
    with open(path, "wb") as fh:
        fh.write(encode_pgm(image, binary=binary))


def encode_pgm(image, binary=True):
    header = f"{'P5' if binary else 'P2'}\n{image.width} {image.height}\n255\n".encode()
    if binary:
        return header + image.pixels
    rows = []
    for r in range(image.height):
        row = image.pixels[r * image.width : (r + 1) * image.width]
        rows.append(" ".join(str(p) for p in row))
    return header + ("\n".join(rows) + "\n").encode()


def write_overlay_ppm(path, image, t_side):
    """P6 overlay: pixels whose cut side differs from a 4-neighbor's in red."""
    w, h = image.width, image.height
    rgb = bytearray(3 * w * h)
    for r in range(h):
        for c in range(w):
            idx = r * w + c
            side = t_side[idx]
            boundary = (
                (c + 1 < w and t_side[idx + 1] != side)
                or (c > 0 and t_side[idx - 1] != side)
                or (r + 1 < h and t_side[idx + w] != side)
                or (r > 0 and t_side[idx - w] != side)
            )
            if boundary:
                rgb[3 * idx : 3 * idx + 3] = b"\xff\x00\x00"
            else:
                g = image.pixels[idx]
                rgb[3 * idx : 3 * idx + 3] = bytes((g, g, g))
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode() + bytes(rgb))


# ---------------------------------------------------------------------------
# Graph construction


def boundary_penalty(ip, iq, config):
    """Contrast penalty between neighboring intensities, rounded down."""
    d = ip - iq
    beta = config.penalty_scale * math.exp(-(d * d) / (2.0 * config.sigma_noise**2))
    return int(beta)


def build_seg_network(image, seeds, config=None):
    """Pixel-grid flow network; source is the object terminal, sink the
    background terminal."""
    config = config or SegmentationConfig()
    seeds.validate(image)
    w, h = image.width, image.height
    n = w * h + 2
    m_cap = config.validate(n)
    s = w * h
    t = w * h + 1
    arcs = []
    px = image.pixels
    for r in range(h):
        base = r * w
        for c in range(w):
            p = base + c
            if c + 1 < w:
                beta = boundary_penalty(px[p], px[p + 1], config)
                arcs.append((p, p + 1, beta))
                arcs.append((p + 1, p, beta))
            if r + 1 < h:
                beta = boundary_penalty(px[p], px[p + w], config)
                arcs.append((p, p + w, beta))
                arcs.append((p + w, p, beta))
    for r, c in sorted(seeds.object_seeds):
        arcs.append((s, r * w + c, m_cap))
    for r, c in sorted(seeds.background_seeds):
        arcs.append((r * w + c, t, m_cap))
    return build_network(n, arcs, s, t)


def project_flow(old_net, old_flow, new_net):
    """Round the previous optimum down onto the new capacities.

    Topology must match arc-for-arc; only capacities may differ.  Arcs whose
    capacity dropped below their flow lose the difference, producing excess
    upstream and deficit downstream.
    """
    if (
        old_net.n != new_net.n
        or old_net.m != new_net.m
        or old_net.tails != new_net.tails
        or old_net.heads != new_net.heads
        or old_net.source != new_net.source
        or old_net.sink != new_net.sink
    ):
        raise ValueError("networks do not share a topology")
    return cap_prediction(new_net, list(old_flow.values))


# ---------------------------------------------------------------------------
# Synthetic sequences


def generate_synthetic_sequence(frames, size, square_size, step, noise_seed,
                                bg_level=210, fg_level=150, noise=5):
    """Dark square sliding over a light background with mild pixel noise.

    The noise field is a static per-sequence texture, so consecutive frames
    differ only where the square moved (that is what makes the previous
    optimum a good prediction).  The object seed is the square's center in
    the first frame and the four image corners are background seeds; seed
    sets are shared by every frame.
    """
    if square_size >= size:
        raise ValueError("square must be smaller than the image")
    x_last = 1 + (frames - 1) * step
    if x_last + square_size > size:
        raise ValueError("square leaves the image before the sequence ends")
    rng = random.Random(noise_seed)
    texture = [rng.randint(-noise, noise) for _ in range(size * size)]
    y0 = (size - square_size) // 2
    seeds = SeedSets(
        object_seeds=frozenset({(y0 + square_size // 2, 1 + square_size // 2)}),
        background_seeds=frozenset({(0, 0), (0, size - 1), (size - 1, 0), (size - 1, size - 1)}),
    )
    out = []
    for i in range(frames):
        x0 = 1 + i * step
        pixels = bytearray(size * size)
        for r in range(size):
            for c in range(size):
                p = r * size + c
                base = fg_level if (y0 <= r < y0 + square_size and x0 <= c < x0 + square_size) else bg_level
                pixels[p] = min(255, max(0, base + texture[p]))
        out.append((Image(width=size, height=size, pixels=bytes(pixels)), seeds))
    return out


# ---------------------------------------------------------------------------
# Benchmark harness


@dataclass
class FrameResult:
    frame: int
    mode: str
    eta: int | None
    sigma: int | None
    imbalance: int | None
    flow_value: int
    cut_capacity: int
    t_side: bytes
    phase_stats: list  # (phase, SolverStats)

    def total_ops(self):
        return sum(s.total_ops() for _, s in self.phase_stats)


@dataclass
class SequenceReport:
    mode: str
    frames: list = field(default_factory=list)

    def csv(self, timing=False):
        lines = [CSV_VERSION, CSV_COLUMNS]
        for fr in self.frames:
            eta = "" if fr.eta is None else fr.eta
            sigma = "" if fr.sigma is None else fr.sigma
            imb = "" if fr.imbalance is None else fr.imbalance
            for phase, st in fr.phase_stats:
                ns = st.elapsed_ns if timing else 0
                lines.append(
                    f"{fr.frame},{fr.mode},{eta},{sigma},{imb},{fr.flow_value},"
                    f"{fr.cut_capacity},{st.pushes_sat},{st.pushes_unsat},{st.relabels},"
                    f"{st.gap_events},{st.global_relabels},{phase},{ns}"
                )
        return "\n".join(lines) + "\n"


def run_sequence(sequence, mode, config=None, *, seed_strategy="predicted_cut",
                 overlay_dir=None, check_oracle=False,
                 global_relabel_every=None):
    """Solve an image sequence cold or warm and report per-phase counters.

    Warm mode projects each frame's optimal flow onto the next frame and
    seeds the pipeline with it plus, under the default strategy, the previous
    minimum cut.  The first frame is always solved cold.
    """
    if not sequence:
        raise ValueError("sequence must be nonempty")
    if mode not in ("cold", "warm"):
        raise ValueError(f"unknown mode {mode!r}")
    config = config or SegmentationConfig()
    report = SequenceReport(mode=mode)
    prev_net = prev_flow = prev_cut = None
    for idx, (image, seeds) in enumerate(sequence):
        net = build_seg_network(image, seeds, config)
        n_pixels = image.width * image.height
        if mode == "cold" or idx == 0:
            t0 = time.perf_counter_ns()
            flow, cut, stats = cold_push_relabel(net, global_relabel_every=global_relabel_every)
            stats.elapsed_ns = time.perf_counter_ns() - t0
            fr = FrameResult(
                frame=idx, mode=mode, eta=None, sigma=None, imbalance=None,
                flow_value=flow_value(net, flow), cut_capacity=cut.cut_capacity,
                t_side=cut.t_side, phase_stats=[("cold", stats)],
            )
        else:
            prediction = project_flow(prev_net, prev_flow, net)
            err = prediction_error(net, prediction)
            opts = WarmStartOptions(
                eta=None, mode="full_flow", early_termination=False,
                seed_strategy=seed_strategy,
                predicted_cut=prev_cut if seed_strategy == "predicted_cut" else None,
                global_relabel_every=global_relabel_every,
            )
            sol = warm_start_solve(net, prediction, opts)
            fr = FrameResult(
                frame=idx, mode=mode, eta=err.eta, sigma=err.sigma,
                imbalance=err.imbalance, flow_value=sol.value,
                cut_capacity=sol.cut.cut_capacity, t_side=sol.cut.t_side,
                phase_stats=[(r.phase, r.stats) for r in sol.phase_reports],
            )
            flow, cut = sol.flow, sol.cut
        _assert_terminal_arcs_uncut(net, cut)
        if check_oracle:
            ref = reference_maxflow(net)
            if ref.value != fr.flow_value or ref.value != fr.cut_capacity:
                raise RuntimeError(
                    f"frame {idx}: solver value {fr.flow_value} != oracle {ref.value}"
                )
        if overlay_dir is not None:
            write_overlay_ppm(
                f"{overlay_dir}/frame{idx:03d}_{mode}.ppm", image, cut.t_side[:n_pixels]
            )
        report.frames.append(fr)
        prev_net, prev_flow, prev_cut = net, flow, cut
        log.info("frame %d (%s): value=%d ops=%d", idx, mode, fr.flow_value, fr.total_ops())
    return report


def _assert_terminal_arcs_uncut(net, cut):
    for i in range(net.m):
        u, v = net.tails[i], net.heads[i]
        if net.caps[i] == 0:
            continue
        if u == net.source and cut.t_side[v]:
            raise RuntimeError("object-terminal arc crossed the cut: inconsistent seeds")
        if v == net.sink and not cut.t_side[u]:
            raise RuntimeError("background-terminal arc crossed the cut: inconsistent seeds")
    return True
