"""Rotated surface code and its XZZX variant on the ancilla-pair lattice.

Each plaquette owns a vertically oriented ancilla pair: the north member
couples the two northern corners, the south member the southern ones.
Z plaquettes collect parity onto one member, swap once mid-cycle so the
remaining corners can contribute, and read out the pair jointly; X
plaquettes sandwich the collector in Hadamards and need three swaps to
visit the corners in a hook-safe order (vertical X hooks and horizontal
Z hooks, both perpendicular to the matching logical path direction).

The XZZX variant conjugates one diagonal data sublattice by Hadamard,
realized as explicit basis-change gates around every coupling on those
qubits, with initialization and readout in the rotated product basis.
"""

from __future__ import annotations

import networkx as nx

from ..circuit import Circuit, CircuitBuilder
from . import CodeSpec
from .layout import Layout, Plaquette

# CX layer slot per corner role.  Besides hook direction (encoded in the
# collector's visit order) the slots must satisfy an ordering-consistency
# rule: each adjacent Z/X plaquette pair shares two data qubits, and the
# Z-before-X ordering must agree on both, otherwise the dressed pair
# measurement picks up a stray ancilla operator and loses determinism.
_SAFE = {
    "Z": {"NW": 1, "NE": 3, "SW": 5, "SE": 7},
    "z_swap": (4,),
    "X": {"NW": 2, "SW": 4, "NE": 6, "SE": 8},
    "x_swaps": (3, 5, 7),
    "h_pre": 0,
    "h_post": 9,
}
# Deliberately hook-inducing control: the X collector visits NW,NE then
# SW,SE so a single mid-cycle fault spreads to a horizontal data pair
# aligned with the logical-crossing direction.  Still order-consistent.
_UNSAFE = {
    "Z": {"NW": 1, "NE": 2, "SW": 4, "SE": 6},
    "z_swap": (3,),
    "X": {"NW": 3, "NE": 5, "SW": 7, "SE": 8},
    "x_swaps": (6, 9, 10),
    "h_pre": 0,
    "h_post": 11,
}
_NORTH_ROLES = ("NW", "NE")


class _LayerBuffer:
    """Collects gates per layer, then emits them TICK-separated with the
    matching depolarizing group right after each gate group."""

    def __init__(self, p_g1: float, p_g2: float):
        self.layers: dict[int, list[tuple[str, list[int]]]] = {}
        self.gate_noise = {
            "H": ("DEP1", p_g1),
            "S": ("DEP1", p_g1),
            "S_DAG": ("DEP1", p_g1),
            "CX": ("DEP2", p_g2),
            "SWAP": ("DEP2", p_g2),
        }

    def add(self, layer: int, kind: str, targets):
        self.layers.setdefault(layer, []).append((kind, list(targets)))

    def flush(self, b: CircuitBuilder):
        for layer in sorted(self.layers):
            groups: dict[str, list[int]] = {}
            order: list[str] = []
            for kind, targets in self.layers[layer]:
                if kind not in groups:
                    groups[kind] = []
                    order.append(kind)
                groups[kind].extend(targets)
            for kind in order:
                b.append(kind, groups[kind])
                noise = self.gate_noise.get(kind)
                if noise is not None:
                    b.append(noise[0], groups[kind], noise[1])
            b.tick()
        self.layers.clear()


def _rotated_layout(d: int) -> tuple[Layout, dict]:
    """Data on odd-odd sites, plaquette pairs at even-even centers."""
    lay = Layout()
    data_at: dict[tuple[int, int], int] = {}
    for y in range(1, 2 * d, 2):
        for x in range(1, 2 * d, 2):
            q = len(data_at)
            data_at[(x, y)] = q
            lay.data_coords[q] = (float(x), float(y))
    n_data = len(data_at)

    centers = []
    for cx in range(0, 2 * d + 1, 2):
        for cy in range(0, 2 * d + 1, 2):
            gx, gy = cx // 2, cy // 2
            x_type = (gx % 2) != (gy % 2)
            if (gx in (0, d)) and not x_type:
                continue
            if (gy in (0, d)) and x_type:
                continue
            if gx in (0, d) and gy in (0, d):
                continue
            if not (0 <= gx <= d and 0 <= gy <= d):
                continue
            centers.append((cx, cy, "X" if x_type else "Z"))
    centers.sort()

    next_q = n_data
    for cx, cy, kind in centers:
        corners = {}
        for role, (dx, dy) in (("NW", (-1, 1)), ("NE", (1, 1)), ("SW", (-1, -1)), ("SE", (1, -1))):
            pos = (cx + dx, cy + dy)
            if pos in data_at:
                corners[role] = data_at[pos]
        a_n, a_s = next_q, next_q + 1
        next_q += 2
        lay.ancilla_coords[a_n] = (float(cx), cy + 0.4)
        lay.ancilla_coords[a_s] = (float(cx), cy - 0.4)
        lay.pairs.append((a_n, a_s))
        lay.plaquettes.append(Plaquette((float(cx), float(cy)), kind, corners, (a_n, a_s)))

    # One extra pair completes the one-pair-per-data-qubit assignment used
    # for fault-tolerant data initialization and readout.
    extra = (next_q, next_q + 1)
    lay.pairs.append(extra)

    # Assign each data qubit an adjacent pair (the extra pair serves the
    # one qubit left over by a maximum matching).  Integer node labels keep
    # the matching deterministic across processes.
    g = nx.Graph()
    for i, p in enumerate(lay.plaquettes):
        for role, q in p.corners.items():
            g.add_edge(q, n_data + i)
    match = nx.bipartite.maximum_matching(g, top_nodes=list(range(n_data)))
    assign: dict[int, tuple[int, str]] = {}
    unmatched = []
    for q in range(n_data):
        if q in match:
            pi = match[q] - n_data
            role = next(r for r, qq in lay.plaquettes[pi].corners.items() if qq == q)
            assign[q] = (pi, role)
        else:
            unmatched.append(q)
    if len(unmatched) != 1:
        raise RuntimeError(f"readout-pair assignment failed: {len(unmatched)} leftover")
    qx = unmatched[0]
    x, y = lay.data_coords[qx]
    lay.ancilla_coords[extra[0]] = (x - 0.4, y - 0.6)
    lay.ancilla_coords[extra[1]] = (x + 0.4, y - 0.6)

    # Bulk unit cells: interior plaquette pair plus its NW data qubit.
    for i, p in enumerate(lay.plaquettes):
        cx, cy = p.center
        if 4 <= cx <= 2 * d - 4 and 4 <= cy <= 2 * d - 4 and len(p.corners) == 4:
            q = p.corners["NW"]
            x, y = lay.data_coords[q]
            if 3 <= x <= 2 * d - 3 and 3 <= y <= 2 * d - 3:
                lay.bulk_cells.append((q, p.pair[0], p.pair[1]))

    info = {
        "data_at": data_at,
        "n_data": n_data,
        "extra_pair": extra,
        "extra_data": qx,
        "assign": assign,
    }
    return lay, info


def _readout_member(lay: Layout, info: dict, q: int) -> int:
    if q == info["extra_data"]:
        return info["extra_pair"][0]
    pi, role = info["assign"][q]
    pair = lay.plaquettes[pi].pair
    return pair[0] if role in _NORTH_ROLES else pair[1]


def _pair_measure_block(b: CircuitBuilder, pairs, p_rr: float) -> list[int]:
    """Joint readout of each pair followed by reset for the next use."""
    flat = [q for pr in pairs for q in pr]
    b.append("DEP2", flat, p_rr)
    recs = []
    for a, s in pairs:
        recs.append(b.mzz(a, s, p_rr))
    b.tick()
    b.append("RESET_Z", flat)
    b.append("DEP2", flat, p_rr)
    b.tick()
    return recs


def _build_rotated(
    spec: CodeSpec, xzzx: bool, hook_unsafe: bool = False
) -> tuple[Circuit, Layout]:
    d = spec.distance
    noise = spec.noise
    lay, info = _rotated_layout(d)
    n_data = info["n_data"]
    ancillas = sorted(lay.ancilla_coords)
    b = CircuitBuilder(lay.n_qubits, ancillas)
    all_pair_qubits = [q for pr in lay.pairs for q in pr]
    data = list(range(n_data))

    # Diagonal sublattice carrying the X<->Z exchange in the XZZX variant.
    hset: set[int] = set()
    if xzzx:
        for (x, y), q in info["data_at"].items():
            if ((x + y) // 2) % 2 == 1:
                hset.add(q)

    def rotated(q: int) -> bool:
        return (q in hset) != (spec.basis == "X")

    sched = _UNSAFE if hook_unsafe else _SAFE

    def collector_member(pair, after_slot: int) -> int:
        """Which member holds the moving parity after a given slot."""
        return pair[sum(1 for s in sched["x_swaps"] if s <= after_slot) % 2]

    def emit_round(buf: _LayerBuffer):
        for p in lay.plaquettes:
            a_n, a_s = p.pair
            if p.kind == "X":
                buf.add(3 * sched["h_pre"], "H", [a_n])
            slots = sched[p.kind]
            for role, q in p.corners.items():
                slot = slots[role]
                member = p.pair[0] if role in _NORTH_ROLES else p.pair[1]
                layer = 3 * slot
                if q in hset:
                    buf.add(layer - 1, "H", [q])
                    buf.add(layer + 1, "H", [q])
                if p.kind == "Z":
                    buf.add(layer, "CX", [q, member])
                else:
                    buf.add(layer, "CX", [member, q])
            if p.kind == "Z":
                for s in sched["z_swap"]:
                    buf.add(3 * s, "SWAP", [a_n, a_s])
            else:
                for s in sched["x_swaps"]:
                    buf.add(3 * s, "SWAP", [a_n, a_s])
                post = collector_member(p.pair, sched["h_post"])
                buf.add(3 * sched["h_post"], "H", [post])

    # ---- fault-tolerant initialization --------------------------------
    b.append("RESET_Z", all_pair_qubits)
    b.append("DEP2", all_pair_qubits, noise.p_rr)
    b.tick()
    init_swaps = [t for q in data for t in (_readout_member(lay, info, q), q)]
    b.append("SWAP", init_swaps)
    b.append("DEP2", init_swaps, noise.p_g2)
    b.tick()
    b.append("RESET_Z", all_pair_qubits)
    b.append("DEP2", all_pair_qubits, noise.p_rr)
    b.tick()
    rot = [q for q in data if rotated(q)]
    if rot:
        b.append("H", rot)
        b.append("DEP1", rot, noise.p_g1)
        b.tick()

    # ---- T rounds of syndrome extraction -------------------------------
    rec: dict[tuple[int, int], int] = {}
    buf = _LayerBuffer(noise.p_g1, noise.p_g2)
    for r in range(1, spec.rounds + 1):
        emit_round(buf)
        buf.flush(b)
        recs = _pair_measure_block(b, [p.pair for p in lay.plaquettes], noise.p_rr)
        for i, p in enumerate(lay.plaquettes):
            rec[(r, i)] = recs[i]
        b.append("PAULI_XY", data, noise.p_t1)
        b.append("PAULI_Z", data, noise.p_t2)
        b.tick()

        first_kind = spec.basis  # Z-basis memory fixes Z plaquettes first
        for i, p in enumerate(lay.plaquettes):
            coord = (p.center[0], p.center[1], float(r))
            if r == 1:
                if p.kind == first_kind:
                    b.detector([rec[(1, i)]], coord)
            else:
                b.detector([rec[(r, i)], rec[(r - 1, i)]], coord)

    # ---- transversal readout through the ancilla pairs ------------------
    if rot:
        b.append("H", rot)
        b.append("DEP1", rot, noise.p_g1)
        b.tick()
    fin_swaps = [t for q in data for t in (q, _readout_member(lay, info, q))]
    b.append("SWAP", fin_swaps)
    b.append("DEP2", fin_swaps, noise.p_g2)
    b.tick()
    pair_of_data = {q: _readout_member(lay, info, q) for q in data}
    member_pair = {}
    for pr in lay.pairs:
        member_pair[pr[0]] = pr
        member_pair[pr[1]] = pr
    flat = [q for q in all_pair_qubits]
    b.append("DEP2", flat, noise.p_rr)
    data_rec: dict[int, int] = {}
    for q in data:
        a, s = member_pair[pair_of_data[q]]
        data_rec[q] = b.mzz(a, s, noise.p_rr)
    b.tick()

    T = spec.rounds
    for i, p in enumerate(lay.plaquettes):
        if p.kind != spec.basis:
            continue
        coord = (p.center[0], p.center[1], float(T + 1))
        b.detector([rec[(T, i)]] + [data_rec[q] for q in p.corners.values()], coord)

    if spec.basis == "Z":
        support = [info["data_at"][(1, y)] for y in range(1, 2 * d, 2)]
    else:
        support = [info["data_at"][(x, 1)] for x in range(1, 2 * d, 2)]
    b.observable(0, [data_rec[q] for q in support])

    return b.finish(), lay


def build_surface(spec: CodeSpec, hook_unsafe: bool = False) -> tuple[Circuit, Layout]:
    """Memory experiment for the rotated surface code."""
    return _build_rotated(spec, xzzx=False, hook_unsafe=hook_unsafe)


def build_xzzx(spec: CodeSpec, hook_unsafe: bool = False) -> tuple[Circuit, Layout]:
    """Memory experiment for the XZZX variant (diagonal basis exchange)."""
    return _build_rotated(spec, xzzx=True, hook_unsafe=hook_unsafe)
