"""Detector error model extraction and the weighted matching graph.

Every elementary fault of a circuit is propagated to its symptom (set of
flipped detectors plus logical-observable mask).  Graphlike symptoms (at
most two detectors) become weighted edges; larger symptoms are decomposed
into existing graphlike pieces whose symptoms XOR back to the original,
and an undecomposable fault is a hard error because matching would
silently lose correctness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .circuit import Circuit
from .sampler import fault_symptoms

BOUNDARY = -1

_P_FLOOR = 1e-15


@dataclass
class DemEdge:
    u: int
    v: int  # detector index or BOUNDARY
    p: float
    weight: float
    mask: int
    provenance: tuple[int, ...] = ()

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.u, self.v, self.mask)


@dataclass
class DetectorErrorGraph:
    n_detectors: int
    n_observables: int
    edges: list[DemEdge] = field(default_factory=list)
    flagged: list[int] = field(default_factory=list)  # indices with p >= 0.5

    def neighbors(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for i, e in enumerate(self.edges):
            out.setdefault(e.u, []).append(i)
            out.setdefault(e.v, []).append(i)
        return out

    def to_text(self) -> str:
        lines = [f"dem {self.n_detectors} {self.n_observables}"]
        for e in self.edges:
            v = "B" if e.v == BOUNDARY else str(e.v)
            lines.append(f"edge {e.u} {v} {e.p!r} {e.weight!r} {e.mask}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "DetectorErrorGraph":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        head = lines[0].split()
        g = cls(int(head[1]), int(head[2]))
        for ln in lines[1:]:
            t = ln.split()
            v = BOUNDARY if t[2] == "B" else int(t[2])
            g.edges.append(DemEdge(int(t[1]), v, float(t[3]), float(t[4]), int(t[5])))
        g.flagged = [i for i, e in enumerate(g.edges) if e.p >= 0.5]
        return g


class UndecomposableFaultError(ValueError):
    pass


def _xor_p(p1: float, p2: float) -> float:
    return p1 * (1.0 - p2) + p2 * (1.0 - p1)


def _decompose(
    dets: tuple[int, ...],
    mask: int,
    pieces: dict[int, list[tuple[frozenset[int], int]]],
) -> list[tuple[frozenset[int], int]] | None:
    """Partition ``dets`` into available graphlike symptoms so the masks
    XOR to ``mask``.  Pieces is detector -> [(symptom dets, mask)]."""
    if not dets:
        return [] if mask == 0 else None
    d0 = dets[0]
    remaining = set(dets)
    for sym, m in pieces.get(d0, ()):
        if not sym <= remaining:
            continue
        rest = tuple(sorted(remaining - sym))
        sub = _decompose(rest, mask ^ m, pieces)
        if sub is not None:
            return [(sym, m)] + sub
    return None


def extract(circuit: Circuit) -> DetectorErrorGraph:
    """Build the weighted matching graph from a circuit's fault set."""
    faults = fault_symptoms(circuit)
    merged: dict[tuple[frozenset[int], int], tuple[float, list[int]]] = {}
    for idx, f in enumerate(faults):
        if f.probability <= 0.0:
            continue
        if not f.detectors:
            if f.obs_mask != 0:
                raise UndecomposableFaultError(
                    f"fault {idx} (instruction {f.instruction}) flips an observable "
                    "without any detector"
                )
            continue
        key = (f.detectors, f.obs_mask)
        if key in merged:
            p, prov = merged[key]
            merged[key] = (_xor_p(p, f.probability), prov + [idx])
        else:
            merged[key] = (f.probability, [idx])

    graphlike: dict[tuple[frozenset[int], int], tuple[float, list[int]]] = {}
    hyper: list[tuple[frozenset[int], int, float, list[int]]] = []
    for (dets, mask), (p, prov) in merged.items():
        if len(dets) <= 2:
            graphlike[(dets, mask)] = (p, prov)
        else:
            hyper.append((dets, mask, p, prov))

    # Decompose hyperedges into already-present graphlike symptoms.
    pieces: dict[int, list[tuple[frozenset[int], int]]] = {}
    for dets, mask in graphlike:
        d0 = min(dets)
        pieces.setdefault(d0, []).append((dets, mask))
    for d in pieces:
        pieces[d].sort(key=lambda s: -len(s[0]))  # prefer pair pieces

    for dets, mask, p, prov in hyper:
        combo = _decompose(tuple(sorted(dets)), mask, pieces)
        if combo is None:
            raise UndecomposableFaultError(
                f"fault with detectors {sorted(dets)} mask {mask} cannot be "
                "decomposed into existing graphlike faults"
            )
        for sym, m in combo:
            p0, prov0 = graphlike[(sym, m)]
            graphlike[(sym, m)] = (_xor_p(p0, p), prov0 + prov)

    g = DetectorErrorGraph(len(circuit.detectors), circuit.n_observables)
    for (dets, mask), (p, prov) in sorted(
        graphlike.items(), key=lambda kv: (sorted(kv[0][0]), kv[0][1])
    ):
        if p < _P_FLOOR:
            continue
        ds = sorted(dets)
        u = ds[0]
        v = ds[1] if len(ds) == 2 else BOUNDARY
        if p < 0.5:
            w = math.log((1.0 - p) / p)
        else:
            w = math.log((1.0 - p) / p) if p < 1.0 else -math.inf
            g.flagged.append(len(g.edges))
        g.edges.append(DemEdge(u, v, p, w, mask, tuple(prov)))
    return g


@dataclass(frozen=True)
class GraphStats:
    n_nodes: int
    n_edges: int
    min_logical_path: int | None
    n_components: int


def _components(graph: DetectorErrorGraph) -> list[int]:
    """Component label per detector; boundary edges do not merge components."""
    parent = list(range(graph.n_detectors))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for e in graph.edges:
        if e.v != BOUNDARY:
            ra, rb = find(e.u), find(e.v)
            if ra != rb:
                parent[ra] = rb
    return [find(i) for i in range(graph.n_detectors)]


def min_logical_path(graph: DetectorErrorGraph) -> int | None:
    """Fewest edges whose symptom cancels while flipping an observable.

    Searched as the shortest odd-mask closed walk in a parity-doubled
    graph; the boundary node participates like a regular node, so
    boundary-to-boundary logical paths are covered.
    """
    n = graph.n_detectors
    bnode = n  # boundary mapped to index n
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n + 1)]
    masks_present = 0
    for e in graph.edges:
        v = bnode if e.v == BOUNDARY else e.v
        adj[e.u].append((v, e.mask))
        adj[v].append((e.u, e.mask))
        masks_present |= e.mask
    if masks_present == 0:
        return None
    best: int | None = None
    n_bits = masks_present.bit_length()
    for bit in range(n_bits):
        if not masks_present >> bit & 1:
            continue
        sources = set()
        for e in graph.edges:
            if e.mask >> bit & 1:
                sources.add(e.u)
                sources.add(bnode if e.v == BOUNDARY else e.v)
        for s in sources:
            # BFS over (node, parity of chosen observable bit)
            dist = {(s, 0): 0}
            frontier = [(s, 0)]
            while frontier:
                nxt = []
                for node, par in frontier:
                    d = dist[(node, par)]
                    if best is not None and d >= best:
                        continue
                    for other, mask in adj[node]:
                        np_ = par ^ (mask >> bit & 1)
                        key = (other, np_)
                        if key not in dist:
                            dist[key] = d + 1
                            nxt.append(key)
                frontier = nxt
            if (s, 1) in dist and (best is None or dist[(s, 1)] < best):
                best = dist[(s, 1)]
    return best


def graph_stats(graph: DetectorErrorGraph) -> GraphStats:
    if not graph.edges:
        return GraphStats(0, 0, None, 0)
    labels = _components(graph)
    touched = {labels[e.u] for e in graph.edges} | {
        labels[e.v] for e in graph.edges if e.v != BOUNDARY
    }
    return GraphStats(
        n_nodes=graph.n_detectors + 1,
        n_edges=len(graph.edges),
        min_logical_path=min_logical_path(graph),
        n_components=len(touched),
    )
