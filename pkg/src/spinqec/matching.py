"""Minimum-weight perfect matching decoder over a detector error graph.

Defects are paired along shortest paths of the weighted graph: the
complete graph over the fired detectors (plus one virtual boundary twin
per defect) is matched exactly with the blossom algorithm, and the
observable prediction is the XOR of edge masks along all matched paths.

Weights are scaled to integers once per graph so matching arithmetic is
exact; edges flagged with p >= 0.5 enter the path metric at zero cost.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from ._blossom import max_weight_matching
from .dem import BOUNDARY, DetectorErrorGraph
from .sampler import ShotBatch

_WEIGHT_SCALE = 1 << 16
_APSP_LIMIT = 4096


class InfeasibleMatchingError(ValueError):
    pass


@dataclass
class BatchDecodeResult:
    predictions: np.ndarray  # (shots, n_observables) bool
    failures: int
    shots: int

    @property
    def failure_rate(self) -> float:
        return self.failures / self.shots if self.shots else 0.0


class MatchingDecoder:
    """Decoder state precomputed from one DetectorErrorGraph."""

    def __init__(self, graph: DetectorErrorGraph, apsp_limit: int = _APSP_LIMIT):
        self.graph = graph
        self.n_det = graph.n_detectors
        self.n_obs = graph.n_observables
        n = self.n_det + 1  # trailing boundary node
        self._bnode = self.n_det

        # Min-weight parallel edge per (u, v) defines the path metric.
        metric: dict[tuple[int, int], tuple[int, int]] = {}
        for e in graph.edges:
            v = self._bnode if e.v == BOUNDARY else e.v
            a, b = min(e.u, v), max(e.u, v)
            w = max(int(round(e.weight * _WEIGHT_SCALE)), 0)
            cur = metric.get((a, b))
            if cur is None or w < cur[0]:
                metric[(a, b)] = (w, e.mask)
        self._edge_mask = {k: m for k, (w, m) in metric.items()}
        rows, cols, vals = [], [], []
        for (a, b), (w, _) in metric.items():
            rows.append(a)
            cols.append(b)
            # scipy treats exact zeros as absent; bump to 1 (1/65536 of a
            # unit weight) to keep zero-cost edges in the graph.
            vals.append(max(w, 1))
        self._csr = csr_matrix(
            (np.asarray(vals, dtype=np.int64), (np.asarray(rows), np.asarray(cols))),
            shape=(n, n),
        )
        # Components over detector nodes only: the boundary row is removed
        # so it cannot merge unrelated code sectors.
        det_only = self._csr[: self.n_det, : self.n_det]
        self._n_comp, self._comp = connected_components(det_only, directed=False)

        self._use_apsp = n <= apsp_limit
        self._dist: np.ndarray | None = None
        self._pred: np.ndarray | None = None

    # -- shortest-path infrastructure -----------------------------------
    def _ensure_apsp(self):
        if self._dist is None:
            self._dist, self._pred = shortest_path(
                self._csr, method="D", directed=False, return_predecessors=True
            )

    def _paths_from(self, sources: list[int]) -> tuple[np.ndarray, np.ndarray]:
        if self._use_apsp:
            self._ensure_apsp()
            idx = np.asarray(sources)
            return self._dist[idx], self._pred[idx]
        dist, pred = shortest_path(
            self._csr, method="D", directed=False, indices=sources, return_predecessors=True
        )
        return np.atleast_2d(dist), np.atleast_2d(pred)

    def _path_mask(self, pred_row: np.ndarray, src: int, dst: int) -> int:
        mask = 0
        node = dst
        while node != src:
            prev = int(pred_row[node])
            if prev < 0:
                raise InfeasibleMatchingError(f"no path between detectors {src} and {dst}")
            key = (min(prev, node), max(prev, node))
            mask ^= self._edge_mask[key]
            node = prev
        return mask

    # -- decoding ---------------------------------------------------------
    def decode(self, syndrome) -> int:
        """Observable-flip prediction (bitmask) for a set of fired detectors."""
        mask, _ = self.decode_with_weight(syndrome)
        return mask

    def decode_with_weight(self, syndrome) -> tuple[int, float]:
        defects = sorted(int(d) for d in set(syndrome))
        if not defects:
            return 0, 0.0
        for d in defects:
            if not (0 <= d < self.n_det):
                raise InfeasibleMatchingError(f"detector index {d} out of range")
        dist_rows, pred_rows = self._paths_from(defects)
        row_of = {d: i for i, d in enumerate(defects)}

        groups: dict[int, list[int]] = {}
        for d in defects:
            groups.setdefault(int(self._comp[d]), []).append(d)

        total_mask = 0
        total_weight = 0
        for group in groups.values():
            k = len(group)
            bdist = np.array([dist_rows[row_of[d]][self._bnode] for d in group])
            reachable = np.isfinite(bdist)
            if k % 2 == 1 and not reachable.any():
                raise InfeasibleMatchingError(
                    f"odd defect count {k} in a component with unreachable boundary"
                )
            eu, ev, ew = [], [], []
            for i in range(k):
                for j in range(i + 1, k):
                    d = dist_rows[row_of[group[i]]][group[j]]
                    eu.append(i)
                    ev.append(j)
                    ew.append(-int(d))
            for i in range(k):
                if reachable[i]:
                    eu.append(i)
                    ev.append(k + i)
                    ew.append(-int(bdist[i]))
            for i in range(k):
                for j in range(i + 1, k):
                    eu.append(k + i)
                    ev.append(k + j)
                    ew.append(0)
            mate = max_weight_matching(
                np.asarray(eu, dtype=np.int64),
                np.asarray(ev, dtype=np.int64),
                np.asarray(ew, dtype=np.int64),
                2 * k,
            )
            for i in range(k):
                m = int(mate[i])
                if m < 0:
                    raise InfeasibleMatchingError("defect left unmatched")
                if m == k + i:
                    pr = pred_rows[row_of[group[i]]]
                    total_mask ^= self._path_mask(pr, group[i], self._bnode)
                    total_weight += int(bdist[i])
                elif m < k and m > i:
                    pr = pred_rows[row_of[group[i]]]
                    total_mask ^= self._path_mask(pr, group[i], group[m])
                    total_weight += int(dist_rows[row_of[group[i]]][group[m]])
        return total_mask, total_weight / _WEIGHT_SCALE

    def decode_batch(self, batch: ShotBatch) -> BatchDecodeResult:
        """Decode every shot; failures counted against recorded flips."""
        if batch.n_detectors != self.n_det:
            raise ValueError(
                f"batch has {batch.n_detectors} detectors, graph has {self.n_det}"
            )
        preds = np.zeros((batch.shots, self.n_obs), dtype=bool)
        failures = 0
        obs = batch.obs
        for s in range(batch.shots):
            fired = np.nonzero(batch.det[s])[0]
            if len(fired):
                mask = self.decode(fired)
                for b in range(self.n_obs):
                    preds[s, b] = bool(mask >> b & 1)
            if self.n_obs and not np.array_equal(preds[s], obs[s]):
                failures += 1
        return BatchDecodeResult(preds, failures, batch.shots)


def decode(graph: DetectorErrorGraph, syndrome) -> int:
    return MatchingDecoder(graph).decode(syndrome)


def decode_batch(graph: DetectorErrorGraph, batch: ShotBatch) -> BatchDecodeResult:
    return MatchingDecoder(graph).decode_batch(batch)


def brute_force_minimum_pairing(
    decoder: MatchingDecoder, syndrome
) -> tuple[int, float]:
    """Exhaustive minimum-weight pairing oracle (defects to each other or
    to the boundary); independent of the blossom path."""
    defects = sorted(int(d) for d in set(syndrome))
    if not defects:
        return 0, 0.0
    dist_rows, pred_rows = decoder._paths_from(defects)
    row_of = {d: i for i, d in enumerate(defects)}
    bnode = decoder._bnode
    best: list[float] = [np.inf]
    best_mask = [0]

    def rec(remaining: tuple[int, ...], acc_w: float, acc_mask: int):
        if acc_w >= best[0]:
            return
        if not remaining:
            best[0] = acc_w
            best_mask[0] = acc_mask
            return
        d0 = remaining[0]
        rest = remaining[1:]
        b = dist_rows[row_of[d0]][bnode]
        if np.isfinite(b):
            m = decoder._path_mask(pred_rows[row_of[d0]], d0, bnode)
            rec(rest, acc_w + b, acc_mask ^ m)
        for i, d1 in enumerate(rest):
            w = dist_rows[row_of[d0]][d1]
            if np.isfinite(w):
                m = decoder._path_mask(pred_rows[row_of[d0]], d0, d1)
                rec(rest[:i] + rest[i + 1 :], acc_w + w, acc_mask ^ m)

    rec(tuple(defects), 0.0, 0)
    if not np.isfinite(best[0]):
        raise InfeasibleMatchingError("no feasible pairing")
    return best_mask[0], best[0] / _WEIGHT_SCALE
