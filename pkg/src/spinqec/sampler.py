"""Monte Carlo Pauli-frame sampler and exhaustive fault oracles.

The engine propagates batches of X/Z flip frames through a circuit with
all shots vectorized along the trailing axis, so every gate is a handful
of row-wise boolean operations.  The same machinery runs in a
deterministic mode where each column carries exactly one elementary fault,
which is what the detector-error-model extraction and the enumeration
oracle are built on.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass
from itertools import combinations
from typing import Iterator

import numpy as np

from .circuit import Circuit, Instruction, validate

_BATCH = 1 << 14
_SCALE = float(1 << 32)

# Pauli code: 0=I, 1=X, 2=Y, 3=Z.  X-frame flips for {X,Y}, Z-frame for {Y,Z}.
_PAULI_X = np.array([False, True, True, False])
_PAULI_Z = np.array([False, False, True, True])


@dataclass
class ShotBatch:
    """Detection events and observable flips for a batch of shots.

    ``det`` has shape (shots, n_detectors) and ``obs`` (shots, n_observables),
    both boolean; bit-packed forms are produced on export.
    """

    shots: int
    det: np.ndarray
    obs: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        if self.det.shape[0] != self.shots or self.obs.shape[0] != self.shots:
            raise ValueError("matrix dimensions inconsistent with shot count")

    @property
    def n_detectors(self) -> int:
        return self.det.shape[1]

    @property
    def n_observables(self) -> int:
        return self.obs.shape[1]

    def to_binary(self) -> bytes:
        """Packed little-endian export: header then det and obs bit rows."""
        buf = io.BytesIO()
        seed = -1 if self.seed is None else int(self.seed)
        buf.write(b"SQSB")
        buf.write(struct.pack("<IQIIq", 1, self.shots, self.det.shape[1], self.obs.shape[1], seed))
        buf.write(np.packbits(self.det, axis=1, bitorder="little").tobytes())
        buf.write(np.packbits(self.obs, axis=1, bitorder="little").tobytes())
        return buf.getvalue()

    @classmethod
    def from_binary(cls, blob: bytes) -> "ShotBatch":
        if blob[:4] != b"SQSB":
            raise ValueError("not a shot-batch blob")
        ver, shots, n_det, n_obs, seed = struct.unpack_from("<IQIIq", blob, 4)
        if ver != 1:
            raise ValueError(f"unsupported version {ver}")
        off = 4 + struct.calcsize("<IQIIq")
        det_bytes = (n_det + 7) // 8
        obs_bytes = (n_obs + 7) // 8
        det_raw = np.frombuffer(blob, np.uint8, shots * det_bytes, off).reshape(shots, det_bytes)
        obs_raw = np.frombuffer(
            blob, np.uint8, shots * obs_bytes, off + shots * det_bytes
        ).reshape(shots, obs_bytes)
        det = np.unpackbits(det_raw, axis=1, count=n_det, bitorder="little").astype(bool)
        obs = np.unpackbits(obs_raw, axis=1, count=n_obs, bitorder="little").astype(bool)
        return cls(shots, det, obs, None if seed == -1 else seed)

    def to_text(self) -> str:
        lines = []
        for i in range(self.shots):
            d = "".join("1" if b else "0" for b in self.det[i])
            o = "".join("1" if b else "0" for b in self.obs[i])
            lines.append(f"{d} {o}" if o else d)
        return "\n".join(lines) + "\n"


def _flip_rows(frame: np.ndarray, rows: np.ndarray, flips: np.ndarray):
    # XOR rows into the frame; tolerate repeated row indices.
    if len(rows) == len(set(rows.tolist())):
        frame[rows] ^= flips
    else:
        np.bitwise_xor.at(frame, rows, flips)


class _Frame:
    """One batch of frames plus the measurement record."""

    def __init__(self, circuit: Circuit, n_cols: int):
        n = circuit.n_qubits
        self.xf = np.zeros((n, n_cols), dtype=bool)
        self.zf = np.zeros((n, n_cols), dtype=bool)
        self.rec = np.zeros((circuit.n_measurements, n_cols), dtype=bool)
        self.n_cols = n_cols
        self.n_rec = 0

    def apply_gate(self, ins: Instruction):
        kind = ins.kind
        xf, zf = self.xf, self.zf
        ts = np.asarray(ins.targets)
        if kind == "CX":
            c, t = ts[0::2], ts[1::2]
            xf[t] ^= xf[c]
            zf[c] ^= zf[t]
        elif kind == "SWAP" or kind == "RESET_BELL":
            a, b = ts[0::2], ts[1::2]
            if kind == "SWAP":
                xf[a], xf[b] = xf[b].copy(), xf[a].copy()
                zf[a], zf[b] = zf[b].copy(), zf[a].copy()
            else:
                xf[ts] = False
                zf[ts] = False
        elif kind == "H":
            xf[ts], zf[ts] = zf[ts].copy(), xf[ts].copy()
        elif kind in ("S", "S_DAG"):
            zf[ts] ^= xf[ts]
        elif kind == "RESET_Z":
            xf[ts] = False
            zf[ts] = False
        elif kind == "X":
            xf[ts] ^= True
        elif kind == "Y":
            xf[ts] ^= True
            zf[ts] ^= True
        elif kind == "Z":
            zf[ts] ^= True
        elif kind == "MZZ_PAIR":
            a, b = ins.targets
            self.rec[self.n_rec] = xf[a] ^ xf[b]
            self.n_rec += 1
        else:
            raise ValueError(f"not a gate kind: {kind}")

    def results(self, circuit: Circuit) -> tuple[np.ndarray, np.ndarray]:
        n_obs = circuit.n_observables
        det = np.zeros((len(circuit.detectors), self.n_cols), dtype=bool)
        obs = np.zeros((n_obs, self.n_cols), dtype=bool)
        for k, d in enumerate(circuit.detectors):
            for idx in d.absolute():
                det[k] ^= self.rec[idx]
        for o in circuit.observables:
            for idx in o.absolute():
                obs[o.index] ^= self.rec[idx]
        return det.T.copy(), obs.T.copy()


def _sample_noise(frame: _Frame, ins: Instruction, rng: np.random.Generator):
    """Draw one uint32 per trial; threshold gives the fired mask and the
    residue selects the Pauli component, exactly uniform over components."""
    kind = ins.kind
    p = float(ins.p)
    if p <= 0.0:
        return
    n_cols = frame.n_cols
    if kind == "DEP1" or kind == "PAULI_XY" or kind == "PAULI_Z":
        ts = np.asarray(ins.targets)
        n_comp = {"DEP1": 3, "PAULI_XY": 2, "PAULI_Z": 1}[kind]
        q = min(int(round(p / n_comp * _SCALE)), (1 << 32) // n_comp)
        r = rng.integers(0, 1 << 32, size=(len(ts), n_cols), dtype=np.uint32)
        fired = r < n_comp * q
        if kind == "DEP1":
            comp = (r % 3).astype(np.uint8)  # 0=X 1=Y 2=Z
            xflip = fired & (comp != 2)
            zflip = fired & (comp != 0)
        elif kind == "PAULI_XY":
            comp = (r & 1).astype(np.uint8)  # 0=X 1=Y
            xflip = fired
            zflip = fired & (comp == 1)
        else:
            xflip = None
            zflip = fired
        if xflip is not None:
            _flip_rows(frame.xf, ts, xflip)
        _flip_rows(frame.zf, ts, zflip)
    elif kind == "DEP2":
        ts = np.asarray(ins.targets)
        a, b = ts[0::2], ts[1::2]
        q = min(int(round(p / 15 * _SCALE)), (1 << 32) // 15)
        r = rng.integers(0, 1 << 32, size=(len(a), n_cols), dtype=np.uint32)
        fired = r < 15 * q
        comp = (r % 15 + 1).astype(np.uint8)  # 1..15, two base-4 digits
        pa, pb = comp >> 2, comp & 3
        _flip_rows(frame.xf, a, fired & _PAULI_X[pa])
        _flip_rows(frame.zf, a, fired & _PAULI_Z[pa])
        _flip_rows(frame.xf, b, fired & _PAULI_X[pb])
        _flip_rows(frame.zf, b, fired & _PAULI_Z[pb])
    elif kind == "FLIP_RESULT":
        if p >= 1.0:
            return  # deterministic reframing: applies to the reference too
        q = min(int(round(p * _SCALE)), (1 << 32) - 1)
        r = rng.integers(0, 1 << 32, size=n_cols, dtype=np.uint32)
        frame.rec[frame.flip_rec_index] ^= r < q
    else:
        raise ValueError(f"not a noise kind: {kind}")


def _flip_targets(circuit: Circuit) -> dict[int, int]:
    """Record index modified by each FLIP_RESULT instruction."""
    out: dict[int, int] = {}
    n_rec = 0
    last: dict[tuple[int, int], int] = {}
    for i, ins in enumerate(circuit.instructions):
        if ins.kind == "MZZ_PAIR":
            last[tuple(sorted(ins.targets))] = n_rec
            n_rec += 1
        elif ins.kind == "FLIP_RESULT":
            key = tuple(sorted(ins.targets))
            if key not in last:
                raise ValueError(f"FLIP_RESULT at instruction {i} precedes any MZZ_PAIR on {key}")
            out[i] = last[key]
    return out


def _check(circuit: Circuit):
    bad = validate(circuit)
    if bad:
        raise ValueError("invalid circuit: " + "; ".join(str(v) for v in bad[:5]))


def sample(circuit: Circuit, shots: int, seed: int | None = 0) -> ShotBatch:
    """Sample detection events and observable flips.

    Shots are processed in fixed-size column batches whose RNG streams are
    derived from (seed, batch index), so the output is bit-identical for a
    given (circuit, shots, seed) regardless of how work is scheduled.
    """
    _check(circuit)
    flip_map = _flip_targets(circuit)
    n_obs = circuit.n_observables
    det = np.zeros((shots, len(circuit.detectors)), dtype=bool)
    obs = np.zeros((shots, n_obs), dtype=bool)
    done = 0
    batch_idx = 0
    while done < shots:
        n_cols = min(_BATCH, shots - done)
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(batch_idx,)))
        frame = _Frame(circuit, n_cols)
        for i, ins in enumerate(circuit.instructions):
            if ins.kind == "TICK":
                continue
            if ins.kind in ("DEP1", "DEP2", "PAULI_XY", "PAULI_Z"):
                _sample_noise(frame, ins, rng)
            elif ins.kind == "FLIP_RESULT":
                frame.flip_rec_index = flip_map[i]
                _sample_noise(frame, ins, rng)
            else:
                frame.apply_gate(ins)
        d, o = frame.results(circuit)
        det[done : done + n_cols] = d
        obs[done : done + n_cols] = o
        done += n_cols
        batch_idx += 1
    return ShotBatch(shots, det, obs, seed)


@dataclass(frozen=True)
class ElementaryFault:
    """One Pauli/flip component of one noise instruction."""

    instruction: int
    pauli: tuple[tuple[int, int], ...]  # (qubit, pauli code) pairs; () for record flips
    rec_index: int | None
    probability: float
    detectors: frozenset[int]
    obs_mask: int

    @property
    def key(self) -> tuple[frozenset[int], int]:
        return (self.detectors, self.obs_mask)


def _fault_sites(circuit: Circuit) -> list[tuple[int, tuple[tuple[int, int], ...], int | None, float]]:
    """All elementary fault components with their probabilities."""
    sites = []
    flip_map = _flip_targets(circuit)
    for i, ins in enumerate(circuit.instructions):
        if ins.kind == "DEP1":
            for q in ins.targets:
                for pauli in (1, 2, 3):
                    sites.append((i, ((q, pauli),), None, ins.p / 3))
        elif ins.kind == "PAULI_XY":
            for q in ins.targets:
                for pauli in (1, 2):
                    sites.append((i, ((q, pauli),), None, ins.p / 2))
        elif ins.kind == "PAULI_Z":
            for q in ins.targets:
                sites.append((i, ((q, 3),), None, ins.p))
        elif ins.kind == "DEP2":
            for a, b in ins.target_pairs():
                for comp in range(1, 16):
                    pa, pb = comp >> 2, comp & 3
                    pauli = tuple(
                        (q, pc) for q, pc in ((a, pa), (b, pb)) if pc != 0
                    )
                    sites.append((i, pauli, None, ins.p / 15))
        elif ins.kind == "FLIP_RESULT":
            if ins.p < 1.0:
                sites.append((i, (), flip_map[i], ins.p))
    return sites


def fault_symptoms(circuit: Circuit) -> list[ElementaryFault]:
    """Deterministic symptom (detector set, observable mask) of every
    elementary fault, via one batched frame propagation (one column per
    fault)."""
    _check(circuit)
    sites = _fault_sites(circuit)
    n_faults = len(sites)
    if n_faults == 0:
        return []
    by_instr: dict[int, list[int]] = {}
    for col, (i, _, _, _) in enumerate(sites):
        by_instr.setdefault(i, []).append(col)

    frame = _Frame(circuit, n_faults)
    for i, ins in enumerate(circuit.instructions):
        if ins.kind == "TICK":
            continue
        if ins.kind in ("DEP1", "DEP2", "PAULI_XY", "PAULI_Z", "FLIP_RESULT"):
            for col in by_instr.get(i, ()):
                _, pauli, rec_index, _ = sites[col]
                for q, pc in pauli:
                    if _PAULI_X[pc]:
                        frame.xf[q, col] ^= True
                    if _PAULI_Z[pc]:
                        frame.zf[q, col] ^= True
                if rec_index is not None:
                    frame.rec[rec_index, col] ^= True
        else:
            frame.apply_gate(ins)
    det, obs = frame.results(circuit)

    faults = []
    for col, (i, pauli, rec_index, p) in enumerate(sites):
        dets = frozenset(np.nonzero(det[col])[0].tolist())
        mask = 0
        for k in np.nonzero(obs[col])[0]:
            mask |= 1 << int(k)
        faults.append(ElementaryFault(i, pauli, rec_index, p, dets, mask))
    return faults


def enumerate_faults(
    circuit: Circuit, max_weight: int, guard: int = 10**7
) -> Iterator[tuple[tuple[int, ...], frozenset[int], int, float]]:
    """Exact propagation of every fault combination up to ``max_weight``.

    Yields (fault indices, detector set, observable mask, joint probability).
    Symptoms combine by XOR because frame propagation is linear in the
    injected Paulis.
    """
    singles = fault_symptoms(circuit)
    n = len(singles)
    total = 0
    for w in range(0, max_weight + 1):
        c = 1
        for j in range(w):
            c = c * (n - j) // (j + 1)
        total += c
    if total > guard:
        raise ValueError(f"{total} combinations exceed the enumeration guard {guard}")

    p_none = 1.0
    for f in singles:
        p_none *= 1.0 - f.probability
    det_bits = [sum(1 << d for d in f.detectors) for f in singles]

    for w in range(0, max_weight + 1):
        for combo in combinations(range(n), w):
            bits = 0
            mask = 0
            prob = p_none
            for i in combo:
                bits ^= det_bits[i]
                mask ^= singles[i].obs_mask
                f = singles[i]
                prob *= f.probability / (1.0 - f.probability)
            dets = frozenset(i for i in range(bits.bit_length()) if bits >> i & 1)
            yield combo, dets, mask, prob


def exact_detector_distribution(circuit: Circuit) -> dict[tuple[int, ...], float]:
    """Full distribution over detector patterns by convolving all faults.

    Feasible only for small circuits; the independent oracle for the
    sampler's statistics.
    """
    singles = fault_symptoms(circuit)
    dist: dict[int, float] = {0: 1.0}
    for f in singles:
        bits = sum(1 << d for d in f.detectors)
        nxt: dict[int, float] = {}
        for pattern, pr in dist.items():
            nxt[pattern] = nxt.get(pattern, 0.0) + pr * (1.0 - f.probability)
            flipped = pattern ^ bits
            nxt[flipped] = nxt.get(flipped, 0.0) + pr * f.probability
        dist = nxt
    out = {}
    for pattern, pr in dist.items():
        key = tuple(i for i in range(pattern.bit_length()) if pattern >> i & 1)
        out[key] = out.get(key, 0.0) + pr
    return out
