"""Intermediate representation for annotated noisy Clifford circuits.

A circuit is a flat list of instructions over dense qubit indices, plus
detector and observable definitions that reference the measurement record.
Only Pauli-frame-simulable elements are allowed: Clifford gates, pair-wise
ZZ parity measurement, resets, and Pauli/flip noise channels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

# Gate-like kinds occupy a slot in a TICK layer; noise kinds do not.
GATE_KINDS_1Q = ("RESET_Z", "H", "S", "S_DAG", "X", "Y", "Z")
GATE_KINDS_2Q = ("RESET_BELL", "CX", "SWAP", "MZZ_PAIR")
NOISE_KINDS_1Q = ("DEP1", "PAULI_XY", "PAULI_Z")
NOISE_KINDS_2Q = ("DEP2", "FLIP_RESULT")

GATE_KINDS = GATE_KINDS_1Q + GATE_KINDS_2Q
NOISE_KINDS = NOISE_KINDS_1Q + NOISE_KINDS_2Q
ALL_KINDS = GATE_KINDS + NOISE_KINDS + ("TICK",)

# Kinds that induce a physical two-qubit coupling between their targets.
COUPLING_KINDS = ("CX", "SWAP", "MZZ_PAIR")


@dataclass(frozen=True)
class Instruction:
    """One circuit operation.

    Two-qubit kinds take an even number of targets, interpreted as
    consecutive pairs.  ``MZZ_PAIR`` and ``FLIP_RESULT`` take exactly one
    pair: an MZZ_PAIR appends one bit to the measurement record, and a
    FLIP_RESULT flips (with probability ``p``) the record bit of the most
    recent MZZ_PAIR on the same pair.
    """

    kind: str
    targets: tuple[int, ...]
    p: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))

    def target_pairs(self) -> list[tuple[int, int]]:
        ts = self.targets
        return [(ts[i], ts[i + 1]) for i in range(0, len(ts), 2)]


@dataclass(frozen=True)
class DetectorDef:
    """XOR of measurement-record bits that is 0 in a noiseless run.

    ``offsets`` are negative indices relative to the record end at the
    point of definition; ``anchor`` is the record length at that point.
    ``coord`` is an (x, y, t) tag for diagnostics only.
    """

    offsets: tuple[int, ...]
    anchor: int
    coord: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def absolute(self) -> tuple[int, ...]:
        return tuple(self.anchor + off for off in self.offsets)


@dataclass(frozen=True)
class ObservableDef:
    """Logical observable: XOR of record bits, indexed 0 or 1."""

    index: int
    offsets: tuple[int, ...]
    anchor: int

    def absolute(self) -> tuple[int, ...]:
        return tuple(self.anchor + off for off in self.offsets)


@dataclass(frozen=True)
class Violation:
    instruction: int | None
    rule: str
    message: str

    def __str__(self):
        where = "circuit" if self.instruction is None else f"instr {self.instruction}"
        return f"[{self.rule}] {where}: {self.message}"


@dataclass
class Circuit:
    """Immutable-by-convention container; builders construct then freeze."""

    n_qubits: int
    ancilla: frozenset[int] = field(default_factory=frozenset)
    instructions: list[Instruction] = field(default_factory=list)
    detectors: list[DetectorDef] = field(default_factory=list)
    observables: list[ObservableDef] = field(default_factory=list)

    @property
    def n_measurements(self) -> int:
        return sum(
            len(ins.targets) // 2
            for ins in self.instructions
            if ins.kind == "MZZ_PAIR"
        )

    @property
    def n_detectors(self) -> int:
        return len(self.detectors)

    @property
    def n_observables(self) -> int:
        return len(set(o.index for o in self.observables)) if self.observables else 0

    def data_qubits(self) -> list[int]:
        return [q for q in range(self.n_qubits) if q not in self.ancilla]


def _check_instruction(i: int, ins: Instruction, n_qubits: int) -> list[Violation]:
    out = []
    if ins.kind not in ALL_KINDS:
        return [Violation(i, "unknown-kind", f"unknown kind {ins.kind!r}")]
    if ins.kind == "TICK":
        if ins.targets:
            out.append(Violation(i, "tick-targets", "TICK takes no targets"))
        return out
    for t in ins.targets:
        if not (0 <= t < n_qubits):
            out.append(Violation(i, "target-range", f"target {t} out of range"))
    if ins.kind in GATE_KINDS_2Q or ins.kind in NOISE_KINDS_2Q:
        if len(ins.targets) == 0 or len(ins.targets) % 2 != 0:
            out.append(Violation(i, "pair-count", "two-qubit kind needs an even, nonzero target count"))
        else:
            for a, b in ins.target_pairs():
                if a == b:
                    out.append(Violation(i, "duplicate-target", f"pair ({a},{b}) repeats a qubit"))
        if ins.kind in ("MZZ_PAIR", "FLIP_RESULT") and len(ins.targets) != 2:
            out.append(Violation(i, "single-pair", f"{ins.kind} takes exactly one pair"))
    elif not ins.targets:
        out.append(Violation(i, "no-targets", "instruction needs at least one target"))
    if ins.kind in NOISE_KINDS:
        if ins.p is None:
            out.append(Violation(i, "missing-probability", "noise kind needs p"))
        elif not (0.0 <= ins.p <= 1.0):
            out.append(Violation(i, "probability-range", f"p={ins.p} outside [0, 1]"))
    elif ins.p is not None:
        out.append(Violation(i, "spurious-probability", f"{ins.kind} takes no p"))
    # Within one broadcast gate instruction each qubit may act only once.
    if ins.kind in GATE_KINDS and len(set(ins.targets)) != len(ins.targets):
        if ins.kind in GATE_KINDS_1Q or all(a != b for a, b in ins.target_pairs()):
            out.append(Violation(i, "repeated-target", "qubit repeated within one instruction"))
    return out


def validate(circuit: Circuit) -> list[Violation]:
    """Check all structural invariants; an empty list means valid."""
    out: list[Violation] = []
    for i, ins in enumerate(circuit.instructions):
        out.extend(_check_instruction(i, ins, circuit.n_qubits))

    # Layer property: between TICKs each qubit sees at most one gate.
    busy: set[int] = set()
    for i, ins in enumerate(circuit.instructions):
        if ins.kind == "TICK":
            busy.clear()
        elif ins.kind in GATE_KINDS:
            for t in ins.targets:
                if t in busy:
                    out.append(Violation(i, "layer-conflict", f"qubit {t} acts twice in one layer"))
                busy.add(t)

    # FLIP_RESULT must follow an MZZ_PAIR on the same pair; record offsets
    # must resolve to existing bits.
    n_rec = 0
    last_mzz: dict[tuple[int, int], int] = {}
    for i, ins in enumerate(circuit.instructions):
        if ins.kind == "MZZ_PAIR" and len(ins.targets) == 2:
            last_mzz[tuple(sorted(ins.targets))] = n_rec
            n_rec += 1
        elif ins.kind == "FLIP_RESULT" and len(ins.targets) == 2:
            if tuple(sorted(ins.targets)) not in last_mzz:
                out.append(Violation(i, "orphan-flip", "FLIP_RESULT precedes any MZZ_PAIR on its pair"))
    total = n_rec
    for d in circuit.detectors + circuit.observables:
        kind = "detector" if isinstance(d, DetectorDef) else "observable"
        if d.anchor > total:
            out.append(Violation(None, "bad-anchor", f"{kind} anchored past record end"))
        for off in d.offsets:
            if off >= 0 or d.anchor + off < 0:
                out.append(Violation(None, "unresolved-offset", f"{kind} offset {off} at anchor {d.anchor} unresolvable"))
    for o in circuit.observables:
        if o.index not in (0, 1):
            out.append(Violation(None, "observable-index", f"observable index {o.index} not in {{0,1}}"))
    if circuit.ancilla and max(circuit.ancilla) >= circuit.n_qubits:
        out.append(Violation(None, "ancilla-range", "ancilla index out of range"))
    return out


@dataclass(frozen=True)
class ConnectivityStats:
    n_qubits: int
    edges: frozenset[tuple[int, int]]
    degrees: tuple[int, ...]
    average_degree: Fraction
    nu_q: float | None = None
    nu_a: float | None = None


def coupling_edges(circuit: Circuit) -> frozenset[tuple[int, int]]:
    edges = set()
    for ins in circuit.instructions:
        if ins.kind in COUPLING_KINDS:
            for a, b in ins.target_pairs():
                edges.add((min(a, b), max(a, b)))
    return frozenset(edges)


def connectivity_report(circuit: Circuit, distance: int | None = None) -> ConnectivityStats:
    """Undirected two-qubit coupling graph induced by CX/SWAP/MZZ_PAIR.

    With ``distance`` given, also reports the qubit/ancilla densities
    per squared code distance.
    """
    edges = coupling_edges(circuit)
    deg = [0] * circuit.n_qubits
    for a, b in edges:
        deg[a] += 1
        deg[b] += 1
    avg = Fraction(2 * len(edges), circuit.n_qubits) if circuit.n_qubits else Fraction(0)
    nu_q = nu_a = None
    if distance is not None:
        if distance <= 0:
            raise ValueError("distance must be positive")
        n_anc = len(circuit.ancilla)
        nu_q = (circuit.n_qubits - n_anc) / distance**2
        nu_a = n_anc / distance**2
    return ConnectivityStats(circuit.n_qubits, edges, tuple(deg), avg, nu_q, nu_a)


def bulk_average_degree(circuit: Circuit, bulk_qubits: Iterable[int]) -> Fraction:
    """Mean coupling degree over a caller-supplied bulk qubit set."""
    qs = list(bulk_qubits)
    if not qs:
        raise ValueError("empty bulk set")
    deg = {q: 0 for q in range(circuit.n_qubits)}
    for a, b in coupling_edges(circuit):
        deg[a] += 1
        deg[b] += 1
    return Fraction(sum(deg[q] for q in qs), len(qs))


class ParseError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _fmt_p(p: float) -> str:
    return repr(float(p))


def serialize(circuit: Circuit) -> str:
    """Text form, one instruction per line; round-trips through parse."""
    lines = [f"QUBITS {circuit.n_qubits}"]
    if circuit.ancilla:
        lines.append("ANCILLA " + " ".join(str(q) for q in sorted(circuit.ancilla)))
    # Detectors/observables are interleaved at their definition anchors.
    marks: dict[int, list[str]] = {}
    for d in circuit.detectors:
        x, y, t = d.coord
        line = f"DETECTOR({x:g},{y:g},{t:g}) " + " ".join(f"rec[{o}]" for o in d.offsets)
        marks.setdefault(d.anchor, []).append(line)
    for o in circuit.observables:
        line = f"OBSERVABLE({o.index}) " + " ".join(f"rec[{off}]" for off in o.offsets)
        marks.setdefault(o.anchor, []).append(line)

    n_rec = 0
    lines.extend(marks.get(0, []))
    for ins in circuit.instructions:
        if ins.kind == "TICK":
            lines.append("TICK")
        else:
            parts = [ins.kind]
            if ins.p is not None:
                parts.append(f"p={_fmt_p(ins.p)}")
            parts.extend(str(t) for t in ins.targets)
            lines.append(" ".join(parts))
        if ins.kind == "MZZ_PAIR":
            n_rec += 1
            lines.extend(marks.get(n_rec, []))
    return "\n".join(lines) + "\n"


def parse(text: str) -> Circuit:
    """Inverse of serialize; raises ParseError with the offending line."""
    n_qubits = None
    ancilla: frozenset[int] = frozenset()
    instructions: list[Instruction] = []
    detectors: list[DetectorDef] = []
    observables: list[ObservableDef] = []
    n_rec = 0
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0]
        try:
            if head == "QUBITS":
                n_qubits = int(tokens[1])
            elif head == "ANCILLA":
                ancilla = frozenset(int(t) for t in tokens[1:])
            elif head.startswith("DETECTOR(") or head.startswith("OBSERVABLE("):
                inner = head[head.index("(") + 1 : head.rindex(")")]
                offsets = []
                for tok in tokens[1:]:
                    if not (tok.startswith("rec[") and tok.endswith("]")):
                        raise ValueError(f"bad record token {tok!r}")
                    offsets.append(int(tok[4:-1]))
                if head.startswith("DETECTOR"):
                    coord = tuple(float(v) for v in inner.split(","))
                    if len(coord) != 3:
                        raise ValueError("detector coordinate needs (x,y,t)")
                    detectors.append(DetectorDef(tuple(offsets), n_rec, coord))
                else:
                    observables.append(ObservableDef(int(inner), tuple(offsets), n_rec))
            elif head == "TICK":
                instructions.append(Instruction("TICK", ()))
            elif head in ALL_KINDS:
                p = None
                rest = tokens[1:]
                if rest and rest[0].startswith("p="):
                    p = float(rest[0][2:])
                    rest = rest[1:]
                ins = Instruction(head, tuple(int(t) for t in rest), p)
                instructions.append(ins)
                if head == "MZZ_PAIR":
                    n_rec += len(ins.targets) // 2
            else:
                raise ValueError(f"unknown directive {head!r}")
        except ParseError:
            raise
        except Exception as e:
            raise ParseError(line_no, str(e)) from e
    if n_qubits is None:
        raise ParseError(1, "missing QUBITS header")
    return Circuit(n_qubits, ancilla, instructions, detectors, observables)


class CircuitBuilder:
    """Append-style constructor tracking the measurement record length."""

    def __init__(self, n_qubits: int, ancilla: Iterable[int] = ()):
        self.circuit = Circuit(n_qubits, frozenset(int(a) for a in ancilla))
        self.n_rec = 0
        self._rec_of_pair: dict[tuple[int, int], int] = {}

    def append(self, kind: str, targets: Sequence[int] = (), p: float | None = None):
        if kind in NOISE_KINDS and (p is None or p <= 0.0):
            return self
        if kind != "TICK" and len(targets) == 0:
            return self
        self.circuit.instructions.append(Instruction(kind, tuple(targets), p))
        if kind == "MZZ_PAIR":
            self._rec_of_pair[tuple(sorted(targets))] = self.n_rec
            self.n_rec += 1
        return self

    def tick(self):
        return self.append("TICK")

    def mzz(self, a: int, b: int, p_flip: float = 0.0) -> int:
        """MZZ_PAIR plus its record-flip channel; returns the bit index."""
        self.append("MZZ_PAIR", (a, b))
        self.append("FLIP_RESULT", (a, b), p_flip)
        return self.n_rec - 1

    def detector(self, rec_indices: Sequence[int], coord=(0.0, 0.0, 0.0)):
        offsets = tuple(idx - self.n_rec for idx in rec_indices)
        self.circuit.detectors.append(DetectorDef(offsets, self.n_rec, tuple(coord)))
        return self

    def observable(self, index: int, rec_indices: Sequence[int]):
        offsets = tuple(idx - self.n_rec for idx in rec_indices)
        self.circuit.observables.append(ObservableDef(index, offsets, self.n_rec))
        return self

    def finish(self) -> Circuit:
        return self.circuit
