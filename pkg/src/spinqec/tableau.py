"""Dense stabilizer-tableau simulator used as a verification oracle.

Tracks destabilizer/stabilizer generators with signs through noiseless
circuit prefixes.  Slow but exact; used to certify builders (plaquette
group structure, measurement determinism), never for sampling.
"""

from __future__ import annotations

import numpy as np

from .circuit import Circuit

_DEFAULT_GUARD = 128


class Tableau:
    """Aaronson-Gottesman tableau over n qubits."""

    def __init__(self, n: int):
        self.n = n
        self.x = np.zeros((2 * n, n), dtype=bool)
        self.z = np.zeros((2 * n, n), dtype=bool)
        self.r = np.zeros(2 * n, dtype=bool)
        self.x[:n, :] = np.eye(n, dtype=bool)  # destabilizers X_i
        self.z[n:, :] = np.eye(n, dtype=bool)  # stabilizers Z_i

    # -- Clifford conjugations ------------------------------------------
    def h(self, q: int):
        self.r ^= self.x[:, q] & self.z[:, q]
        self.x[:, q], self.z[:, q] = self.z[:, q].copy(), self.x[:, q].copy()

    def s(self, q: int):
        self.r ^= self.x[:, q] & self.z[:, q]
        self.z[:, q] ^= self.x[:, q]

    def s_dag(self, q: int):
        for _ in range(3):
            self.s(q)

    def cx(self, c: int, t: int):
        self.r ^= self.x[:, c] & self.z[:, t] & (self.x[:, t] ^ self.z[:, c] ^ True)
        self.x[:, t] ^= self.x[:, c]
        self.z[:, c] ^= self.z[:, t]

    def swap(self, a: int, b: int):
        for m in (self.x, self.z):
            m[:, a], m[:, b] = m[:, b].copy(), m[:, a].copy()

    def pauli(self, q: int, code: int):
        # Sign flips of rows anticommuting with the applied Pauli.
        if code == 1:  # X
            self.r ^= self.z[:, q]
        elif code == 2:  # Y
            self.r ^= self.x[:, q] ^ self.z[:, q]
        elif code == 3:  # Z
            self.r ^= self.x[:, q]

    # -- row algebra -----------------------------------------------------
    def _phase_exponent(self, h: int, i: int) -> int:
        """Exponent of i in the product row_h * row_i (mod 4), per AG."""
        x1, z1 = self.x[i].astype(np.int8), self.z[i].astype(np.int8)
        x2, z2 = self.x[h].astype(np.int8), self.z[h].astype(np.int8)
        # g(x1,z1,x2,z2) summed over qubits
        g = np.zeros_like(x1)
        one = (x1 == 1) & (z1 == 0)
        g[one] = z2[one] * (2 * x2[one] - 1)
        two = (x1 == 1) & (z1 == 1)
        g[two] = z2[two] - x2[two]
        three = (x1 == 0) & (z1 == 1)
        g[three] = x2[three] * (1 - 2 * z2[three])
        return int(2 * self.r[h] + 2 * self.r[i] + g.sum()) % 4

    def rowsum(self, h: int, i: int):
        """row_h <- row_i * row_h with phase tracking.

        Destabilizer phases are immaterial, so the Hermiticity check only
        applies to stabilizer and scratch rows.
        """
        ph = self._phase_exponent(h, i)
        if h >= self.n:
            assert ph in (0, 2), "rowsum produced an imaginary phase"
        self.r[h] = ph >= 2
        self.x[h] ^= self.x[i]
        self.z[h] ^= self.z[i]

    # -- measurement -----------------------------------------------------
    def measure_pauli(
        self, xs: np.ndarray, zs: np.ndarray, rng: np.random.Generator | None = None, force: int | None = None
    ) -> tuple[int, bool]:
        """Measure a +1-phase Pauli given by X/Z support vectors.

        Returns (outcome bit, deterministic flag).  Random outcomes draw
        from ``rng`` unless ``force`` pins them.
        """
        n = self.n
        anti = ((self.x & zs).sum(axis=1) + (self.z & xs).sum(axis=1)) % 2 == 1
        stab_rows = np.nonzero(anti[n:])[0] + n
        if len(stab_rows) > 0:
            p = int(stab_rows[0])
            for row in np.nonzero(anti)[0]:
                if row != p and anti[row]:
                    self.rowsum(int(row), p)
            # Old stabilizer becomes the destabilizer of the new one.
            self.x[p - n] = self.x[p].copy()
            self.z[p - n] = self.z[p].copy()
            self.r[p - n] = self.r[p]
            if force is not None:
                outcome = int(force)
            elif rng is not None:
                outcome = int(rng.integers(0, 2))
            else:
                outcome = 0
            self.x[p] = xs
            self.z[p] = zs
            self.r[p] = bool(outcome)
            return outcome, False
        # Deterministic: accumulate the product of stabilizers indicated by
        # anticommuting destabilizers in a scratch row.
        self._scratch_open(xs, zs)
        acc = 2 * n  # scratch index
        for i in range(n):
            if anti[i]:
                self.rowsum(acc, n + i)
        outcome = int(self.r[acc])
        self._scratch_close()
        return outcome, True

    def _scratch_open(self, xs, zs):
        self.x = np.vstack([self.x, np.zeros((1, self.n), dtype=bool)])
        self.z = np.vstack([self.z, np.zeros((1, self.n), dtype=bool)])
        self.r = np.append(self.r, False)

    def _scratch_close(self):
        self.x = self.x[:-1]
        self.z = self.z[:-1]
        self.r = self.r[:-1]

    def _support(self, qubits_paulis: dict[int, int]) -> tuple[np.ndarray, np.ndarray]:
        xs = np.zeros(self.n, dtype=bool)
        zs = np.zeros(self.n, dtype=bool)
        for q, code in qubits_paulis.items():
            if code in (1, 2):
                xs[q] = True
            if code in (2, 3):
                zs[q] = True
        return xs, zs

    def measure_zz(self, a: int, b: int, rng=None, force=None) -> tuple[int, bool]:
        xs, zs = self._support({a: 3, b: 3})
        return self.measure_pauli(xs, zs, rng, force)

    def reset_z(self, q: int, rng=None):
        xs, zs = self._support({q: 3})
        outcome, _ = self.measure_pauli(xs, zs, rng, force=0 if rng is None else None)
        if outcome:
            self.pauli(q, 1)

    def reset_bell(self, a: int, b: int, rng=None):
        self.reset_z(a, rng)
        self.reset_z(b, rng)
        self.h(a)
        self.cx(a, b)

    # -- group queries ----------------------------------------------------
    def stabilizer_matrix(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        n = self.n
        return self.x[n:].copy(), self.z[n:].copy(), self.r[n:].copy()

    def contains(self, qubits_paulis: dict[int, int], sign: int = 0) -> bool:
        """Is the signed Pauli in the stabilizer group?

        ``sign`` is 0 for +P, 1 for -P.  Solved by measuring P on a copy:
        membership iff the outcome is deterministic and matches.
        """
        xs, zs = self._support(qubits_paulis)
        clone = self.copy()
        outcome, deterministic = clone.measure_pauli(xs, zs, rng=None, force=0)
        return deterministic and outcome == int(sign)

    def copy(self) -> "Tableau":
        t = Tableau.__new__(Tableau)
        t.n = self.n
        t.x = self.x.copy()
        t.z = self.z.copy()
        t.r = self.r.copy()
        return t


def run_tableau(
    circuit: Circuit,
    n_instructions: int | None = None,
    rng: np.random.Generator | None = None,
    qubit_guard: int = _DEFAULT_GUARD,
) -> tuple[Tableau, list[int]]:
    """Execute a noiseless circuit prefix; returns the tableau and record.

    Noise instructions with nonzero probability are rejected, since the
    tableau cannot represent mixtures.  Deterministic X/Y/Z injections are
    applied as gates.
    """
    if circuit.n_qubits > qubit_guard:
        raise ValueError(f"{circuit.n_qubits} qubits exceed the tableau guard {qubit_guard}")
    t = Tableau(circuit.n_qubits)
    record: list[int] = []
    last_rec: dict[tuple[int, int], int] = {}
    stop = len(circuit.instructions) if n_instructions is None else n_instructions
    for ins in circuit.instructions[:stop]:
        kind = ins.kind
        if kind == "TICK":
            continue
        if kind == "FLIP_RESULT" and ins.p == 1.0:
            # Deterministic record reframing (basis-convention sign); the
            # Pauli-frame semantics are untouched since it applies to the
            # reference and every branch alike.
            record[last_rec[tuple(sorted(ins.targets))]] ^= 1
            continue
        if kind in ("DEP1", "DEP2", "PAULI_XY", "PAULI_Z", "FLIP_RESULT"):
            if ins.p and ins.p > 0:
                raise ValueError("tableau oracle requires a noiseless prefix")
            continue
        if kind == "H":
            for q in ins.targets:
                t.h(q)
        elif kind == "S":
            for q in ins.targets:
                t.s(q)
        elif kind == "S_DAG":
            for q in ins.targets:
                t.s_dag(q)
        elif kind == "CX":
            for c, q in ins.target_pairs():
                t.cx(c, q)
        elif kind == "SWAP":
            for a, b in ins.target_pairs():
                t.swap(a, b)
        elif kind == "RESET_Z":
            for q in ins.targets:
                t.reset_z(q, rng)
        elif kind == "RESET_BELL":
            for a, b in ins.target_pairs():
                t.reset_bell(a, b, rng)
        elif kind == "MZZ_PAIR":
            a, b = ins.targets
            outcome, _ = t.measure_zz(a, b, rng)
            last_rec[tuple(sorted(ins.targets))] = len(record)
            record.append(outcome)
        elif kind in ("X", "Y", "Z"):
            code = {"X": 1, "Y": 2, "Z": 3}[kind]
            for q in ins.targets:
                t.pauli(q, code)
        else:
            raise ValueError(f"unsupported kind {kind}")
    return t, record


def record_consistency(circuit: Circuit, rng_seed: int = 7) -> bool:
    """Detectors must XOR to zero on a noiseless tableau run, for any
    random-measurement branch."""
    rng = np.random.default_rng(rng_seed)
    _, record = run_tableau(circuit, rng=rng)
    for d in circuit.detectors:
        if sum(record[i] for i in d.absolute()) % 2 != 0:
            return False
    return True


def reference_record(circuit: Circuit, qubit_guard: int = _DEFAULT_GUARD) -> list[int]:
    """Record of the all-zeros measurement branch of a noiseless run.

    Bits that come out 1 deterministically mark measurements whose sign
    convention differs from the bookkeeping convention; builders normalize
    them with deterministic FLIP_RESULT(p=1) reframings.
    """
    _, record = run_tableau(circuit, rng=None, qubit_guard=qubit_guard)
    return record


def normalize_references(circuit: Circuit, flips: list[int]) -> Circuit:
    """Insert FLIP_RESULT(p=1) after the listed record bits' MZZ_PAIRs."""
    from .circuit import Instruction

    want = set(flips)
    out = []
    n_rec = 0
    for ins in circuit.instructions:
        out.append(ins)
        if ins.kind == "MZZ_PAIR":
            if n_rec in want:
                out.append(Instruction("FLIP_RESULT", ins.targets, 1.0))
            n_rec += 1
    return Circuit(
        circuit.n_qubits, circuit.ancilla, out, circuit.detectors, circuit.observables
    )
