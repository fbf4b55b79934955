"""Reduced-connectivity (3-CX) surface code on the ancilla-pair lattice.

Stabilizers are measured in a two-round walking cycle: a forward sequence
of four CX layers interleaved with pair swaps, a pair readout, then the
reversed sequence and another readout.  Each data qubit uses only three
couplings, giving an effective hexagonal lattice (8/3 average degree).
The boundary plaquettes pair up across the walk, which is what the
detector case analysis below encodes.  Logical initialization and final
readout go through the ancilla pairs only, since data qubits cannot be
measured directly on this layout.
"""

from __future__ import annotations

import networkx as nx

from ..circuit import Circuit, CircuitBuilder
from . import CodeSpec
from .layout import Layout, Plaquette

_CORNERS = (-1 + 1j, -1 - 2j, 2 + 1j, 2 - 2j)


class _Lattice:
    def __init__(self, d: int):
        self.d = d
        span = range(3, 3 * d + 1, 3)
        self.qubit_pos = [k + i * 1j for k in span for i in span]
        cells = [k + i * 1j for k in span for i in span if k != 3 * d or i != 3 * d]
        self.even_pos = [u + 1 + 2j for u in cells]
        self.odd_pos = [u + 2 + 1j for u in cells]
        anc = self.even_pos + self.odd_pos
        D = 3 * d
        self.posa = {
            a
            for a in anc
            if (a.real > D and (a.imag // 3) % 2 == 1)
            or (a.imag > D and (a.real // 3) % 2 == 0)
        }
        self.posb = {
            a
            for a in anc
            if (a.real > D and (a.imag // 3) % 2 == 0)
            or (a.imag > D and (a.real // 3) % 2 == 1)
        }
        self.even_x = [a for a in self.even_pos if (a.real - 1 + a.imag - 2) % 6 == 3]
        self.even_z = [a for a in self.even_pos if (a.real - 1 + a.imag - 2) % 6 == 0]
        self.odd_x = [a for a in self.odd_pos if (a.real - 2 + a.imag - 1) % 6 == 3]
        self.odd_z = [a for a in self.odd_pos if (a.real - 2 + a.imag - 1) % 6 == 0]

        def skey(v):
            return (v.real, v.imag)

        self.q2i = {q: i for i, q in enumerate(sorted(self.qubit_pos, key=skey))}
        n = len(self.q2i)
        self.e2i = {a: n + i for i, a in enumerate(sorted(self.even_pos, key=skey))}
        m = n + len(self.e2i)
        self.o2i = {a: m + i for i, a in enumerate(sorted(self.odd_pos, key=skey))}
        # pair per unit cell: (odd, even); the odd member is the reference
        self.pair_of_even = {
            ae: (self.o2i[ae + 1 - 1j], self.e2i[ae]) for ae in self.even_pos
        }

        # measured-even sets per half-cycle type
        ev = set(self.even_x)
        self.mx = {
            0: [a for a in self.even_pos if (a.real < D and a in set(self.even_z)) or a.imag > D],
            1: [a for a in self.even_pos if (a.real < D and a in ev) or a.imag > D],
        }
        self.mz = {
            0: [a for a in self.even_pos if (a.imag < D and a in ev) or a.real > D],
            1: [a for a in self.even_pos if (a.imag < D and a in set(self.even_z)) or a.real > D],
        }

        self.cx_layers = [
            [(self.e2i[a], self.q2i[a - 1 - 2j]) for a in self.even_x if a - 1 - 2j in self.q2i and a not in self.posb]
            + [(self.q2i[a - 1 - 2j], self.e2i[a]) for a in self.even_z if a - 1 - 2j in self.q2i and a not in self.posb],
            [(self.o2i[a], self.q2i[a + 1 - 1j]) for a in self.odd_x if a + 1 - 1j in self.q2i and a not in self.posb]
            + [(self.q2i[a - 1 + 1j], self.e2i[a]) for a in self.even_z if a - 1 + 1j in self.q2i and a not in self.posb],
            [(self.q2i[a - 1 + 1j], self.e2i[a]) for a in self.even_x if a - 1 + 1j in self.q2i and a not in self.posa]
            + [(self.o2i[a], self.q2i[a + 1 - 1j]) for a in self.odd_z if a + 1 - 1j in self.q2i and a not in self.posa],
            [(self.q2i[a - 1 - 2j], self.e2i[a]) for a in self.even_x if a - 1 - 2j in self.q2i and a not in self.posa]
            + [(self.e2i[a], self.q2i[a - 1 - 2j]) for a in self.even_z if a - 1 - 2j in self.q2i and a not in self.posa],
        ]
        x_pairs = [self.pair_of_even[a] for a in self.even_x]
        z_pairs = [self.pair_of_even[a] for a in self.even_z]
        all_pairs = [self.pair_of_even[a] for a in self.even_pos]
        self.swap_sets = {"x": x_pairs, "z": z_pairs, "all": all_pairs}

    @property
    def n_qubits(self) -> int:
        return len(self.q2i) + len(self.e2i) + len(self.o2i)


def _layout(lat: _Lattice) -> Layout:
    lay = Layout()
    for q, i in lat.q2i.items():
        lay.data_coords[i] = (q.real, q.imag)
    for a, i in lat.e2i.items():
        lay.ancilla_coords[i] = (a.real, a.imag)
    for a, i in lat.o2i.items():
        lay.ancilla_coords[i] = (a.real, a.imag)
    x_set = set(lat.even_x)
    for ae in lat.even_pos:
        pair = lat.pair_of_even[ae]
        lay.pairs.append(pair)
        kind = "X" if ae in x_set else "Z"
        corners = {}
        for j, off in enumerate(_CORNERS):
            if ae + off in lat.q2i:
                corners[f"c{j}"] = lat.q2i[ae + off]
        lay.plaquettes.append(Plaquette((ae.real, ae.imag), kind, corners, pair))
    D = 3 * lat.d
    for ae in lat.even_pos:
        if 6 < ae.real < D - 3 and 6 < ae.imag < D - 3:
            q = lat.q2i[ae - 1 - 2j]
            pair = lat.pair_of_even[ae]
            lay.bulk_cells.append((q, pair[0], pair[1]))
    return lay


def build_3cx(spec: CodeSpec) -> tuple[Circuit, Layout]:
    """Memory experiment; spec.rounds counts two-round walking cycles."""
    d = spec.distance
    noise = spec.noise
    lat = _Lattice(d)
    lay = _layout(lat)
    n_data = len(lat.q2i)
    data = list(range(n_data))
    ancillas = list(range(n_data, lat.n_qubits))
    b = CircuitBuilder(lat.n_qubits + 2, ancillas + [lat.n_qubits, lat.n_qubits + 1])
    all_pairs = lat.swap_sets["all"]
    pair_flat = [q for pr in all_pairs for q in pr]

    # data <-> pair assignment for swap-based init/readout (one extra pair)
    couplings: dict[int, set[int]] = {}
    for layer in lat.cx_layers:
        for u, v in layer:
            qd, qa = (u, v) if u < n_data else (v, u)
            couplings.setdefault(qd, set()).add(qa)
    member_pair = {}
    for pr in all_pairs:
        member_pair[pr[0]] = pr
        member_pair[pr[1]] = pr
    pair_id = {pr: k for k, pr in enumerate(all_pairs)}
    g = nx.Graph()
    for qd, members in sorted(couplings.items()):
        for m in sorted(members):
            g.add_edge(qd, n_data + pair_id[member_pair[m]])
    match = nx.bipartite.maximum_matching(g, top_nodes=data)
    assign: dict[int, tuple[tuple[int, int], int]] = {}
    unmatched = []
    for q in data:
        if q in match:
            pr = all_pairs[match[q] - n_data]
            member = next(m for m in pr if m in couplings[q])
            assign[q] = (pr, member)
        else:
            unmatched.append(q)
    if len(unmatched) != 1:
        raise RuntimeError(f"readout assignment failed: {len(unmatched)} leftover")
    extra_pair = (lat.n_qubits, lat.n_qubits + 1)
    qx = unmatched[0]
    assign[qx] = (extra_pair, extra_pair[0])
    xq, yq = lay.data_coords[qx]
    lay.pairs.append(extra_pair)
    lay.ancilla_coords[extra_pair[0]] = (xq + 0.5, yq - 0.5)
    lay.ancilla_coords[extra_pair[1]] = (xq + 1.5, yq - 0.5)
    ro_flat = pair_flat + list(extra_pair)

    rec: dict[tuple[int, complex], int] = {}

    def measure_block(cyc: int, half: int):
        xset = lat.mx[cyc]
        zset = lat.mz[cyc]
        hx = [lat.e2i[a] for a in xset]
        b.append("H", hx)
        b.append("DEP1", hx, noise.p_g1)
        b.tick()
        b.append("DEP2", pair_flat, noise.p_rr)
        for a in xset + zset:
            o, e = lat.pair_of_even[a]
            rec[(half, a)] = b.mzz(o, e, noise.p_rr)
        b.tick()
        b.append("RESET_Z", pair_flat)
        b.append("DEP2", pair_flat, noise.p_rr)
        b.tick()
        b.append("H", hx)
        b.append("DEP1", hx, noise.p_g1)
        b.tick()

    def cx_half(reverse: bool):
        order = (
            [(3, "z"), (2, "all"), (1, "x"), (0, None)]
            if reverse
            else [(0, "x"), (1, "all"), (2, "z"), (3, None)]
        )
        for li, swap in order:
            flat = [q for uv in lat.cx_layers[li] for q in uv]
            b.append("CX", flat)
            b.append("DEP2", flat, noise.p_g2)
            b.tick()
            if swap is not None:
                sflat = [q for pr in lat.swap_sets[swap] for q in pr]
                b.append("SWAP", sflat)
                b.append("DEP2", sflat, noise.p_g2)
                b.tick()

    def idle():
        b.append("PAULI_XY", data, noise.p_t1)
        b.append("PAULI_Z", data, noise.p_t2)
        b.tick()

    # ---- initialization: swap |0> in from reset pairs ------------------
    b.append("RESET_Z", ro_flat)
    b.append("DEP2", ro_flat, noise.p_rr)
    b.tick()
    iswaps = [t for q in data for t in (assign[q][1], q)]
    b.append("SWAP", iswaps)
    b.append("DEP2", iswaps, noise.p_g2)
    b.tick()
    b.append("RESET_Z", ro_flat)
    b.append("DEP2", ro_flat, noise.p_rr)
    b.tick()
    if spec.basis == "X":
        b.append("H", data)
        b.append("DEP1", data, noise.p_g1)
        b.tick()
    prep0 = [lat.e2i[a] for a in lat.mx[0]]
    b.append("H", prep0)
    b.append("DEP1", prep0, noise.p_g1)
    b.tick()

    D = 3 * d
    reals_a = {a.real for a in lat.posa}
    imags_a = {a.imag for a in lat.posa}
    reals_b = {a.real for a in lat.posb}
    imags_b = {a.imag for a in lat.posb}

    def flags(a: complex, side: str):
        first_col = a.imag // 3 == 1
        last_col = a.imag // 3 == d
        first_row = a.real // 3 == 1
        last_row = a.real // 3 == d
        reals, imags = (reals_a, imags_a) if side == "a" else (reals_b, imags_b)
        in_col = (a.real in reals) and not last_row
        in_row = (a.imag in imags) and not last_col
        return first_col, last_col, first_row, last_row, in_col, in_row

    def bulk_detectors(half: int, side: str):
        """Compare each plaquette with its walked image one half earlier."""
        for a in lat.even_pos:
            fc, lc, fr, lr, in_col, in_row = flags(a, side)
            targets = []
            if side == "b":
                if in_col:
                    if lc:
                        targets += [rec[(half - 1, a - 3j)], rec[(half - 1, a)]]
                    elif fc:
                        pass
                    elif not in_row:
                        targets.append(rec[(half - 1, a - 3j)])
                elif not lr:
                    if lc:
                        targets.append(rec[(half - 1, a)])
                    elif in_row:
                        targets.append(rec[(half - 1, a - 3j)])
                if in_row:
                    if lr:
                        targets += [rec[(half - 1, a - 3)], rec[(half - 1, a)]]
                    elif fr:
                        pass
                    elif in_col:
                        targets.append(rec[(half - 1, a - 3)])
                elif not lc:
                    if lr:
                        targets.append(rec[(half - 1, a)])
                    elif not in_col:
                        targets.append(rec[(half - 1, a - 3)])
            else:
                if in_col:
                    if lc:
                        targets += [rec[(half - 1, a - 3j)], rec[(half - 1, a)]]
                    elif fc:
                        pass
                    elif in_row:
                        targets.append(rec[(half - 1, a - 3j)])
                elif not lr:
                    if lc:
                        targets.append(rec[(half - 1, a)])
                    elif not in_row:
                        targets.append(rec[(half - 1, a - 3j)])
                if in_row:
                    if lr:
                        targets += [rec[(half - 1, a - 3)], rec[(half - 1, a)]]
                    elif fr:
                        pass
                    elif not in_col:
                        targets.append(rec[(half - 1, a - 3)])
                elif not lc:
                    if lr:
                        targets.append(rec[(half - 1, a)])
                    elif in_col:
                        targets.append(rec[(half - 1, a - 3)])
            targets.append(rec[(half, a)])
            b.detector(targets, (a.real / 3 - 0.5, a.imag / 3 - 0.5, float(half)))

    # ---- half-cycle sequence: B0, then (A, B) per walking cycle ---------
    half = 0
    cx_half(reverse=True)
    measure_block(1, half)
    idle()
    first_set = lat.mz[1] if spec.basis == "Z" else lat.mx[1]
    for a in first_set:
        b.detector([rec[(0, a)]], (a.real / 3 - 0.5, a.imag / 3 - 0.5, 0.0))

    for _cycle in range(spec.rounds):
        half += 1
        cx_half(reverse=False)
        measure_block(0, half)
        idle()
        bulk_detectors(half, "b")
        half += 1
        cx_half(reverse=True)
        measure_block(1, half)
        idle()
        bulk_detectors(half, "a")

    # ---- final readout through the assigned pairs -----------------------
    if spec.basis == "X":
        b.append("H", data)
        b.append("DEP1", data, noise.p_g1)
        b.tick()
    fswaps = [t for q in data for t in (q, assign[q][1])]
    b.append("SWAP", fswaps)
    b.append("DEP2", fswaps, noise.p_g2)
    b.tick()
    b.append("DEP2", ro_flat, noise.p_rr)
    data_rec = {}
    for q in data:
        o, e = assign[q][0]
        data_rec[q] = b.mzz(o, e, noise.p_rr)
    b.tick()

    relevant = lat.mz[1] if spec.basis == "Z" else lat.mx[1]
    relevant_set = set(relevant)
    for a in relevant:
        fc, lc, fr, lr, in_col_b, in_row_b = flags(a, "b")
        targets = []
        anchor = None
        if spec.basis == "Z":
            if in_row_b:
                if lr:
                    anchor = a - 3
                    targets += [rec[(half, a - 3)], rec[(half, a)]]
                elif not in_col_b:
                    anchor = a - 6
                    if a - 6 in relevant_set:
                        targets.append(rec[(half, a - 6)])
            elif not lc:
                if lr or in_col_b:
                    anchor = a
                    targets.append(rec[(half, a)])
        else:
            if in_col_b:
                if lc:
                    anchor = a - 3j
                    targets += [rec[(half, a - 3j)], rec[(half, a)]]
                elif in_row_b:
                    anchor = a - 6j
                    if a - 6j in relevant_set:
                        targets.append(rec[(half, a - 6j)])
            elif not lr:
                if not in_row_b:
                    anchor = a
                    targets.append(rec[(half, a)])
        if anchor is None:
            continue
        corners = [lat.q2i[anchor + off] for off in _CORNERS if anchor + off in lat.q2i]
        targets += [data_rec[q] for q in corners]
        b.detector(targets, (a.real / 3 - 0.5, a.imag / 3 - 0.5, float(half + 1)))

    if spec.basis == "Z":
        support = [lat.q2i[k + 3j] for k in range(3, 3 * d + 1, 3)]
    else:
        support = [lat.q2i[3 + k * 1j] for k in range(3, 3 * d + 1, 3)]
    b.observable(0, [data_rec[q] for q in support])

    return b.finish(), lay
