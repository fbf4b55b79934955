"""Geometric layout data shared by the code builders.

Coordinates use a doubled integer grid (data on odd-odd sites for the
square-lattice codes) so plaquette centers and ancilla positions stay
integral or half-integral.  The layout is diagnostic and plotting data;
decoding never depends on it.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Plaquette:
    center: tuple[float, float]
    kind: str  # "Z", "X", or a family-specific label
    corners: dict[str, int]  # role -> data qubit index
    pair: tuple[int, int]  # (north/left member, south/right member)


@dataclass
class Layout:
    data_coords: dict[int, tuple[float, float]] = field(default_factory=dict)
    ancilla_coords: dict[int, tuple[float, float]] = field(default_factory=dict)
    pairs: list[tuple[int, int]] = field(default_factory=list)
    plaquettes: list[Plaquette] = field(default_factory=list)
    bulk_cells: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def n_qubits(self) -> int:
        return len(self.data_coords) + len(self.ancilla_coords)

    def to_text(self) -> str:
        """Structured text export for plotting tools."""
        lines = []
        for q, (x, y) in sorted(self.data_coords.items()):
            lines.append(f"data {q} {x:g} {y:g}")
        for q, (x, y) in sorted(self.ancilla_coords.items()):
            lines.append(f"ancilla {q} {x:g} {y:g}")
        for a, b in self.pairs:
            lines.append(f"pair {a} {b}")
        for p in self.plaquettes:
            members = " ".join(f"{role}:{q}" for role, q in sorted(p.corners.items()))
            lines.append(f"plaquette {p.kind} {p.center[0]:g} {p.center[1]:g} {members}")
        return "\n".join(lines) + "\n"
