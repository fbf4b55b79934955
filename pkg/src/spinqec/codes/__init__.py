"""Memory-experiment circuit builders for the six code families.

All builders honor the spin-qubit constraints: ancillas live in pairs read
out by a joint ZZ parity measurement, data qubits are initialized and read
out by swapping through adjacent ancilla pairs (where the family supports
fault-tolerant boundaries), and CX schedules are hook-safe as certified by
the graph-distance check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from ..noise import NoiseParams


class Family(str, Enum):
    SURFACE = "surface"
    XZZX = "xzzx"
    THREE_CX = "3cx"
    XYZ2 = "xyz2"
    FLOQUET_COLOR = "floquet-color"
    HONEYCOMB = "honeycomb"


class Protocol(str, Enum):
    SWAP_REFERENCE = "swap-reference"
    BELL_STATE = "bell-state"


_FLOQUET = (Family.FLOQUET_COLOR, Family.HONEYCOMB)


@dataclass(frozen=True)
class CodeSpec:
    family: Family
    distance: int
    rounds: int
    basis: str = "Z"
    noise: NoiseParams = field(default_factory=NoiseParams)
    protocol: Protocol | None = None

    def __post_init__(self):
        if self.basis not in ("Z", "X"):
            raise ValueError(f"basis {self.basis!r} not in {{Z, X}}")
        if self.rounds < 1:
            raise ValueError("rounds must be positive")
        fam = Family(self.family)
        if fam in _FLOQUET:
            if self.distance % 2 != 0 or self.distance < 4:
                raise ValueError("Floquet families need even distance >= 4")
            if self.protocol == Protocol.SWAP_REFERENCE:
                raise ValueError("Floquet builders implement the Bell-state protocol")
        else:
            if self.distance % 2 != 1 or self.distance < 3:
                raise ValueError(f"{fam.value} needs odd distance >= 3")
            if self.protocol == Protocol.BELL_STATE:
                raise ValueError(f"{fam.value} uses the swap-reference protocol here")

    @property
    def effective_protocol(self) -> Protocol:
        if Family(self.family) in _FLOQUET:
            return Protocol.BELL_STATE
        return Protocol.SWAP_REFERENCE


def build(spec: CodeSpec, **kwargs):
    """Dispatch to the family builder; returns (Circuit, Layout)."""
    from . import floquet, surface, threecx, xyz2

    fam = Family(spec.family)
    if fam == Family.SURFACE:
        return surface.build_surface(spec, **kwargs)
    if fam == Family.XZZX:
        return surface.build_xzzx(spec, **kwargs)
    if fam == Family.THREE_CX:
        return threecx.build_3cx(spec, **kwargs)
    if fam == Family.XYZ2:
        return xyz2.build_xyz2(spec, **kwargs)
    return floquet.build_floquet(spec, **kwargs)
