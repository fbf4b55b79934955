"""Circuit-level distance certificate via the extracted matching graph."""

from __future__ import annotations

from ..circuit import Circuit
from ..dem import extract, min_logical_path


def circuit_graph_distance(circuit: Circuit) -> int | None:
    """Minimum number of matching-graph edges whose combined detector set
    is empty while flipping a logical observable.

    This is the quantity the CX schedules are certified against: it must
    equal the code distance, and drops to ceil(d/2) when a schedule
    admits hook errors aligned with a logical.
    """
    graph = extract(circuit)
    return min_logical_path(graph)
