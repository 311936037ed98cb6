"""Chip coupling graphs, connectivity queries and SWAP-routing cost.

The routing model is deliberately naive: to apply a two-qubit gate between
qubits at shortest-path distance k, swap one operand in along the path
(k - 1 swaps), apply the gate, and swap back out, so 2(k - 1) SWAPs total
and each SWAP costs three physical CNOTs.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING

from .exceptions import ConfigError

if TYPE_CHECKING:
    from .circuits import ParametrizedCircuit


@dataclass(frozen=True)
class CouplingGraph:
    """Undirected qubit-connectivity graph of a chip."""

    name: str
    num_qubits: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        object.__setattr__(
            self,
            "edges",
            frozenset(tuple(sorted(e)) for e in self.edges),
        )
        for a, b in self.edges:
            if a == b:
                raise ConfigError(f"self-loop on qubit {a}")
            if not (0 <= a < self.num_qubits and 0 <= b < self.num_qubits):
                raise ConfigError(f"edge ({a}, {b}) out of range")
        if self.num_qubits >= 2 and not self._is_connected():
            raise ConfigError(f"coupling graph {self.name!r} is not connected")

    def _is_connected(self) -> bool:
        seen = {0}
        frontier = deque([0])
        while frontier:
            q = frontier.popleft()
            for r in self.neighbors(q):
                if r not in seen:
                    seen.add(r)
                    frontier.append(r)
        return len(seen) == self.num_qubits

    def has_edge(self, a: int, b: int) -> bool:
        return tuple(sorted((a, b))) in self.edges

    def neighbors(self, q: int) -> list[int]:
        out = []
        for a, b in self.edges:
            if a == q:
                out.append(b)
            elif b == q:
                out.append(a)
        return sorted(out)

    def degree(self, q: int) -> int:
        return len(self.neighbors(q))

    def edges_among(self, num_qubits: int) -> list[tuple[int, int]]:
        """Edges whose endpoints both lie below ``num_qubits``, sorted."""
        return sorted(e for e in self.edges if e[0] < num_qubits and e[1] < num_qubits)


# IBM Guadalupe: 16 qubits, heavy-hex connectivity.
GUADALUPE_EDGES = (
    (0, 1), (1, 2), (1, 4), (2, 3), (3, 5), (4, 7), (5, 8), (6, 7),
    (7, 10), (8, 9), (8, 11), (10, 12), (11, 14), (12, 13), (12, 15), (13, 14),
)


def guadalupe() -> CouplingGraph:
    return CouplingGraph("guadalupe", 16, frozenset(GUADALUPE_EDGES))


def fully_connected(num_qubits: int, name: str = "all_to_all") -> CouplingGraph:
    edges = frozenset(
        (a, b) for a in range(num_qubits) for b in range(a + 1, num_qubits)
    )
    return CouplingGraph(name, num_qubits, edges)


def distance(g: CouplingGraph, a: int, b: int) -> int:
    """Unweighted shortest-path edge count between two distinct qubits."""
    for q in (a, b):
        if not 0 <= q < g.num_qubits:
            raise ValueError(f"qubit {q} out of range for {g.name!r}")
    if a == b:
        raise ValueError("distance requires distinct qubits")
    dist = {a: 0}
    frontier = deque([a])
    while frontier:
        q = frontier.popleft()
        for r in g.neighbors(q):
            if r not in dist:
                dist[r] = dist[q] + 1
                if r == b:
                    return dist[r]
                frontier.append(r)
    raise ValueError(f"no path between {a} and {b}")  # unreachable: graph connected


@dataclass(frozen=True)
class RoutingReport:
    swaps: int
    physical_cnots: int


def routing_cost(g: CouplingGraph, a: int, b: int) -> RoutingReport:
    """SWAP count and physical CNOTs to realize one logical CNOT on (a, b)."""
    swaps = 2 * (distance(g, a, b) - 1)
    return RoutingReport(swaps=swaps, physical_cnots=3 * swaps + 1)


@dataclass(frozen=True)
class OverheadReport:
    logical_two_qubit: int
    swaps: int
    physical_cnots: int


def transpile_overhead(circuit: "ParametrizedCircuit", g: CouplingGraph) -> OverheadReport:
    """Total routing cost of a circuit's two-qubit gates on graph ``g``.

    CY/CZ (and SWAP) are costed as CNOT-equivalents: one logical two-qubit
    gate each, differing from CNOT only by single-qubit conjugation.
    """
    if circuit.num_qubits > g.num_qubits:
        raise ValueError(
            f"circuit spans {circuit.num_qubits} qubits, "
            f"{g.name!r} has {g.num_qubits}"
        )
    logical = 0
    swaps = 0
    physical = 0
    for gate in circuit.two_qubit_gates():
        report = routing_cost(g, *gate.targets)
        logical += 1
        swaps += report.swaps
        physical += report.physical_cnots
    return OverheadReport(
        logical_two_qubit=logical, swaps=swaps, physical_cnots=physical
    )


# ---------------------------------------------------------------------------
# JSON schema: {"name": str, "num_qubits": int, "edges": [[a, b], ...]}

def load_coupling_graph(path: str | Path) -> CouplingGraph:
    try:
        data = json.loads(Path(path).read_text())
        return CouplingGraph(
            name=str(data["name"]),
            num_qubits=int(data["num_qubits"]),
            edges=frozenset(tuple(e) for e in data["edges"]),
        )
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"malformed coupling-graph file {path}: {exc}") from exc


def save_coupling_graph(g: CouplingGraph, path: str | Path) -> None:
    data = {
        "name": g.name,
        "num_qubits": g.num_qubits,
        "edges": [list(e) for e in sorted(g.edges)],
    }
    Path(path).write_text(json.dumps(data, indent=2) + "\n")


def coupling_graph_from_name(name_or_path: str) -> CouplingGraph:
    """Resolve a built-in graph name or a JSON file path."""
    if name_or_path == "guadalupe":
        return guadalupe()
    path = Path(name_or_path)
    if path.exists():
        return load_coupling_graph(path)
    raise ConfigError(f"unknown topology {name_or_path!r}")
