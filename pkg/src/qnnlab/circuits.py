"""Circuit IR and ansatz construction.

A circuit is L layers, each one rotation per qubit (the trainable part)
followed by parameter-free two-qubit gates.  Two families are provided:

* random: a single layer template is drawn once (rotation axis per qubit,
  a two-qubit gate or nothing per qubit pair) and repeated L times, so all
  layers share gate kinds and targets and differ only in parameter indices.
* fixed: RY on every qubit, then a CNOT entangler; either the linear chain
  (unrestricted) or exactly the coupling-graph edges among the first N
  physical qubits (restricted), control on the lower index.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np

from .exceptions import ConfigError
from .simulator import (
    Gate,
    GateKind,
    Observable,
    StateVector,
    apply_gate_inplace,
    expectation_batch,
)
from .topology import CouplingGraph


class AnsatzFamily(str, Enum):
    RANDOM = "random"
    FIXED = "fixed"


@dataclass(frozen=True)
class AnsatzSpec:
    family: AnsatzFamily
    num_qubits: int
    depth: int
    restricted: bool = False
    topology_name: str = "guadalupe"
    rng_seed: int = 0

    def __post_init__(self):
        if self.depth < 1:
            raise ConfigError(f"depth must be >= 1, got {self.depth}")
        if self.num_qubits < 2:
            raise ConfigError(f"num_qubits must be >= 2, got {self.num_qubits}")


@dataclass
class ParametrizedCircuit:
    """Gate layers plus bookkeeping; immutable by convention after build."""

    num_qubits: int
    layers: list[list[Gate]]
    num_params: int
    metadata: dict = field(default_factory=dict)

    def gates(self):
        for layer in self.layers:
            yield from layer

    @property
    def depth(self) -> int:
        return len(self.layers)

    def two_qubit_gates(self) -> list[Gate]:
        return [g for g in self.gates() if g.is_two_qubit]


_AXIS_POOL = (GateKind.RX, GateKind.RY, GateKind.RZ)
_PAIR_POOL = (GateKind.IDENTITY, GateKind.CNOT, GateKind.CY, GateKind.CZ)


def _candidate_pairs(
    num_qubits: int, restricted: bool, topology: CouplingGraph
) -> list[tuple[int, int]]:
    if not restricted:
        return [
            (a, b) for a in range(num_qubits) for b in range(a + 1, num_qubits)
        ]
    if num_qubits > topology.num_qubits:
        raise ConfigError(
            f"{num_qubits} qubits exceed topology "
            f"{topology.name!r} ({topology.num_qubits})"
        )
    return topology.edges_among(num_qubits)


def build_random_ansatz(
    spec: AnsatzSpec, topology: CouplingGraph
) -> ParametrizedCircuit:
    """Draw a random layer template and repeat it ``spec.depth`` times.

    Per qubit the rotation axis is uniform over {X, Y, Z}; per candidate
    qubit pair (all pairs unrestricted, coupling edges restricted) a gate is
    drawn uniformly from {identity, CNOT, CY, CZ}, identity draws emitting
    no gate, with control/target orientation drawn uniformly for the rest.
    Deterministic given ``spec.rng_seed``.
    """
    if spec.family is not AnsatzFamily.RANDOM:
        raise ConfigError(f"expected random family, got {spec.family.value}")
    n = spec.num_qubits
    rng = np.random.default_rng(spec.rng_seed)
    axes = [_AXIS_POOL[k] for k in rng.integers(0, 3, size=n)]
    pair_template: list[tuple[GateKind, int, int]] = []
    for a, b in _candidate_pairs(n, spec.restricted, topology):
        kind = _PAIR_POOL[int(rng.integers(0, 4))]
        if kind is GateKind.IDENTITY:
            continue
        if int(rng.integers(0, 2)):
            a, b = b, a
        pair_template.append((kind, a, b))

    layers = []
    for layer_idx in range(spec.depth):
        layer = [
            Gate(axes[q], (q,), param_index=layer_idx * n + q) for q in range(n)
        ]
        layer += [Gate(kind, (a, b)) for kind, a, b in pair_template]
        layers.append(layer)
    return ParametrizedCircuit(
        num_qubits=n,
        layers=layers,
        num_params=spec.depth * n,
        metadata=_metadata(spec, topology),
    )


def build_fixed_ansatz(
    spec: AnsatzSpec, topology: CouplingGraph
) -> ParametrizedCircuit:
    """RY-per-qubit layers with a CNOT entangler, repeated ``spec.depth`` times.

    Unrestricted: CNOTs on the linear chain (q, q+1).  Restricted: CNOTs on
    exactly the coupling edges among physical qubits 0..N-1, in lexicographic
    order.  Control is always the lower qubit index.
    """
    if spec.family is not AnsatzFamily.FIXED:
        raise ConfigError(f"expected fixed family, got {spec.family.value}")
    n = spec.num_qubits
    if spec.restricted:
        entangler = _candidate_pairs(n, True, topology)
    else:
        entangler = [(q, q + 1) for q in range(n - 1)]
    layers = []
    for layer_idx in range(spec.depth):
        layer = [
            Gate(GateKind.RY, (q,), param_index=layer_idx * n + q)
            for q in range(n)
        ]
        layer += [Gate(GateKind.CNOT, (a, b)) for a, b in entangler]
        layers.append(layer)
    return ParametrizedCircuit(
        num_qubits=n,
        layers=layers,
        num_params=spec.depth * n,
        metadata=_metadata(spec, topology),
    )


def build_ansatz(spec: AnsatzSpec, topology: CouplingGraph) -> ParametrizedCircuit:
    if spec.family is AnsatzFamily.RANDOM:
        return build_random_ansatz(spec, topology)
    return build_fixed_ansatz(spec, topology)


def _metadata(spec: AnsatzSpec, topology: CouplingGraph) -> dict:
    return {
        "family": spec.family.value,
        "seed": int(spec.rng_seed),
        "restricted": spec.restricted,
        "topology": topology.name if spec.restricted else None,
        "depth": spec.depth,
    }


# ---------------------------------------------------------------------------
# evaluation

def apply_circuit_inplace(
    circuit: ParametrizedCircuit, params: Sequence[float], amps: np.ndarray
) -> None:
    """Run every layer on amplitudes of shape (..., 2**n), in place."""
    if len(params) != circuit.num_params:
        raise ValueError(
            f"expected {circuit.num_params} parameters, got {len(params)}"
        )
    for gate in circuit.gates():
        apply_gate_inplace(amps, circuit.num_qubits, gate, params)


def evaluate(
    circuit: ParametrizedCircuit,
    params: Sequence[float],
    input_state: StateVector,
    obs: Observable,
) -> float:
    """f(x, U) = <x|U(theta)^dag H U(theta)|x>; the input state is not mutated."""
    if input_state.num_qubits != circuit.num_qubits:
        raise ValueError(
            f"state has {input_state.num_qubits} qubits, "
            f"circuit has {circuit.num_qubits}"
        )
    amps = input_state.amplitudes.copy()
    apply_circuit_inplace(circuit, params, amps)
    return float(expectation_batch(amps, circuit.num_qubits, obs))


def evaluate_batch(
    circuit: ParametrizedCircuit,
    params: Sequence[float],
    input_amps: np.ndarray,
    obs: Observable,
) -> np.ndarray:
    """Vectorized f over a stack of input states, shape (..., 2**n)."""
    amps = np.array(input_amps, dtype=np.complex128)
    apply_circuit_inplace(circuit, params, amps)
    return expectation_batch(amps, circuit.num_qubits, obs)


# ---------------------------------------------------------------------------
# serialization (reproducibility artifacts)

def circuit_to_dict(circuit: ParametrizedCircuit) -> dict:
    def gate_dict(g: Gate) -> dict:
        d = {"kind": g.kind.value, "targets": list(g.targets)}
        if g.angle is not None:
            d["angle"] = g.angle
        if g.param_index is not None:
            d["param_index"] = g.param_index
        return d

    return {
        "num_qubits": circuit.num_qubits,
        "num_params": circuit.num_params,
        "metadata": circuit.metadata,
        "layers": [[gate_dict(g) for g in layer] for layer in circuit.layers],
    }


def circuit_from_dict(data: dict) -> ParametrizedCircuit:
    layers = [
        [
            Gate(
                GateKind(g["kind"]),
                tuple(g["targets"]),
                angle=g.get("angle"),
                param_index=g.get("param_index"),
            )
            for g in layer
        ]
        for layer in data["layers"]
    ]
    return ParametrizedCircuit(
        num_qubits=int(data["num_qubits"]),
        layers=layers,
        num_params=int(data["num_params"]),
        metadata=dict(data.get("metadata", {})),
    )


def save_circuit(circuit: ParametrizedCircuit, path: str | Path) -> None:
    Path(path).write_text(json.dumps(circuit_to_dict(circuit), indent=2) + "\n")


def load_circuit(path: str | Path) -> ParametrizedCircuit:
    return circuit_from_dict(json.loads(Path(path).read_text()))
