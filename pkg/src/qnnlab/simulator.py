"""Dense statevector simulation: gate application and expectation values.

Basis convention: qubit 0 is the most significant bit of the basis index,
so for an ``n``-qubit state the bit of qubit ``q`` in basis index ``i`` is
``(i >> (n - 1 - q)) & 1``.  Rotation gates follow R_sigma(theta) =
exp(-i * theta * sigma / 2) = cos(theta/2) I - i sin(theta/2) sigma.

Gates act in place on the amplitude array through strided views; no
2^n x 2^n matrices are ever materialized.  All kernels accept amplitude
arrays of shape ``(..., 2**n)`` so a batch of states (e.g. one row per
training sample) is transformed in a single call.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .exceptions import ConfigError

MAX_QUBITS = 24


class GateKind(str, Enum):
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    CNOT = "cnot"
    CY = "cy"
    CZ = "cz"
    SWAP = "swap"
    IDENTITY = "id"


ROTATION_KINDS = frozenset({GateKind.RX, GateKind.RY, GateKind.RZ})
TWO_QUBIT_KINDS = frozenset({GateKind.CNOT, GateKind.CY, GateKind.CZ, GateKind.SWAP})

# Self-inverse two-qubit kinds; rotations invert by negating the angle.
SELF_INVERSE_KINDS = TWO_QUBIT_KINDS | {GateKind.IDENTITY}


@dataclass(frozen=True)
class Gate:
    """One circuit operation.

    Rotation kinds carry exactly one of ``angle`` (fixed, radians) or
    ``param_index`` (position in the trainable parameter vector).
    Two-qubit kinds carry two distinct targets and no angle source.
    """

    kind: GateKind
    targets: tuple[int, ...]
    angle: float | None = None
    param_index: int | None = None

    def __post_init__(self):
        kind = self.kind
        if kind in ROTATION_KINDS:
            if len(self.targets) != 1:
                raise ValueError(f"{kind.value} takes one target, got {self.targets}")
            if (self.angle is None) == (self.param_index is None):
                raise ValueError(
                    f"{kind.value} needs exactly one of angle or param_index"
                )
        elif kind in TWO_QUBIT_KINDS:
            if len(self.targets) != 2 or self.targets[0] == self.targets[1]:
                raise ValueError(f"{kind.value} takes two distinct targets")
            if self.angle is not None or self.param_index is not None:
                raise ValueError(f"{kind.value} takes no angle source")
        else:  # IDENTITY
            if self.angle is not None or self.param_index is not None:
                raise ValueError("identity takes no angle source")

    @property
    def is_rotation(self) -> bool:
        return self.kind in ROTATION_KINDS

    @property
    def is_two_qubit(self) -> bool:
        return self.kind in TWO_QUBIT_KINDS


class ObservableKind(str, Enum):
    PAULI_Z_LAST = "z_last"
    PROJ0_LAST = "proj0_last"
    TENSOR_PAULI = "tensor_pauli"


@dataclass(frozen=True)
class Observable:
    """Measured operator H with closed-form Tr[H] and Tr[H^2].

    PAULI_Z_LAST is I x ... x I x sigma_Z on the last qubit, PROJ0_LAST is
    I x ... x I x |0><0|.  TENSOR_PAULI carries a per-qubit assignment from
    {I, X, Y, Z} as a string such as "ZIX".
    """

    kind: ObservableKind
    paulis: str | None = None

    def __post_init__(self):
        if self.kind is ObservableKind.TENSOR_PAULI:
            if not self.paulis or any(p not in "IXYZ" for p in self.paulis):
                raise ValueError("tensor_pauli needs a per-qubit string over IXYZ")
        elif self.paulis is not None:
            raise ValueError(f"{self.kind.value} takes no pauli string")

    @classmethod
    def z_last(cls) -> "Observable":
        return cls(ObservableKind.PAULI_Z_LAST)

    @classmethod
    def proj0_last(cls) -> "Observable":
        return cls(ObservableKind.PROJ0_LAST)

    @classmethod
    def tensor_pauli(cls, paulis: str) -> "Observable":
        return cls(ObservableKind.TENSOR_PAULI, paulis=paulis)

    @property
    def name(self) -> str:
        if self.kind is ObservableKind.TENSOR_PAULI:
            return f"tensor_pauli:{self.paulis}"
        return self.kind.value


def observable_from_name(name: str) -> Observable:
    """Resolve "z_last", "proj0_last" or "tensor_pauli:<string>"."""
    if name == ObservableKind.PAULI_Z_LAST.value:
        return Observable.z_last()
    if name == ObservableKind.PROJ0_LAST.value:
        return Observable.proj0_last()
    if name.startswith("tensor_pauli:"):
        return Observable.tensor_pauli(name.split(":", 1)[1])
    raise ConfigError(f"unknown observable {name!r}")


@dataclass
class StateVector:
    """2^n complex amplitudes; qubit 0 is the most significant bit."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (1 << self.num_qubits,):
            raise ValueError(
                f"expected {1 << self.num_qubits} amplitudes, "
                f"got shape {self.amplitudes.shape}"
            )

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def init_zero_state(num_qubits: int) -> StateVector:
    """|0...0> on ``num_qubits`` qubits."""
    if not 1 <= num_qubits <= MAX_QUBITS:
        raise ConfigError(
            f"num_qubits must be in [1, {MAX_QUBITS}], got {num_qubits}"
        )
    amps = np.zeros(1 << num_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(num_qubits, amps)


# ---------------------------------------------------------------------------
# dense 2x2 / 4x4 matrices (used by kernels and as the test oracle surface)

def rotation_matrix(kind: GateKind, theta: float) -> np.ndarray:
    """2x2 matrix of R_sigma(theta) = exp(-i theta sigma / 2)."""
    c = np.cos(theta / 2.0)
    s = np.sin(theta / 2.0)
    if kind is GateKind.RX:
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    if kind is GateKind.RY:
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    if kind is GateKind.RZ:
        return np.array(
            [[np.exp(-0.5j * theta), 0.0], [0.0, np.exp(0.5j * theta)]],
            dtype=np.complex128,
        )
    raise ValueError(f"{kind.value} is not a rotation")


_CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
)
_CY = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, -1j], [0, 0, 1j, 0]], dtype=np.complex128
)
_CZ = np.diag([1, 1, 1, -1]).astype(np.complex128)
_SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.complex128
)
_TWO_QUBIT_MATRIX = {
    GateKind.CNOT: _CNOT,
    GateKind.CY: _CY,
    GateKind.CZ: _CZ,
    GateKind.SWAP: _SWAP,
}

PAULI_MATRICES = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


def gate_matrix(gate: Gate, params: Sequence[float] = ()) -> np.ndarray:
    """Dense matrix of ``gate`` in the basis (targets[0], targets[1]),
    targets[0] being the more significant bit of the pair."""
    if gate.is_rotation:
        return rotation_matrix(gate.kind, _resolve_angle(gate, params))
    if gate.is_two_qubit:
        return _TWO_QUBIT_MATRIX[gate.kind].copy()
    return np.eye(2, dtype=np.complex128)


def _resolve_angle(gate: Gate, params: Sequence[float]) -> float:
    if gate.angle is not None:
        return float(gate.angle)
    if gate.param_index is None or not 0 <= gate.param_index < len(params):
        raise ValueError(
            f"gate needs parameter index {gate.param_index}, "
            f"got {len(params)} parameters"
        )
    return float(params[gate.param_index])


# ---------------------------------------------------------------------------
# in-place strided kernels over amplitude arrays of shape (..., 2**n)

def _single_views(amps: np.ndarray, n: int, q: int):
    """Views (s0, s1) of the q-bit=0 / q-bit=1 halves, each (..., 2^q, 2^(n-q-1))."""
    shaped = amps.reshape(amps.shape[:-1] + (1 << q, 2, 1 << (n - q - 1)))
    return shaped[..., 0, :], shaped[..., 1, :]


def _apply_single(amps: np.ndarray, n: int, q: int, m: np.ndarray) -> None:
    s0, s1 = _single_views(amps, n, q)
    old0 = s0.copy()
    s0 *= m[0, 0]
    s0 += m[0, 1] * s1
    s1 *= m[1, 1]
    s1 += m[1, 0] * old0


def _pair_view(amps: np.ndarray, n: int, qa: int, qb: int) -> np.ndarray:
    """Reshape exposing the bits of qubits qa < qb as two length-2 axes;
    component (i, j) is ``view[..., i, :, j, :]``."""
    assert qa < qb
    return amps.reshape(
        amps.shape[:-1]
        + (1 << qa, 2, 1 << (qb - qa - 1), 2, 1 << (n - qb - 1))
    )


def _apply_cnot(amps: np.ndarray, n: int, control: int, target: int) -> None:
    qa, qb = min(control, target), max(control, target)
    v = _pair_view(amps, n, qa, qb)
    if control < target:
        t0, t1 = v[..., 1, :, 0, :], v[..., 1, :, 1, :]
    else:
        t0, t1 = v[..., 0, :, 1, :], v[..., 1, :, 1, :]
    tmp = t0.copy()
    t0[...] = t1
    t1[...] = tmp


def _apply_cy(amps: np.ndarray, n: int, control: int, target: int) -> None:
    qa, qb = min(control, target), max(control, target)
    v = _pair_view(amps, n, qa, qb)
    if control < target:
        t0, t1 = v[..., 1, :, 0, :], v[..., 1, :, 1, :]
    else:
        t0, t1 = v[..., 0, :, 1, :], v[..., 1, :, 1, :]
    tmp = t0.copy()
    t0[...] = -1j * t1
    t1[...] = 1j * tmp


def _apply_cz(amps: np.ndarray, n: int, a: int, b: int) -> None:
    qa, qb = min(a, b), max(a, b)
    v = _pair_view(amps, n, qa, qb)
    v[..., 1, :, 1, :] *= -1.0


def _apply_swap(amps: np.ndarray, n: int, a: int, b: int) -> None:
    qa, qb = min(a, b), max(a, b)
    v = _pair_view(amps, n, qa, qb)
    s01, s10 = v[..., 0, :, 1, :], v[..., 1, :, 0, :]
    tmp = s01.copy()
    s01[...] = s10
    s10[...] = tmp


def apply_gate_inplace(
    amps: np.ndarray, num_qubits: int, gate: Gate, params: Sequence[float] = ()
) -> None:
    """Apply ``gate`` in place to amplitudes of shape (..., 2**num_qubits).

    This is the hot path shared by circuit evaluation and training; it
    performs target validation but no copying of the full array.
    """
    if not amps.flags.c_contiguous:
        raise ValueError("amplitude array must be C-contiguous for in-place kernels")
    for q in gate.targets:
        if not 0 <= q < num_qubits:
            raise ValueError(f"target {q} out of range for {num_qubits} qubits")
    kind = gate.kind
    if kind in ROTATION_KINDS:
        theta = _resolve_angle(gate, params)
        _apply_single(amps, num_qubits, gate.targets[0], rotation_matrix(kind, theta))
    elif kind is GateKind.CNOT:
        _apply_cnot(amps, num_qubits, *gate.targets)
    elif kind is GateKind.CY:
        _apply_cy(amps, num_qubits, *gate.targets)
    elif kind is GateKind.CZ:
        _apply_cz(amps, num_qubits, *gate.targets)
    elif kind is GateKind.SWAP:
        _apply_swap(amps, num_qubits, *gate.targets)
    # IDENTITY: nothing to do


def apply_gate(
    state: StateVector, gate: Gate, params: Sequence[float] = ()
) -> StateVector:
    """Pure gate application: returns a new StateVector, input untouched."""
    amps = state.amplitudes.copy()
    apply_gate_inplace(amps, state.num_qubits, gate, params)
    return StateVector(state.num_qubits, amps)


# ---------------------------------------------------------------------------
# expectation values

def expectation_batch(
    amps: np.ndarray, num_qubits: int, obs: Observable
) -> np.ndarray:
    """<psi|H|psi> for each state in an array of shape (..., 2**num_qubits)."""
    n = num_qubits
    if amps.shape[-1] != 1 << n:
        raise ValueError(
            f"expected trailing dimension {1 << n}, got {amps.shape[-1]}"
        )
    if obs.kind is ObservableKind.PROJ0_LAST:
        # last qubit (n-1) is the least significant bit
        view = amps.reshape(amps.shape[:-1] + (1 << (n - 1), 2))
        return np.sum(np.abs(view[..., 0]) ** 2, axis=-1)
    if obs.kind is ObservableKind.PAULI_Z_LAST:
        view = amps.reshape(amps.shape[:-1] + (1 << (n - 1), 2))
        p = np.abs(view) ** 2
        return np.sum(p[..., 0] - p[..., 1], axis=-1)
    # TENSOR_PAULI: apply the Pauli string to a copy, then overlap
    if len(obs.paulis) != n:
        raise ValueError(
            f"observable covers {len(obs.paulis)} qubits, state has {n}"
        )
    transformed = amps.copy()
    for q, p in enumerate(obs.paulis):
        if p != "I":
            _apply_single(transformed, n, q, PAULI_MATRICES[p])
    return np.real(np.einsum("...i,...i->...", np.conj(amps), transformed))


def expectation(state: StateVector, obs: Observable) -> float:
    """<psi|H|psi> as a real number (imaginary residue below 1e-12 discarded)."""
    return float(expectation_batch(state.amplitudes, state.num_qubits, obs))


def trace(obs: Observable, d: int) -> float:
    """Closed-form Tr[H] on a Hilbert space of dimension d = 2^N."""
    _check_dim(obs, d)
    if obs.kind is ObservableKind.PAULI_Z_LAST:
        return 0.0
    if obs.kind is ObservableKind.PROJ0_LAST:
        return d / 2.0
    return float(d) if all(p == "I" for p in obs.paulis) else 0.0


def trace_sq(obs: Observable, d: int) -> float:
    """Closed-form Tr[H^2] on a Hilbert space of dimension d = 2^N."""
    _check_dim(obs, d)
    if obs.kind is ObservableKind.PROJ0_LAST:
        return d / 2.0  # projector: H^2 = H
    return float(d)  # Pauli strings square to identity


def _check_dim(obs: Observable, d: int) -> None:
    if d < 2 or d & (d - 1):
        raise ValueError(f"dimension must be a power of two >= 2, got {d}")
    if obs.kind is ObservableKind.TENSOR_PAULI and d != 1 << len(obs.paulis):
        raise ValueError(
            f"dimension {d} inconsistent with {len(obs.paulis)}-qubit pauli string"
        )
