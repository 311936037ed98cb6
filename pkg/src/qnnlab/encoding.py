"""Classical-to-quantum data encoders.

All encoders return unit-norm states.  The amplitude encoder normalizes by
the Euclidean norm of the input (the only choice that yields a unit vector);
the per-qubit encoders build product states directly.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .simulator import StateVector

Encoder = Callable[[Sequence[float], int], StateVector]


def wavefunction_encode(x: Sequence[float], num_qubits: int) -> StateVector:
    """Amplitude encoding: amplitudes x_i / ||x||_2, zero-padded to 2^n."""
    x = np.asarray(x, dtype=np.float64)
    dim = 1 << num_qubits
    if x.ndim != 1 or x.size > dim:
        raise ValueError(f"need a vector of at most {dim} features, got {x.shape}")
    norm = np.linalg.norm(x)
    if norm == 0.0:
        raise ValueError("cannot normalize an all-zero feature vector")
    amps = np.zeros(dim, dtype=np.complex128)
    amps[: x.size] = x / norm
    return StateVector(num_qubits, amps)


def dense_angle_encode(x: Sequence[float], num_qubits: int) -> StateVector:
    """Two features per qubit: cos(pi x_{2i-1})|0> + e^{2 pi i x_{2i}} sin(pi x_{2i-1})|1>."""
    x = np.asarray(x, dtype=np.float64)
    if x.size % 2:
        raise ValueError(f"dense angle encoding needs an even feature count, got {x.size}")
    if x.size != 2 * num_qubits:
        raise ValueError(
            f"{num_qubits} qubits need {2 * num_qubits} features, got {x.size}"
        )
    state = np.ones(1, dtype=np.complex128)
    for i in range(num_qubits):
        a, b = x[2 * i], x[2 * i + 1]
        qubit = np.array(
            [np.cos(np.pi * a), np.exp(2j * np.pi * b) * np.sin(np.pi * a)],
            dtype=np.complex128,
        )
        state = np.kron(state, qubit)
    return StateVector(num_qubits, state)


def qubit_encode(x: Sequence[float], num_qubits: int) -> StateVector:
    """One feature per qubit: tensor product of cos(x_i)|0> + sin(x_i)|1>."""
    x = np.asarray(x, dtype=np.float64)
    if x.size != num_qubits:
        raise ValueError(f"{num_qubits} qubits need {num_qubits} features, got {x.size}")
    state = np.ones(1, dtype=np.complex128)
    for xi in x:
        qubit = np.array([np.cos(xi), np.sin(xi)], dtype=np.complex128)
        state = np.kron(state, qubit)
    return StateVector(num_qubits, state)


def experiment_encode(x: Sequence[float], num_qubits: int) -> StateVector:
    """Both features loaded on every qubit: RY(x0) then RZ(x1) applied to |0>.

    This is the encoder used by the training experiments; the output is a
    tensor power of the single-qubit state it produces.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.size != 2:
        raise ValueError(f"experiment encoding takes exactly 2 features, got {x.size}")
    x0, x1 = x
    # RZ(x1) RY(x0) |0> computed once, then tensored across qubits
    qubit = np.array(
        [
            np.exp(-0.5j * x1) * np.cos(x0 / 2.0),
            np.exp(0.5j * x1) * np.sin(x0 / 2.0),
        ],
        dtype=np.complex128,
    )
    state = np.ones(1, dtype=np.complex128)
    for _ in range(num_qubits):
        state = np.kron(state, qubit)
    return StateVector(num_qubits, state)


def encode_dataset(
    features: np.ndarray, num_qubits: int, encoder: Encoder = experiment_encode
) -> np.ndarray:
    """Stack encoded states into an array of shape (n_samples, 2**num_qubits)."""
    features = np.atleast_2d(np.asarray(features, dtype=np.float64))
    out = np.empty((features.shape[0], 1 << num_qubits), dtype=np.complex128)
    for i, x in enumerate(features):
        out[i] = encoder(x, num_qubits).amplitudes
    return out
