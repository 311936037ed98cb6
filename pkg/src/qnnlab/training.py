"""Cost evaluation, parameter-shift gradients, and the training loop.

The cost is the mean squared error between circuit outputs f(x_i, U) and
targets: labels are mapped to {0, 1} for the last-qubit projector and to
{-1, +1} for the last-qubit Pauli-Z, so targets lie in the observable's
range.  Gradients use the exact parameter-shift rule for Pauli rotations,

    df/dtheta_k = [f(theta_k + pi/2) - f(theta_k - pi/2)] / 2,

evaluated over the whole (pre-encoded) dataset batch at once.  The sweep
advances a running prefix state past each trainable gate so only the two
shifted suffixes are recomputed per parameter.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .circuits import ParametrizedCircuit, apply_circuit_inplace
from .datasets import Dataset
from .encoding import Encoder, encode_dataset, experiment_encode
from .exceptions import ConfigError
from .simulator import (
    PAULI_MATRICES,
    Gate,
    GateKind,
    Observable,
    ObservableKind,
    _apply_single,
    _single_views,
    apply_gate_inplace,
    expectation_batch,
)


@dataclass(frozen=True)
class ParamInit:
    """Parameter initialization: 'uniform' on [0, 2pi) or 'normal' (std 1)."""

    distribution: str = "uniform"
    seed: int = 0

    def __post_init__(self):
        if self.distribution not in ("uniform", "normal"):
            raise ConfigError(f"unknown init distribution {self.distribution!r}")


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 20
    learning_rate: float = 0.001
    optimizer: str = "adam"
    adam_betas: tuple[float, float] = (0.9, 0.999)
    adam_eps: float = 1e-8
    init: ParamInit = field(default_factory=ParamInit)

    def __post_init__(self):
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.learning_rate <= 0:
            raise ConfigError(f"learning rate must be > 0, got {self.learning_rate}")
        if self.optimizer not in ("gd", "adam"):
            raise ConfigError(f"unknown optimizer {self.optimizer!r}")

    def with_init_seed(self, seed: int) -> "TrainConfig":
        return TrainConfig(
            epochs=self.epochs,
            learning_rate=self.learning_rate,
            optimizer=self.optimizer,
            adam_betas=self.adam_betas,
            adam_eps=self.adam_eps,
            init=ParamInit(self.init.distribution, seed),
        )


@dataclass
class TrialRecord:
    """Per-trial loss trace: entry 0 is the pre-training loss."""

    trial_id: int
    seed: int
    metadata: dict
    loss_per_epoch: list[float]
    final_params: np.ndarray

    def to_dict(self) -> dict:
        return {
            "trial_id": self.trial_id,
            "seed": self.seed,
            "metadata": self.metadata,
            "loss_per_epoch": self.loss_per_epoch,
            "final_params": [float(p) for p in self.final_params],
        }


def init_params(num_params: int, init: ParamInit) -> np.ndarray:
    rng = np.random.default_rng(init.seed)
    if init.distribution == "uniform":
        return rng.uniform(0.0, 2.0 * np.pi, num_params)
    return rng.normal(0.0, 1.0, num_params)


def map_labels(y: Sequence[int], obs: Observable) -> np.ndarray:
    """Targets representable by the observable: {0,1} for the projector,
    {-1,+1} for Pauli expectations."""
    y = np.asarray(y, dtype=np.float64)
    if obs.kind is ObservableKind.PROJ0_LAST:
        return y
    return 2.0 * y - 1.0


def predictions(
    circuit: ParametrizedCircuit,
    params: Sequence[float],
    states: np.ndarray,
    obs: Observable,
) -> np.ndarray:
    """f(x_i, U) for a batch of encoded states, shape (n_samples, 2**n)."""
    amps = np.array(states, dtype=np.complex128)
    apply_circuit_inplace(circuit, params, amps)
    return expectation_batch(amps, circuit.num_qubits, obs)


def cost_from_states(
    circuit: ParametrizedCircuit,
    params: Sequence[float],
    states: np.ndarray,
    targets: np.ndarray,
    obs: Observable,
) -> float:
    f = predictions(circuit, params, states, obs)
    return float(np.mean((f - targets) ** 2))


def cost(
    circuit: ParametrizedCircuit,
    params: Sequence[float],
    dataset: Dataset,
    obs: Observable,
    encoder: Encoder = experiment_encode,
) -> float:
    """Mean squared error of the circuit outputs against the dataset labels."""
    if len(dataset) == 0:
        raise ValueError("dataset is empty")
    states = encode_dataset(dataset.x, circuit.num_qubits, encoder)
    return cost_from_states(circuit, params, states, map_labels(dataset.y, obs), obs)


def _apply_observable(amps: np.ndarray, n: int, obs: Observable) -> np.ndarray:
    """H applied to a batch of states: the seed of the backward sweep."""
    out = amps.copy()
    if obs.kind is ObservableKind.PAULI_Z_LAST:
        view = out.reshape(out.shape[:-1] + (1 << (n - 1), 2))
        view[..., 1] *= -1.0
    elif obs.kind is ObservableKind.PROJ0_LAST:
        view = out.reshape(out.shape[:-1] + (1 << (n - 1), 2))
        view[..., 1] = 0.0
    else:
        for q, p in enumerate(obs.paulis):
            if p != "I":
                _apply_single(out, n, q, PAULI_MATRICES[p])
    return out


def _apply_inverse(amps: np.ndarray, n: int, gate: Gate, params: np.ndarray) -> None:
    if gate.is_rotation:
        theta = gate.angle if gate.angle is not None else params[gate.param_index]
        apply_gate_inplace(amps, n, Gate(gate.kind, gate.targets, angle=-float(theta)))
    else:
        apply_gate_inplace(amps, n, gate)  # two-qubit kinds here are self-inverse


_AXIS_OF = {GateKind.RX: "X", GateKind.RY: "Y", GateKind.RZ: "Z"}


def _shift_rule_term(
    phi: np.ndarray, lam: np.ndarray, n: int, q: int, axis: str
) -> np.ndarray:
    """[f(theta + pi/2) - f(theta - pi/2)] / 2 as -Im<sigma phi|lambda>.

    Expanding R(theta +- pi/2) = (I -+ i sigma) R(theta) / sqrt(2) in the
    shifted expectation values collapses their difference to this overlap,
    so the result is exactly the parameter-shift value without re-running
    the circuit suffix twice per parameter.
    """
    p0, p1 = _single_views(phi, n, q)
    l0, l1 = _single_views(lam, n, q)
    dot = lambda a, b: np.einsum("...qr,...qr->...", np.conj(a), b)  # noqa: E731
    if axis == "X":
        ip = dot(p1, l0) + dot(p0, l1)
    elif axis == "Y":
        ip = 1j * dot(p1, l0) - 1j * dot(p0, l1)
    else:  # Z
        ip = dot(p0, l0) - dot(p1, l1)
    return -np.imag(ip)


def _gradient_and_predictions(
    circuit: ParametrizedCircuit,
    params: np.ndarray,
    states: np.ndarray,
    obs: Observable,
) -> tuple[np.ndarray, np.ndarray]:
    """Parameter-shift df/dtheta for every parameter plus the base outputs.

    One forward pass builds the output state; the backward pass undoes each
    gate on both the state and H-transformed copy, reading off the exact
    shift-rule value of every trainable rotation on the way.  Returns
    (df, f) with df of shape (num_params, n_samples).
    """
    n = circuit.num_qubits
    gates = list(circuit.gates())
    for g in gates:
        if g.param_index is not None and not g.is_rotation:
            raise ValueError("trainable gates must be Pauli rotations")
    ket = np.array(states, dtype=np.complex128)
    for g in gates:
        apply_gate_inplace(ket, n, g, params)
    f = expectation_batch(ket, n, obs)

    df = np.zeros((circuit.num_params, states.shape[0]))
    lam = _apply_observable(ket, n, obs)
    for gate in reversed(gates):
        if gate.param_index is not None:
            df[gate.param_index] = _shift_rule_term(
                ket, lam, n, gate.targets[0], _AXIS_OF[gate.kind]
            )
        if gate.kind is not GateKind.IDENTITY:
            _apply_inverse(ket, n, gate, params)
            _apply_inverse(lam, n, gate, params)
    return df, f


def _cost_gradient_from_states(
    circuit: ParametrizedCircuit,
    params: np.ndarray,
    states: np.ndarray,
    targets: np.ndarray,
    obs: Observable,
) -> tuple[np.ndarray, float]:
    """(dC/dtheta, C) chained through the mean-squared-error cost."""
    df, f = _gradient_and_predictions(circuit, params, states, obs)
    residual = f - targets
    grad = (2.0 / states.shape[0]) * df @ residual
    return grad, float(np.mean(residual**2))


def parameter_shift_gradient(
    circuit: ParametrizedCircuit,
    params: Sequence[float],
    dataset: Dataset,
    obs: Observable,
    encoder: Encoder = experiment_encode,
) -> np.ndarray:
    """Exact gradient of the cost with respect to every trainable parameter."""
    if len(dataset) == 0:
        raise ValueError("dataset is empty")
    states = encode_dataset(dataset.x, circuit.num_qubits, encoder)
    grad, _ = _cost_gradient_from_states(
        circuit,
        np.asarray(params, dtype=np.float64),
        states,
        map_labels(dataset.y, obs),
        obs,
    )
    return grad


# ---------------------------------------------------------------------------
# optimizers

def gd_step(params: np.ndarray, grad: np.ndarray, learning_rate: float) -> np.ndarray:
    """Plain gradient descent: theta - eta * grad."""
    params = np.asarray(params, dtype=np.float64)
    grad = np.asarray(grad, dtype=np.float64)
    if params.shape != grad.shape:
        raise ValueError(f"shape mismatch: {params.shape} vs {grad.shape}")
    return params - learning_rate * grad


@dataclass(frozen=True)
class AdamState:
    t: int
    m: np.ndarray
    v: np.ndarray

    @classmethod
    def zeros(cls, num_params: int) -> "AdamState":
        return cls(t=0, m=np.zeros(num_params), v=np.zeros(num_params))


def adam_step(
    state: AdamState,
    params: np.ndarray,
    grad: np.ndarray,
    learning_rate: float = 0.001,
    betas: tuple[float, float] = (0.9, 0.999),
    eps: float = 1e-8,
) -> tuple[AdamState, np.ndarray]:
    """One bias-corrected Adam update; returns the new state and parameters."""
    params = np.asarray(params, dtype=np.float64)
    grad = np.asarray(grad, dtype=np.float64)
    if params.shape != grad.shape or state.m.shape != params.shape:
        raise ValueError("parameter/gradient/state dimension mismatch")
    b1, b2 = betas
    t = state.t + 1
    m = b1 * state.m + (1.0 - b1) * grad
    v = b2 * state.v + (1.0 - b2) * grad**2
    m_hat = m / (1.0 - b1**t)
    v_hat = v / (1.0 - b2**t)
    new_params = params - learning_rate * m_hat / (np.sqrt(v_hat) + eps)
    return AdamState(t=t, m=m, v=v), new_params


# ---------------------------------------------------------------------------
# training loop

def train(
    circuit: ParametrizedCircuit,
    dataset: Dataset,
    obs: Observable,
    config: TrainConfig,
    trial_id: int = 0,
    encoder: Encoder = experiment_encode,
) -> TrialRecord:
    """Full-batch training for ``config.epochs`` epochs.

    The loss trace has epochs + 1 entries, the first recorded before any
    update.  Everything is deterministic given the circuit and config.
    """
    if len(dataset) == 0:
        raise ValueError("dataset is empty")
    states = encode_dataset(dataset.x, circuit.num_qubits, encoder)
    targets = map_labels(dataset.y, obs)
    params = init_params(circuit.num_params, config.init)

    losses: list[float] = []
    adam = AdamState.zeros(circuit.num_params)
    for _ in range(config.epochs):
        grad, loss = _cost_gradient_from_states(circuit, params, states, targets, obs)
        losses.append(loss)
        if config.optimizer == "adam":
            adam, params = adam_step(
                adam, params, grad,
                learning_rate=config.learning_rate,
                betas=config.adam_betas,
                eps=config.adam_eps,
            )
        else:
            params = gd_step(params, grad, config.learning_rate)
    losses.append(cost_from_states(circuit, params, states, targets, obs))

    return TrialRecord(
        trial_id=trial_id,
        seed=config.init.seed,
        metadata=dict(circuit.metadata, observable=obs.name),
        loss_per_epoch=losses,
        final_params=params,
    )
