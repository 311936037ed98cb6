"""Scikit-learn estimator wrapping the variational circuit classifier.

``QnnClassifier`` composes the ansatz builders, the data encoder and the
training loop behind the standard fit/predict surface so it plugs into
pipelines, cross-validation and grid search.  Hyperparameters are stored
verbatim in ``__init__`` (sklearn convention); all validation happens in
``fit``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .circuits import AnsatzFamily, AnsatzSpec, build_ansatz
from .datasets import Dataset
from .encoding import encode_dataset
from .simulator import ObservableKind, observable_from_name
from .topology import CouplingGraph, coupling_graph_from_name
from .training import ParamInit, TrainConfig, map_labels, predictions, train


class QnnClassifier(ClassifierMixin, BaseEstimator):
    """Binary classifier backed by a trained variational circuit.

    Parameters
    ----------
    num_qubits : circuit width (>= 2).
    depth : number of ansatz layers.
    ansatz : "fixed" (RY + CNOT entangler) or "random" (seeded layer template).
    restricted : restrict two-qubit gates to the coupling-graph edges.
    topology : coupling-graph name ("guadalupe") or JSON path.
    observable : "z_last" or "proj0_last".
    epochs, learning_rate, optimizer : training-loop settings.
    ansatz_seed : template seed for the random family.
    init_seed : parameter-initialization seed.
    feature_range : interval features are rescaled to before encoding.
    """

    def __init__(
        self,
        num_qubits: int = 4,
        depth: int = 2,
        ansatz: str = "fixed",
        restricted: bool = False,
        topology: str = "guadalupe",
        observable: str = "proj0_last",
        epochs: int = 20,
        learning_rate: float = 0.001,
        optimizer: str = "adam",
        ansatz_seed: int = 0,
        init_seed: int = 0,
        feature_range: tuple[float, float] = (0.0, np.pi),
    ):
        self.num_qubits = num_qubits
        self.depth = depth
        self.ansatz = ansatz
        self.restricted = restricted
        self.topology = topology
        self.observable = observable
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.optimizer = optimizer
        self.ansatz_seed = ansatz_seed
        self.init_seed = init_seed
        self.feature_range = feature_range

    def _resolve_topology(self) -> CouplingGraph:
        if isinstance(self.topology, CouplingGraph):
            return self.topology
        return coupling_graph_from_name(self.topology)

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64)
        if X.shape[1] != 2:
            raise ValueError(f"expected 2 features, got {X.shape[1]}")
        self.classes_ = np.unique(y)
        if len(self.classes_) != 2:
            raise ValueError(f"expected 2 classes, got {len(self.classes_)}")
        binary = (y == self.classes_[1]).astype(np.int64)

        lo, hi = self.feature_range
        mins = X.min(axis=0)
        spans = X.max(axis=0) - mins
        spans[spans == 0] = 1.0  # constant column: pin to lo
        self.scale_min_ = mins
        self.scale_span_ = spans
        scaled = (X - mins) / spans * (hi - lo) + lo

        spec = AnsatzSpec(
            family=AnsatzFamily(self.ansatz),
            num_qubits=self.num_qubits,
            depth=self.depth,
            restricted=self.restricted,
            topology_name=getattr(self.topology, "name", str(self.topology)),
            rng_seed=self.ansatz_seed,
        )
        self.circuit_ = build_ansatz(spec, self._resolve_topology())
        self.observable_ = observable_from_name(self.observable)
        config = TrainConfig(
            epochs=self.epochs,
            learning_rate=self.learning_rate,
            optimizer=self.optimizer,
            init=ParamInit(seed=self.init_seed),
        )
        record = train(
            self.circuit_, Dataset(scaled, binary), self.observable_, config
        )
        self.params_ = record.final_params
        self.loss_history_ = np.asarray(record.loss_per_epoch)
        self.n_features_in_ = 2
        return self

    def decision_function(self, X):
        """Circuit output shifted so the class boundary sits at zero."""
        check_is_fitted(self, "params_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != 2:
            raise ValueError(f"expected 2 features, got {X.shape[1]}")
        lo, hi = self.feature_range
        scaled = (X - self.scale_min_) / self.scale_span_ * (hi - lo) + lo
        states = encode_dataset(scaled, self.num_qubits)
        f = predictions(self.circuit_, self.params_, states, self.observable_)
        threshold = 0.5 if self.observable_.kind is ObservableKind.PROJ0_LAST else 0.0
        return f - threshold

    def predict(self, X):
        scores = self.decision_function(X)
        return self.classes_[(scores > 0).astype(np.int64)]

    def predict_value(self, X):
        """Raw circuit expectation values f(x, U)."""
        check_is_fitted(self, "params_")
        threshold = 0.5 if self.observable_.kind is ObservableKind.PROJ0_LAST else 0.0
        return self.decision_function(X) + threshold
