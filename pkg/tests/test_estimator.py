"""Scikit-learn estimator surface: conventions, composition, learning."""

import numpy as np
import pytest
from sklearn.base import clone, is_classifier
from sklearn.exceptions import NotFittedError
from sklearn.model_selection import cross_val_score
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import StandardScaler

from qnnlab.datasets import make_moons
from qnnlab.estimator import QnnClassifier


@pytest.fixture(scope="module")
def moons():
    return make_moons(60, 0.05, seed=11)


@pytest.fixture(scope="module")
def fitted(moons):
    clf = QnnClassifier(num_qubits=2, depth=2, epochs=60, learning_rate=0.1,
                        init_seed=3)
    return clf.fit(moons.x, moons.y)


class TestSklearnConventions:
    def test_recognized_as_classifier(self):
        assert is_classifier(QnnClassifier())

    def test_get_set_params_round_trip(self):
        clf = QnnClassifier(num_qubits=6, depth=4, observable="z_last")
        params = clf.get_params()
        assert params["num_qubits"] == 6
        other = QnnClassifier().set_params(**params)
        assert other.get_params() == params

    def test_clone(self):
        clf = QnnClassifier(num_qubits=3, epochs=7)
        assert clone(clf).get_params() == clf.get_params()

    def test_fit_returns_self(self, moons):
        clf = QnnClassifier(num_qubits=2, depth=1, epochs=2)
        assert clf.fit(moons.x, moons.y) is clf

    def test_not_fitted_raises(self, moons):
        with pytest.raises(NotFittedError):
            QnnClassifier().predict(moons.x)

    def test_fitted_attributes(self, fitted):
        assert fitted.n_features_in_ == 2
        assert fitted.params_.shape == (fitted.circuit_.num_params,)
        assert len(fitted.loss_history_) == fitted.epochs + 1
        np.testing.assert_array_equal(fitted.classes_, [0, 1])


class TestPredictions:
    def test_predict_shape_and_domain(self, fitted, moons):
        pred = fitted.predict(moons.x)
        assert pred.shape == (len(moons.x),)
        assert set(np.unique(pred)) <= {0, 1}

    def test_learns_the_moons(self, fitted, moons):
        assert fitted.score(moons.x, moons.y) >= 0.75
        assert fitted.loss_history_[-1] < fitted.loss_history_[0]

    def test_decision_function_sign_matches_predict(self, fitted, moons):
        scores = fitted.decision_function(moons.x)
        np.testing.assert_array_equal(fitted.predict(moons.x), (scores > 0).astype(int))

    def test_predict_value_range_proj0(self, fitted, moons):
        values = fitted.predict_value(moons.x)
        assert np.all(values >= -1e-12) and np.all(values <= 1 + 1e-12)

    def test_deterministic_refit(self, moons):
        a = QnnClassifier(num_qubits=2, depth=2, epochs=5, init_seed=9)
        b = QnnClassifier(num_qubits=2, depth=2, epochs=5, init_seed=9)
        a.fit(moons.x, moons.y)
        b.fit(moons.x, moons.y)
        np.testing.assert_array_equal(a.params_, b.params_)
        np.testing.assert_array_equal(a.loss_history_, b.loss_history_)

    def test_string_labels(self, moons):
        labels = np.where(moons.y == 1, "pos", "neg")
        clf = QnnClassifier(num_qubits=2, depth=1, epochs=3).fit(moons.x, labels)
        np.testing.assert_array_equal(clf.classes_, ["neg", "pos"])
        assert set(clf.predict(moons.x)) <= {"neg", "pos"}


class TestComposition:
    def test_cross_val_score(self, moons):
        clf = QnnClassifier(num_qubits=2, depth=1, epochs=3)
        scores = cross_val_score(clf, moons.x, moons.y, cv=2)
        assert scores.shape == (2,)

    def test_pipeline(self, moons):
        pipe = make_pipeline(StandardScaler(), QnnClassifier(num_qubits=2, epochs=2))
        pipe.fit(moons.x, moons.y)
        assert pipe.predict(moons.x).shape == (len(moons.x),)

    def test_random_ansatz_variant(self, moons):
        clf = QnnClassifier(num_qubits=3, depth=2, ansatz="random", ansatz_seed=5,
                            observable="z_last", epochs=3)
        clf.fit(moons.x, moons.y)
        assert clf.circuit_.metadata["family"] == "random"

    def test_restricted_variant_uses_chip_edges(self, moons):
        from qnnlab.topology import guadalupe

        clf = QnnClassifier(num_qubits=5, depth=1, restricted=True, epochs=2)
        clf.fit(moons.x, moons.y)
        chip = guadalupe()
        for gate in clf.circuit_.two_qubit_gates():
            assert chip.has_edge(*gate.targets)


class TestValidation:
    def test_wrong_feature_count(self, moons):
        clf = QnnClassifier(num_qubits=2, epochs=2)
        with pytest.raises(ValueError, match="2 features"):
            clf.fit(np.ones((10, 3)), np.r_[np.zeros(5), np.ones(5)])

    def test_single_class_rejected(self, moons):
        clf = QnnClassifier(num_qubits=2, epochs=2)
        with pytest.raises(ValueError, match="2 classes"):
            clf.fit(moons.x, np.zeros(len(moons.x)))

    def test_predict_wrong_width(self, fitted):
        with pytest.raises(ValueError):
            fitted.predict(np.ones((4, 3)))
