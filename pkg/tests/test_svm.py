import numpy as np
import pytest

from embfair.learners.svm import (
    SVMModel,
    kernel_matrix,
    kkt_residual,
    resolve_gamma,
    train_svm,
)

from oracles import brute_force_dual_4pt, dual_objective

XOR_X = np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]])
XOR_Y = np.array([-1, -1, 1, 1])


def random_problem(rng, n=40, d=5, sep=1.0):
    y = np.where(np.arange(n) % 2 == 0, 1, -1)
    X = rng.normal(size=(n, d)) + sep * y[:, None] * np.array([1.0] + [0.0] * (d - 1))
    return X, y


class TestTraining:
    def test_linearly_separable_toy(self, rng):
        X = np.vstack([rng.normal(size=(20, 2)) + [4, 4],
                       rng.normal(size=(20, 2)) - [4, 4]])
        y = np.array([1] * 20 + [-1] * 20)
        model = train_svm(X, y, C=1.0, kernel="linear")
        assert model.converged
        assert np.mean(model.predict(X) == y) == 1.0

    def test_xor_rbf_reaches_perfect_training_accuracy(self):
        model = train_svm(XOR_X, XOR_Y, C=100.0, kernel="rbf", gamma=1.0)
        assert np.array_equal(model.predict(XOR_X), XOR_Y)

    def test_xor_dual_matches_brute_force_grid(self):
        model = train_svm(XOR_X, XOR_Y, C=100.0, kernel="rbf", gamma=1.0)
        K = kernel_matrix(XOR_X, XOR_X, "rbf", 1.0, 0.0)
        alpha = np.zeros(4)
        alpha[model.support_idx] = model.alphas
        smo_obj = dual_objective(alpha, XOR_Y.astype(float), K)
        _, grid_obj = brute_force_dual_4pt(K, XOR_Y.astype(float), C=100.0, steps=81)
        # SMO solves the dual exactly; the grid is a lower bound up to its
        # own resolution.
        assert smo_obj >= grid_obj - 1e-6
        assert abs(smo_obj - grid_obj) < 0.05 * max(1.0, abs(grid_obj))

    @pytest.mark.parametrize("kernel", ["linear", "rbf", "sigmoid"])
    def test_kkt_conditions_on_random_data(self, kernel, rng):
        for trial in range(3):
            X, y = random_problem(rng)
            model = train_svm(X, y, C=1.0, kernel=kernel, tol=1e-3)
            assert model.converged
            alpha = np.zeros(len(y))
            alpha[model.support_idx] = model.alphas
            assert np.all(alpha >= -1e-12)
            assert np.all(alpha <= model.C + 1e-12)
            assert abs(float(alpha @ y)) < 1e-6
            assert kkt_residual(model, X, y) <= 1e-3 + 1e-9

    def test_dual_objective_nondecreasing(self, rng):
        X, y = random_problem(rng, n=30)
        model = train_svm(X, y, C=1.0, kernel="rbf", track_objective=True)
        history = np.array(model.objective_history)
        assert len(history) > 0
        assert np.all(np.diff(history) >= -1e-9)

    def test_deterministic(self, rng):
        X, y = random_problem(rng)
        a = train_svm(X, y, C=1.0, kernel="rbf")
        b = train_svm(X, y, C=1.0, kernel="rbf")
        assert np.array_equal(a.alphas, b.alphas)
        assert a.bias == b.bias

    def test_single_class_rejected(self):
        X = np.zeros((4, 2))
        with pytest.raises(ValueError, match="both classes"):
            train_svm(X, np.ones(4, dtype=int), C=1.0)

    def test_bad_c_rejected(self, rng):
        X, y = random_problem(rng, n=10)
        with pytest.raises(ValueError, match="positive"):
            train_svm(X, y, C=0.0)

    def test_unknown_kernel_rejected(self, rng):
        X, y = random_problem(rng, n=10)
        with pytest.raises(ValueError, match="kernel"):
            train_svm(X, y, C=1.0, kernel="poly")


class TestModel:
    def test_serialization_round_trip(self, rng):
        X, y = random_problem(rng)
        model = train_svm(X, y, C=1.0, kernel="rbf")
        clone = SVMModel.from_jsonable(model.to_jsonable())
        probe = rng.normal(size=(15, 5))
        assert np.array_equal(model.predict(probe), clone.predict(probe))

    def test_predictions_are_pure(self, rng):
        X, y = random_problem(rng)
        model = train_svm(X, y, C=1.0, kernel="sigmoid")
        probe = rng.normal(size=(10, 5))
        assert np.array_equal(model.predict(probe), model.predict(probe))

    def test_gamma_default_is_scale(self, rng):
        X = rng.normal(size=(12, 4), scale=2.0)
        assert resolve_gamma(X) == pytest.approx(1.0 / (4 * X.var()))
        assert resolve_gamma(np.zeros((3, 4))) == pytest.approx(0.25)
        assert resolve_gamma(X, gamma=0.5) == 0.5
