import numpy as np
import pytest

from embfair.learners.mlp import MLPModel, loss_and_grads, train_mlp
from embfair.metrics import macro_f1

from oracles import numeric_gradients


def toy_params(rng, dim=3, hidden=4):
    w1 = rng.normal(size=(dim, hidden))
    b1 = rng.normal(size=hidden)
    w2 = rng.normal(size=(hidden, 1))
    b2 = rng.normal(size=1)
    return [w1, b1, w2, b2]


def test_analytic_gradients_match_central_differences():
    rng = np.random.default_rng(42)
    X = rng.normal(size=(5, 3))
    t = np.array([1.0, 0.0, 1.0, 0.0, 1.0])
    params = toy_params(rng)
    # Keep pre-activations away from the ReLU kink so the finite-difference
    # quotient is valid.
    z1 = X @ params[0] + params[1]
    assert np.abs(z1).min() > 1e-3

    _, analytic = loss_and_grads(params, X, t, alpha=0.7, n_total=5)

    def loss():
        return loss_and_grads(params, X, t, alpha=0.7, n_total=5)[0]

    numeric = numeric_gradients(loss, params, h=1e-5)
    worst = 0.0
    for a, n in zip(analytic, numeric):
        rel = np.abs(a - n) / np.maximum(np.maximum(np.abs(a), np.abs(n)), 1e-8)
        worst = max(worst, float(rel.max()))
    assert worst < 1e-4


def test_gradient_check_across_random_instances():
    for seed in range(3):
        rng = np.random.default_rng(100 + seed)
        X = rng.normal(size=(6, 4))
        t = (rng.random(6) > 0.5).astype(float)
        params = toy_params(rng, dim=4, hidden=5)
        if np.abs(X @ params[0] + params[1]).min() <= 1e-3:
            continue
        _, analytic = loss_and_grads(params, X, t, alpha=1.3, n_total=6)

        def loss():
            return loss_and_grads(params, X, t, alpha=1.3, n_total=6)[0]

        numeric = numeric_gradients(loss, params, h=1e-5)
        for a, n in zip(analytic, numeric):
            rel = np.abs(a - n) / np.maximum(np.maximum(np.abs(a), np.abs(n)), 1e-8)
            assert float(rel.max()) < 1e-4


def test_huge_alpha_shrinks_weights_to_prior():
    # Adam moves weights about lr per step, so give the decay room to act.
    rng = np.random.default_rng(0)
    X = rng.normal(size=(40, 3))
    y = np.array([1] * 30 + [-1] * 10)
    model = train_mlp(X, y, alpha=1e6, seed=0, lr=0.01)
    assert float(np.abs(model.w1).max()) < 1e-2
    assert float(np.abs(model.w2).max()) < 1e-2
    scores = model.scores(rng.normal(size=(200, 3)))
    prior = 0.75
    assert np.allclose(scores, prior, atol=0.1)


def test_separable_toy_reaches_high_f1():
    rng = np.random.default_rng(1)
    X = np.vstack([rng.normal(size=(25, 4)) + 2.5, rng.normal(size=(25, 4)) - 2.5])
    y = np.array([1] * 25 + [-1] * 25)
    model = train_mlp(X, y, alpha=0.1, seed=0)
    assert macro_f1(y, model.predict(X)) >= 0.95


def test_deterministic_given_seed():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(30, 3))
    y = np.where(X[:, 0] > 0, 1, -1)
    a = train_mlp(X, y, alpha=0.5, seed=7)
    b = train_mlp(X, y, alpha=0.5, seed=7)
    assert np.array_equal(a.w1, b.w1)
    assert np.array_equal(a.w2, b.w2)
    assert a.final_loss == b.final_loss


def test_plateau_stops_early():
    rng = np.random.default_rng(1)
    X = np.vstack([rng.normal(size=(25, 4)) + 2.5, rng.normal(size=(25, 4)) - 2.5])
    y = np.array([1] * 25 + [-1] * 25)
    model = train_mlp(X, y, alpha=10.0, seed=0, lr=0.01)
    assert model.n_epochs < 500
    assert np.isfinite(model.final_loss)


def test_single_class_rejected():
    X = np.zeros((4, 2))
    with pytest.raises(ValueError, match="both classes"):
        train_mlp(X, np.ones(4, dtype=int), alpha=1.0)


def test_negative_alpha_rejected():
    X = np.zeros((4, 2))
    y = np.array([1, -1, 1, -1])
    with pytest.raises(ValueError, match="non-negative"):
        train_mlp(X, y, alpha=-1.0)


def test_serialization_round_trip():
    rng = np.random.default_rng(4)
    X = rng.normal(size=(24, 3))
    y = np.where(X[:, 0] + X[:, 1] > 0, 1, -1)
    model = train_mlp(X, y, alpha=0.3, seed=5)
    clone = MLPModel.from_jsonable(model.to_jsonable())
    probes = rng.normal(size=(10, 3))
    assert np.array_equal(model.predict(probes), clone.predict(probes))
