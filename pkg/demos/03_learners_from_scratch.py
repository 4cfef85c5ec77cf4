"""Tour of the three learners and the white-box checks they expose.

The SVM's dual multipliers satisfy the KKT conditions to tolerance, the
forest is reproducible tree-for-tree from its seed, and the MLP's loss
function yields analytic gradients that match finite differences.
"""

import numpy as np

from embfair import HyperparamGrid, train_forest, train_mlp, train_svm, tune
from embfair.learners.mlp import loss_and_grads
from embfair.learners.svm import kkt_residual

rng = np.random.default_rng(0)

print("=== SVM on the XOR pattern (rbf kernel) ===")
X = np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]])
y = np.array([-1, -1, 1, 1])
model = train_svm(X, y, C=100.0, kernel="rbf", gamma=1.0)
print(f"  training predictions: {model.predict(X)} (want {y})")
print(f"  support vectors: {len(model.alphas)}, "
      f"sum(alpha*y) = {float(model.alphas @ model.support_y):+.2e}")
print(f"  KKT residual: {kkt_residual(model, X, y):.2e} (tolerance 1e-3)")

print("\n=== random forest determinism ===")
Xf = rng.normal(size=(60, 5))
yf = np.where(Xf[:, 0] + 0.5 * Xf[:, 1] > 0, 1, -1)
a = train_forest(Xf, yf, max_depth=4, n_trees=20, seed=42)
b = train_forest(Xf, yf, max_depth=4, n_trees=20, seed=42)
print(f"  same seed, identical trees: {a.trees == b.trees}")
print(f"  training accuracy: {np.mean(a.predict(Xf) == yf):.2f}")

print("\n=== MLP gradient check ===")
Xm = rng.normal(size=(5, 3))
t = np.array([1.0, 0.0, 1.0, 0.0, 1.0])
params = [rng.normal(size=(3, 4)), rng.normal(size=4),
          rng.normal(size=(4, 1)), rng.normal(size=1)]
loss, grads = loss_and_grads(params, Xm, t, alpha=0.5, n_total=5)
h = 1e-5
w = params[0]
orig = w[0, 0]
w[0, 0] = orig + h
hi, _ = loss_and_grads(params, Xm, t, alpha=0.5, n_total=5)
w[0, 0] = orig - h
lo, _ = loss_and_grads(params, Xm, t, alpha=0.5, n_total=5)
w[0, 0] = orig
numeric = (hi - lo) / (2 * h)
print(f"  analytic dL/dw[0,0] = {grads[0][0,0]:+.8f}")
print(f"  numeric  dL/dw[0,0] = {numeric:+.8f}")

print("\n=== cross-validated tuning ===")
Xt = np.vstack([rng.normal(size=(30, 3)) + 1.2, rng.normal(size=(30, 3)) - 1.2])
yt = np.array([1] * 30 + [-1] * 30)
for kind in ("svm", "rf", "mlp"):
    tuned = tune(Xt, yt, kind, HyperparamGrid(), seed=1)
    print(f"  {kind:<4} chose {tuned.hyperparams} "
          f"(CV macro-F1 {tuned.cv_scores['mean_macro_f1']:.3f})")

print("\n=== MLP capacity sanity ===")
m = train_mlp(Xt, yt, alpha=0.1, seed=0)
print(f"  epochs run: {m.n_epochs}, final loss {m.final_loss:.4f}, "
      f"train accuracy {np.mean(m.predict(Xt) == yt):.2f}")
