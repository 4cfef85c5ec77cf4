"""End-to-end fairness experiment on a synthetic fixture.

Generates a corpus with a planted gender-signal correlation, runs the
four training conditions with the SVM, and prints the report table. The
original condition favors the group the embedding leans toward (lower
false negative rate for F); training on the union of original and
swapped notes restores parity.
"""

from embfair import render_markdown, report_matrix
from embfair.learners import HyperparamGrid
from embfair.synth import SynthSpec, build_fixture

fx = build_fixture(SynthSpec(n_per_cell=60, strength=1.0, seed=5))
grid = HyperparamGrid(svm_C=(10.0,), svm_kernels=("linear",))

result = report_matrix(
    fx.notes, fx.table, grid, seed=5,
    pairs=fx.pairs, targets=fx.targets,
    learners=("svm",), per_cell=30,
)

print(render_markdown(result))
for report in result.reports:
    print(f"{report.condition:<12} fnr_f={report.fnr_f:.3f} fnr_m={report.fnr_m:.3f} "
          f"fnrr={report.fnrr:.3f}_{report.advantaged} "
          f"mismatches={report.mismatch_count}/{report.n_pairs}")

print()
orig = next(r for r in result.reports if r.condition == "original")
aug = next(r for r in result.reports if r.condition == "augmented")
print(f"embedding bias: DB = {result.bias.db:.3f} toward {result.bias.direction}")
print(f"original-condition advantaged group: {orig.advantaged} "
      f"(matches the embedding lean: {orig.advantaged == result.bias.direction})")
print(f"augmentation lifted FNRR from {orig.fnrr:.3f} to {aug.fnrr:.3f} "
      f"and cut mismatches from {orig.mismatch_count} to {aug.mismatch_count}")
