"""Fairness evaluation: per-gender-group FNR, FNRR, mismatch counts, and
the four-condition x three-learner experiment matrix.

Evaluation always runs on the paired test set: every test note together
with its pronoun-swapped twin. Each evaluated note contributes to the
confusion matrix of the gender group it *presents* as (the twin of a male
note counts toward the female group), so group metrics reflect how notes
written with that group's pronouns are treated. "depression" is the
positive class: FNR measures missed depression.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .corpus import CONDITIONS, SwapRules, build_condition, build_paired_testset
from .geometry import BiasScore, GenderDirection, direct_bias, gender_direction
from .learners import HyperparamGrid, child_seed, design_matrix, tune
from .learners.tuning import LEARNER_KINDS
from .metrics import POSITIVE, macro_f1

log = logging.getLogger(__name__)

REPORT_JSON_VERSION = 1

_CONDITION_TAG = {c: i for i, c in enumerate(CONDITIONS)}
_LEARNER_TAG = {k: i for i, k in enumerate(LEARNER_KINDS)}


@dataclass(frozen=True)
class GroupConfusion:
    group: str  # F | M
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    @property
    def total(self):
        return self.tp + self.fp + self.tn + self.fn

    @property
    def n_positive(self):
        return self.tp + self.fn

    @property
    def fnr(self):
        if self.n_positive == 0:
            raise ValueError(f"group {self.group}: FNR undefined without positive-label members")
        return self.fn / self.n_positive


@dataclass(frozen=True)
class FairnessReport:
    condition: str
    learner_kind: str
    macro_f1: float
    fnr_f: float
    fnr_m: float
    fnrr: float
    advantaged: str  # F | M | tie
    mismatch_count: int
    n_pairs: int
    seed: int
    hyperparams: Dict = field(default_factory=dict)

    def to_jsonable(self):
        return {
            "condition": self.condition,
            "learner": self.learner_kind,
            "macro_f1": self.macro_f1,
            "fnr_f": self.fnr_f,
            "fnr_m": self.fnr_m,
            "fnrr": self.fnrr,
            "advantaged": self.advantaged,
            "mismatch_count": self.mismatch_count,
            "n_pairs": self.n_pairs,
            "seed": self.seed,
            "hyperparams": self.hyperparams,
        }


def fnrr(conf_f: GroupConfusion, conf_m: GroupConfusion) -> Tuple[float, str]:
    """False-negative-rate ratio (smaller rate over larger) and the
    advantaged group (the one with the strictly lower FNR; "tie" if equal).

    Both rates equal to zero is perfect parity (ratio 1). A group without
    positive-label members has no FNR and raises instead of imputing."""
    f, m = conf_f.fnr, conf_m.fnr
    if f == m:
        return 1.0, "tie"
    ratio = min(f, m) / max(f, m)
    return ratio, "F" if f < m else "M"


def mismatch_count(model, pairs, table) -> int:
    """Number of test pairs whose two presentations get different predictions."""
    if not pairs:
        raise ValueError("empty paired test set")
    originals, twins = zip(*pairs)
    x_orig, _ = design_matrix(originals, table)
    x_twin, _ = design_matrix(twins, table)
    return int(np.sum(model.predict(x_orig) != model.predict(x_twin)))


def protocol_split(corpus, per_cell=90, seed=0, min_per_cell=1):
    """Split into a label-and-gender balanced train set plus the remainder.

    Takes ``per_cell`` notes from every (label, gender) cell when
    available, otherwise the maximal balanced subset (logged). Returns
    (train, test) preserving corpus order. Raises if a cell falls below
    ``min_per_cell`` or the test remainder is empty.
    """
    cells: Dict[Tuple[str, str], List[str]] = {}
    for note in corpus:
        cells.setdefault((note.label, note.gender), []).append(note.id)
    if len(cells) < 4:
        raise ValueError(f"corpus covers only {sorted(cells)} label/gender cells; need all 4")
    take = min(per_cell, min(len(ids) for ids in cells.values()))
    if all(len(ids) == take for ids in cells.values()):
        take -= 1  # the split must leave a non-empty test remainder
    if take < per_cell:
        log.info("balanced train split reduced to %d per cell (requested %d)", take, per_cell)
    if take < max(min_per_cell, 1):
        raise ValueError(f"only {take} usable notes per cell; floor is {min_per_cell}")
    rng = np.random.default_rng(seed)
    train_ids = set()
    for key in sorted(cells):
        ids = cells[key]
        chosen = rng.permutation(len(ids))[:take]
        train_ids.update(ids[i] for i in chosen)
    train = [n for n in corpus if n.id in train_ids]
    test = [n for n in corpus if n.id not in train_ids]
    if not test:
        raise ValueError("protocol split left no test notes")
    return train, test


def _group_confusions(notes, y_true, y_pred) -> Dict[str, GroupConfusion]:
    counts = {g: {"tp": 0, "fp": 0, "tn": 0, "fn": 0} for g in ("F", "M")}
    for note, truth, pred in zip(notes, y_true, y_pred):
        c = counts[note.gender]
        if truth == POSITIVE:
            c["tp" if pred == POSITIVE else "fn"] += 1
        else:
            c["fp" if pred == POSITIVE else "tn"] += 1
    return {g: GroupConfusion(group=g, **c) for g, c in counts.items()}


def run_experiment(corpus, table, condition, learner_kind, grid=None, seed=0,
                   rules=None, neutralize_mode="replace", per_cell=90,
                   min_per_cell=1, split=None) -> FairnessReport:
    """Train one (condition, learner) cell and evaluate it on paired twins.

    ``split`` may carry a precomputed (train, test) pair; otherwise the
    balanced protocol split is derived from the seed. The model seed is
    derived from (seed, condition, learner) so the twelve matrix cells are
    independent streams.
    """
    grid = grid or HyperparamGrid()
    rules = rules or SwapRules.default()
    if condition not in CONDITIONS:
        raise ValueError(f"unknown condition {condition!r}")
    if learner_kind not in LEARNER_KINDS:
        raise ValueError(f"unknown learner kind {learner_kind!r}")
    if split is None:
        train, test = protocol_split(corpus, per_cell, child_seed(seed, "split"),
                                     min_per_cell)
    else:
        train, test = split

    train_cond = build_condition(train, condition, rules, neutralize_mode)
    x_train, y_train = design_matrix(train_cond, table)
    if x_train.shape[1] != table.dim:
        raise ValueError("feature dimension does not match the table")
    model_seed = child_seed(seed, _CONDITION_TAG[condition], _LEARNER_TAG[learner_kind])
    trained = tune(x_train, y_train, learner_kind, grid, seed=model_seed)

    pairs = build_paired_testset(test, rules)
    evaluated = [note for pair in pairs for note in pair]
    x_eval, y_eval = design_matrix(evaluated, table)
    y_pred = trained.predict(x_eval)

    confusions = _group_confusions(evaluated, y_eval, y_pred)
    ratio, advantaged = fnrr(confusions["F"], confusions["M"])
    return FairnessReport(
        condition=condition,
        learner_kind=learner_kind,
        macro_f1=float(macro_f1(y_eval, y_pred)),
        fnr_f=float(confusions["F"].fnr),
        fnr_m=float(confusions["M"].fnr),
        fnrr=float(ratio),
        advantaged=advantaged,
        mismatch_count=mismatch_count(trained, pairs, table),
        n_pairs=len(pairs),
        seed=int(seed),
        hyperparams=dict(trained.hyperparams),
    )


@dataclass
class MatrixResult:
    """All reports of a conditions x learners sweep plus the embedding audit."""

    embedding_name: str
    seed: int
    bias: Optional[BiasScore]
    direction: Optional[GenderDirection]
    reports: List[FairnessReport]
    failures: List[Dict] = field(default_factory=list)

    def to_jsonable(self):
        payload = {
            "version": REPORT_JSON_VERSION,
            "embedding": self.embedding_name,
            "seed": self.seed,
            "bias": self.bias.to_jsonable() if self.bias else None,
            "spectrum": [float(r) for r in self.direction.spectrum] if self.direction else None,
            "reports": [r.to_jsonable() for r in self.reports],
            "failures": self.failures,
        }
        return payload

    def to_json(self) -> str:
        return json.dumps(self.to_jsonable(), sort_keys=True, indent=2) + "\n"


def report_matrix(corpus, table, grid=None, seed=0, *, pairs=None, targets=None,
                  learners: Sequence[str] = LEARNER_KINDS,
                  conditions: Sequence[str] = CONDITIONS,
                  rules=None, neutralize_mode="replace", per_cell=90,
                  min_per_cell=1, keep_going=False) -> MatrixResult:
    """Run every requested (condition, learner) cell on one shared split.

    With ``keep_going`` a failing cell is recorded under ``failures``
    instead of aborting the sweep. The embedding bias header (Direct Bias
    plus spectrum) is computed when ``pairs`` and ``targets`` are given.
    """
    grid = grid or HyperparamGrid()
    rules = rules or SwapRules.default()
    split = protocol_split(corpus, per_cell, child_seed(seed, "split"), min_per_cell)

    bias = direction = None
    if pairs is not None and targets is not None:
        direction = gender_direction(table, pairs)
        bias = direct_bias(table, direction, targets)

    reports, failures = [], []
    for condition in conditions:
        for learner in learners:
            try:
                reports.append(run_experiment(
                    corpus, table, condition, learner, grid, seed,
                    rules=rules, neutralize_mode=neutralize_mode,
                    per_cell=per_cell, min_per_cell=min_per_cell, split=split,
                ))
            except Exception as exc:
                if not keep_going:
                    raise
                log.error("cell (%s, %s) failed: %s", condition, learner, exc)
                failures.append({"condition": condition, "learner": learner,
                                 "error": str(exc)})
    return MatrixResult(
        embedding_name=table.name,
        seed=int(seed),
        bias=bias,
        direction=direction,
        reports=reports,
        failures=failures,
    )


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def _tagged(value, tag):
    cell = f"{value:.2f}"
    return cell if tag in ("tie", "neutral") else f"{cell}_{tag}"


def render_markdown(result: MatrixResult, conditions: Sequence[str] = CONDITIONS) -> str:
    """Markdown table: one row per learner, DB column, then FNRR and F1
    sub-columns for each condition."""
    by_cell = {(r.condition, r.learner_kind): r for r in result.reports}
    learners = sorted({r.learner_kind for r in result.reports},
                      key=lambda k: _LEARNER_TAG.get(k, 99))
    conditions = [c for c in conditions if any(r.condition == c for r in result.reports)]

    header = ["learner", "DB"]
    for c in conditions:
        header += [f"{c} FNRR", f"{c} F1"]
    lines = ["| " + " | ".join(header) + " |",
             "|" + "---|" * len(header)]
    db_cell = _tagged(result.bias.db, result.bias.direction) if result.bias else "-"
    for learner in learners:
        row = [learner, db_cell]
        for c in conditions:
            rep = by_cell.get((c, learner))
            if rep is None:
                row += ["ERR", "ERR"]
            else:
                row += [_tagged(rep.fnrr, rep.advantaged), f"{rep.macro_f1:.2f}"]
        lines.append("| " + " | ".join(row) + " |")
    return "\n".join(lines) + "\n"
