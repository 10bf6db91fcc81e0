"""Cross-validation harness: seeded fold splits, Viterbi prediction, task
metrics, and mean(stddev) reports in the usual accuracy-table format."""

from __future__ import annotations

import random
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

from .engine import Solver
from .inference import NEG_INF, ParameterTable, viterbi
from .learning import FitReport, Instance, TrainConfig, count_mle, em_fit, train_crf
from .program import Program
from .terms import Bindings, Struct, Term, Var, list_items


class ExperimentError(Exception):
    pass


@dataclass(frozen=True)
class LabeledExample:
    """One evaluation record: the observed input, its labeled completion, an
    open query with a single variable at the label position, and the gold
    label term that variable should take."""
    incomplete: Term
    complete: Term
    query: Term
    gold: Term


def make_example(complete: Term) -> LabeledExample:
    """Build a LabeledExample from a ground goal of shape f(Input, Label)."""
    if not isinstance(complete, Struct) or len(complete.args) != 2:
        raise ExperimentError(
            "labeled goals must have the shape f(Input, Label)")
    inp, gold = complete.args
    return LabeledExample(
        incomplete=Struct(complete.functor, (inp,)),
        complete=complete,
        query=Struct(complete.functor, (inp, Var(0))),
        gold=gold)


# ---------------------------------------------------------------------------
# Fold splits
# ---------------------------------------------------------------------------

def kfold_indices(n: int, folds: int, seed: int) -> list:
    """Uniform random partition into `folds` blocks of near-equal size.

    Unstratified on purpose; a fixed seed gives an identical assignment."""
    if folds < 2:
        raise ExperimentError("folds must be >= 2")
    if folds > n:
        raise ExperimentError(f"cannot split {n} records into {folds} folds")
    idx = list(range(n))
    random.Random(seed).shuffle(idx)
    out = []
    start = 0
    for f in range(folds):
        size = n // folds + (1 if f < n % folds else 0)
        out.append(sorted(idx[start:start + size]))
        start += size
    return out


# ---------------------------------------------------------------------------
# Training / prediction
# ---------------------------------------------------------------------------

def fit(program: Program, examples: list,
        cfg: TrainConfig) -> tuple[ParameterTable, FitReport]:
    if cfg.method == "counting":
        data = [Instance(ex.incomplete, ex.complete) for ex in examples]
        table = count_mle(program, data, smoothing=cfg.smoothing)
        return table, FitReport(final_objective=0.0, iterations=1,
                                objective_trace=[], converged=True)
    if cfg.method == "em":
        data = [Instance(ex.incomplete, ex.complete) for ex in examples]
        return em_fit(program, data, cfg=cfg)
    data = [Instance(ex.incomplete, ex.complete) for ex in examples]
    return train_crf(program, data, cfg=cfg)


def predict_one(program: Program, query: Term, params: ParameterTable,
                max_steps: int = 10_000_000) -> tuple[Optional[Term], float]:
    """Viterbi-decode the open query; returns (label term or None, score)."""
    graph = Solver(program, max_steps=max_steps).solve_all(query)
    if graph is None:
        return None, NEG_INF
    res = viterbi(graph, params)
    b = Bindings()
    if not b.unify(query, res.decode):
        raise ExperimentError(
            "decoded goal does not match the query pattern")
    out = b.resolve(Var(0))
    if isinstance(out, Var):
        return None, res.score
    return out, res.score


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------

def exact_match(pred: Optional[Term], gold: Term) -> float:
    return 1.0 if pred == gold else 0.0


def token_accuracy(pred: Optional[Term], gold: Term) -> float:
    """Positionwise agreement of two list terms, over the gold length."""
    want = list_items(gold)
    if not want:
        raise ExperimentError("empty gold label sequence")
    if pred is None:
        return 0.0
    got = list_items(pred)
    hits = sum(1 for a, b in zip(got, want) if a == b)
    return hits / len(want)


METRICS: dict[str, Callable] = {
    "class_accuracy": exact_match,
    "token_accuracy": token_accuracy,
    "exact_tree_match": exact_match,
}


def evaluate(program: Program, examples: list, params: ParameterTable,
             metric: Callable, max_steps: int = 10_000_000) -> float:
    if not examples:
        raise ExperimentError("nothing to evaluate")
    return sum(metric(predict_one(program, ex.query, params, max_steps)[0],
                      ex.gold)
               for ex in examples) / len(examples)


# ---------------------------------------------------------------------------
# Cross-validation
# ---------------------------------------------------------------------------

@dataclass
class MetricsReport:
    method: str
    metric: str
    seed: int
    fold_scores: list = field(default_factory=list)   # fractions in [0,1]
    train_seconds: list = field(default_factory=list)

    @property
    def mean(self) -> float:
        return statistics.fmean(self.fold_scores)

    @property
    def stddev(self) -> float:
        if len(self.fold_scores) < 2:
            return 0.0
        return statistics.stdev(self.fold_scores)

    def summary(self) -> str:
        return f"{100 * self.mean:.2f}({100 * self.stddev:.2f})"

    def to_text(self, timing: bool = False) -> str:
        """Key/value block; timing lines are opt-in so that fixed-seed runs
        stay byte-identical."""
        lines = [
            f"method: {self.method}",
            f"metric: {self.metric}",
            f"seed: {self.seed}",
            f"folds: {len(self.fold_scores)}",
            f"accuracy: {self.summary()}",
        ]
        lines += [f"fold_{i + 1}: {100 * s:.2f}"
                  for i, s in enumerate(self.fold_scores)]
        if timing:
            lines += [f"train_seconds_fold_{i + 1}: {t:.3f}"
                      for i, t in enumerate(self.train_seconds)]
            lines.append(f"train_seconds_total: {sum(self.train_seconds):.3f}")
        return "\n".join(lines) + "\n"


def cross_validate(program: Program, examples: list, metric_name: str,
                   cfg: TrainConfig, folds: int = 10, seed: int = 0,
                   threads: int = 1,
                   max_steps: int = 10_000_000) -> MetricsReport:
    metric = METRICS.get(metric_name)
    if metric is None:
        raise ExperimentError(f"unknown metric {metric_name!r}; "
                              f"one of {sorted(METRICS)}")
    splits = kfold_indices(len(examples), folds, seed)
    report = MetricsReport(method=cfg.method, metric=metric_name, seed=seed)

    def run_fold(held_out: list) -> tuple[float, float]:
        held = set(held_out)
        train = [ex for i, ex in enumerate(examples) if i not in held]
        test = [examples[i] for i in held_out]
        t0 = time.perf_counter()
        params, _ = fit(program, train, cfg)
        spent = time.perf_counter() - t0
        return evaluate(program, test, params, metric, max_steps), spent

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_fold, splits))
    else:
        results = [run_fold(s) for s in splits]
    for score, spent in results:
        report.fold_scores.append(score)
        report.train_seconds.append(spent)
    return report
