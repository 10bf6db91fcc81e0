"""Command-line front end: train, eval, predict, transform.

Task selection is driven by the input descriptors: --schema means tabular
classification (CSV rows), --grammar means constituency trees, and plain
--data with neither means labeled token sequences.  Exit codes: 0 on
success/convergence, 2 when an iterative fit stops at the iteration cap,
1 on any error.
"""

from __future__ import annotations

import argparse
import sys

from .engine import EngineError
from .experiments import (
    ExperimentError, cross_validate, fit, make_example, predict_one,
)
from .inference import ParameterTable, SwitchSpace
from .learning import LearningError, TrainConfig
from .parser import parse_program, parse_term, program_to_text
from .program import Program, ProgramError
from .terms import Atom, Struct, Var, make_list, to_text
from .transform import (
    TransformError, apply_script, check_explanation_equivalence, read_script,
)
from . import zoo
from .zoo import ZooError


class CliError(Exception):
    pass


def _read_program(path: str) -> Program:
    with open(path) as f:
        return parse_program(f.read())


# ---------------------------------------------------------------------------
# Task loading
# ---------------------------------------------------------------------------

class Task:
    """A program plus labeled examples and the metric that scores them."""

    def __init__(self, program, examples, metric, decode_to_text):
        self.program = program
        self.examples = examples
        self.metric = metric
        self.decode_to_text = decode_to_text


def _load_tabular(args) -> Task:
    schema = zoo.read_schema(args.schema)
    structure = "bnc" if schema.parent_map else "naive_bayes"
    if args.program:
        program = _read_program(args.program)
    else:
        program = parse_program(
            zoo.generate_tabular_program(schema, structure))
    rows = zoo.read_csv_rows(args.data, schema)
    examples = []
    for i, row in enumerate(rows):
        try:
            examples.append(make_example(
                zoo.encode_tabular(schema, row, True, structure)))
        except ZooError as e:
            raise CliError(f"{args.data}: row {i + 1}: {e}")
    return Task(program, examples, "class_accuracy", to_text)


def _load_sequences(args) -> Task:
    if not args.program:
        raise CliError("sequence tasks need --program")
    program = _read_program(args.program)
    examples = []
    for i, (tokens, labels) in enumerate(zoo.read_sequences(args.data)):
        if labels is None:
            raise CliError(
                f"{args.data}: record {i + 1} has no label line")
        try:
            examples.append(make_example(zoo.encode_sequence(tokens, labels)))
        except ZooError as e:
            raise CliError(f"{args.data}: record {i + 1}: {e}")
    return Task(program, examples, "token_accuracy", to_text)


def _load_trees(args) -> Task:
    grammar = zoo.read_grammar(args.grammar)
    if args.program:
        program = _read_program(args.program)
    else:
        topdown, leftcorner = zoo.generate_cfg_programs(grammar)
        program = parse_program(
            leftcorner if args.parser == "leftcorner" else topdown)
    examples = []
    for i, tree in enumerate(zoo.read_trees(args.data)):
        try:
            td, lc, _ = zoo.encode_tree(grammar, tree)
        except ZooError as e:
            raise CliError(f"{args.data}: tree {i + 1}: {e}")
        examples.append(make_example(
            lc if args.parser == "leftcorner" else td))
    return Task(program, examples, "exact_tree_match", zoo.tree_to_text)


def _load_task(args) -> Task:
    if args.schema and args.grammar:
        raise CliError("--schema and --grammar are mutually exclusive")
    if args.schema:
        return _load_tabular(args)
    if args.grammar:
        return _load_trees(args)
    return _load_sequences(args)


def _queries_for_predict(args) -> Task:
    """Like _load_task but tolerates unlabeled records; gold is None."""
    if args.schema:
        schema = zoo.read_schema(args.schema)
        structure = "bnc" if schema.parent_map else "naive_bayes"
        program = (_read_program(args.program) if args.program else
                   parse_program(zoo.generate_tabular_program(schema, structure)))
        import csv
        with open(args.data, newline="") as f:
            reader = csv.reader(f)
            header = next(reader)
            try:
                cols = [header.index(n) for n, _ in schema.attributes]
            except ValueError as e:
                raise CliError(f"{args.data}: missing column ({e})")
            queries = []
            for r in reader:
                if not r:
                    continue
                lst = make_list([Atom(r[c]) for c in cols])
                pred = "nb" if structure == "naive_bayes" else "bn"
                queries.append(Struct(pred, (lst, Var(0))))
        return Task(program, queries, "class_accuracy", to_text)
    if args.grammar:
        grammar = zoo.read_grammar(args.grammar)
        topdown, leftcorner = zoo.generate_cfg_programs(grammar)
        program = (_read_program(args.program) if args.program else
                   parse_program(leftcorner if args.parser == "leftcorner"
                                 else topdown))
        pred = "plcg" if args.parser == "leftcorner" else "parse"
        queries = []
        with open(args.data) as f:
            for line in f:
                line = line.strip()
                if not line:
                    continue
                if line.startswith("("):
                    tokens = zoo.tree_leaves(zoo.parse_bracketed_tree(line))
                else:
                    tokens = line.split()
                xs = make_list([Atom(t) for t in tokens])
                queries.append(Struct(pred, (xs, Var(0))))
        return Task(program, queries, "exact_tree_match", zoo.tree_to_text)
    if not args.program:
        raise CliError("sequence tasks need --program")
    program = _read_program(args.program)
    queries = []
    for tokens, _labels in zoo.read_sequences(args.data):
        xs = make_list([Atom(t) for t in tokens])
        queries.append(Struct("hmm0", (xs, Var(0))))
    return Task(program, queries, "token_accuracy", to_text)


def _train_config(args) -> TrainConfig:
    return TrainConfig(method=args.method, mu=args.mu,
                       smoothing=args.smoothing,
                       max_iters=args.max_iters,
                       max_steps=args.limit_steps)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_train(args) -> int:
    task = _load_task(args)
    params, report = fit(task.program, task.examples, _train_config(args))
    if args.params_out:
        params.save(args.params_out)
    sys.stdout.write(report.to_text())
    return 0 if report.converged else 2


def cmd_eval(args) -> int:
    task = _load_task(args)
    report = cross_validate(task.program, task.examples, task.metric,
                            _train_config(args), folds=args.folds,
                            seed=args.seed, threads=args.threads,
                            max_steps=args.limit_steps)
    if args.metrics_out:
        with open(args.metrics_out, "w") as f:
            f.write(report.to_text())
    sys.stdout.write(report.to_text(timing=True))
    return 0


def cmd_predict(args) -> int:
    task = _queries_for_predict(args)
    if not args.params_in:
        raise CliError("predict needs --params-in")
    params = ParameterTable.load(args.params_in, SwitchSpace(task.program))
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        for q in task.examples:
            decoded, score = predict_one(task.program, q, params,
                                         max_steps=args.limit_steps)
            text = task.decode_to_text(decoded) if decoded is not None else "?"
            out.write(f"{text}\t{score:.6f}\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_transform(args) -> int:
    program = _read_program(args.program)
    script = read_script(args.script)
    derived, log = apply_script(program, script)
    sys.stdout.write(str(log))
    if args.out:
        with open(args.out, "w") as f:
            f.write(program_to_text(derived))
    if not args.probe:
        return 0
    pattern = parse_term(args.probe)
    # defined predicates do not exist in the original program; the meaning
    # preservation claim is against the original plus the definitions
    from .transform import Define
    defines = [s.clause for s in script.steps if isinstance(s, Define)]
    baseline = Program(list(program.clauses) + defines, program.switch_decls)
    probes = []
    with open(args.probes) as f:
        for line in f:
            line = line.strip()
            if line:
                probes.append(tuple(parse_term(t)
                                    for t in line.split("\t")))
    report = check_explanation_equivalence(
        baseline, pattern, derived, pattern, probes,
        limit=args.limit_explanations, max_steps=args.limit_steps)
    sys.stdout.write(str(report))
    if report.skipped:
        sys.stderr.write(f"warning: {report.skipped} probe(s) skipped\n")
    return 0 if report.all_equal else 1


# ---------------------------------------------------------------------------
# Argument plumbing
# ---------------------------------------------------------------------------

def _add_io_flags(p, need_data=True):
    p.add_argument("--program", help="logic program file")
    p.add_argument("--schema", help="tabular schema file (class line first)")
    p.add_argument("--grammar", help="context-free grammar file")
    p.add_argument("--parser", choices=["topdown", "leftcorner"],
                   default="topdown")
    if need_data:
        p.add_argument("--data", required=True, help="records file")
    p.add_argument("--limit-steps", type=int, default=10_000_000,
                   help="resolution-step cap per goal")


def _add_fit_flags(p):
    p.add_argument("--method", choices=["counting", "em", "lbfgs"],
                   default="counting")
    p.add_argument("--mu", type=float, default=1.0,
                   help="L2 regularization strength")
    p.add_argument("--smoothing", type=float, default=0.0,
                   help="additive smoothing for counting")
    p.add_argument("--max-iters", type=int, default=500)


def build_arg_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="genlog",
        description="Train, evaluate, and transform probabilistic-choice "
                    "logic programs.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit parameters on the full dataset")
    _add_io_flags(p)
    _add_fit_flags(p)
    p.add_argument("--params-out", help="write the fitted parameter table")
    p.set_defaults(run=cmd_train)

    p = sub.add_parser("eval", help="cross-validated accuracy")
    _add_io_flags(p)
    _add_fit_flags(p)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--metrics-out", help="write the metrics report")
    p.set_defaults(run=cmd_eval)

    p = sub.add_parser("predict", help="decode each input record")
    _add_io_flags(p)
    p.add_argument("--params-in", help="parameter table to decode with")
    p.add_argument("--out", help="predictions file (default stdout)")
    p.set_defaults(run=cmd_predict)

    p = sub.add_parser("transform", help="apply an unfold/fold script")
    p.add_argument("--program", required=True)
    p.add_argument("--script", required=True)
    p.add_argument("--out", help="write the transformed program")
    p.add_argument("--probe", help="goal pattern for equivalence probing")
    p.add_argument("--probes", help="file of tab-separated ground probe terms")
    p.add_argument("--limit-explanations", type=int, default=10_000)
    p.add_argument("--limit-steps", type=int, default=10_000_000)
    p.set_defaults(run=cmd_transform)
    return ap


def main(argv=None) -> int:
    args = build_arg_parser().parse_args(argv)
    try:
        if getattr(args, "probe", None) and not getattr(args, "probes", None):
            raise CliError("--probe needs --probes")
        return args.run(args)
    except (CliError, ProgramError, EngineError, LearningError, TransformError,
            ExperimentError, ZooError, OSError, ValueError) as e:
        sys.stderr.write(f"error: {e}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
