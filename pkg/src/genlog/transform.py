"""Script-driven unfold/fold clause transformation.

Steps are applied to a numbered clause list: `define` introduces a clause for
a new predicate, `unfold` replaces a body call by the bodies of all matching
clauses, and `fold` replaces a body-goal subsequence by a defining clause's
head instance after checking the fold's applicability conditions (internal
variables of the defining clause must map to distinct variables that occur
nowhere else in the target clause).  Equivalence of the result is checked by
probing: both programs are solved on ground goals and their bounded
explanation multisets compared.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from .engine import ExplosionError, Solver, expand_explanations, explanation_key
from .parser import _Parser, clause_to_text, parse_term
from .program import (
    Call, Clause, Msw, Program, body_vars, goal_vars, map_goal_vars,
)
from .terms import (
    Bindings, Atom, Struct, Term, Var, map_vars, offset_vars, term_vars,
    to_text,
)


class TransformError(Exception):
    pass


@dataclass(frozen=True)
class Define:
    clause: Clause


@dataclass(frozen=True)
class Unfold:
    target: int
    position: int           # 1-based body position


@dataclass(frozen=True)
class Fold:
    target: int
    first: int              # 1-based inclusive range of body positions
    last: int
    definer: int


@dataclass
class TransformScript:
    steps: list


@dataclass
class TransformLog:
    lines: list = field(default_factory=list)

    def add(self, text: str) -> None:
        self.lines.append(text)

    def __str__(self):
        return "\n".join(self.lines) + "\n"


def _resolve_goal(g, b: Bindings):
    mapping = {}
    for v in goal_vars(g):
        mapping[v] = b.resolve(Var(v))
    return map_goal_vars(g, mapping)


def _renumber_clause(head: Term, body: tuple, line: int = 0) -> Clause:
    order: dict[int, int] = {}
    for v in term_vars(head) + body_vars(body):
        order.setdefault(v, len(order))
    mapping = {v: Var(i) for v, i in order.items()}
    return Clause(map_vars(head, mapping),
                  tuple(map_goal_vars(g, mapping) for g in body),
                  nvars=len(order), line=line)


def _goal_pred(term: Term):
    if isinstance(term, Atom):
        return (term.name, 0)
    if isinstance(term, Struct):
        return (term.functor, len(term.args))
    raise TransformError(f"cannot unfold {to_text(term)}")


class _Workspace:
    """Numbered clause store; ids grow monotonically across steps."""

    def __init__(self, program: Program):
        self.decls = program.switch_decls
        self.clauses: dict[int, Clause] = {
            i + 1: c for i, c in enumerate(program.clauses)}
        # folding may refer to a defining clause even after it was unfolded
        # away, so removed clauses stay on record
        self.record: dict[int, Clause] = dict(self.clauses)
        self.next_id = len(program.clauses) + 1

    def get(self, cid: int) -> Clause:
        c = self.clauses.get(cid)
        if c is None:
            raise TransformError(f"no clause ({cid}) at this step")
        return c

    def get_recorded(self, cid: int) -> Clause:
        c = self.record.get(cid)
        if c is None:
            raise TransformError(f"clause ({cid}) was never defined")
        return c

    def add(self, c: Clause) -> int:
        cid = self.next_id
        self.next_id += 1
        self.clauses[cid] = c
        self.record[cid] = c
        return cid

    def matching(self, term: Term) -> list[tuple[int, Clause]]:
        pred = _goal_pred(term)
        return [(cid, c) for cid, c in sorted(self.clauses.items())
                if c.pred() == pred]

    def to_program(self) -> Program:
        ordered = [self.clauses[cid] for cid in sorted(self.clauses)]
        return Program(ordered, self.decls)


def apply_script(program: Program,
                 script: TransformScript) -> tuple[Program, TransformLog]:
    ws = _Workspace(program)
    log = TransformLog()
    for step_no, step in enumerate(script.steps, start=1):
        try:
            if isinstance(step, Define):
                cid = ws.add(step.clause)
                log.add(f"step {step_no}: define ({cid}) "
                        f"{clause_to_text(step.clause)}")
            elif isinstance(step, Unfold):
                _apply_unfold(ws, step, step_no, log)
            elif isinstance(step, Fold):
                _apply_fold(ws, step, step_no, log)
            else:
                raise TransformError(f"unknown step {step!r}")
        except TransformError as e:
            raise TransformError(f"step {step_no}: {e}") from None
    return ws.to_program(), log


def _apply_unfold(ws: _Workspace, step: Unfold, step_no: int,
                  log: TransformLog) -> None:
    target = ws.get(step.target)
    if not (1 <= step.position <= len(target.body)):
        raise TransformError(
            f"clause ({step.target}) has no body position {step.position}")
    goal = target.body[step.position - 1]
    if not isinstance(goal, Call):
        raise TransformError(
            "only plain calls can be unfolded; "
            f"position {step.position} holds {type(goal).__name__}")
    matches = ws.matching(goal.term)
    del ws.clauses[step.target]
    produced = []
    for mid, mc in matches:
        b = Bindings()
        off = target.nvars
        head_m = offset_vars(mc.head, off)
        if not b.unify(goal.term, head_m):
            continue
        body_m = tuple(_resolve_goal(map_goal_vars(
            g, {v: Var(v + off) for v in goal_vars(g)}), b) for g in mc.body)
        new_body = (tuple(_resolve_goal(g, b)
                          for g in target.body[:step.position - 1]) +
                    body_m +
                    tuple(_resolve_goal(g, b)
                          for g in target.body[step.position:]))
        new_head = b.resolve(target.head)
        c = _renumber_clause(new_head, new_body)
        cid = ws.add(c)
        produced.append((cid, mid, c))
    if produced:
        for cid, mid, c in produced:
            log.add(f"step {step_no}: unfold ({step.target}) at "
                    f"{step.position} by ({mid}) gives ({cid}) "
                    f"{clause_to_text(c)}")
    else:
        log.add(f"step {step_no}: unfold ({step.target}) at {step.position} "
                "matched no clause; clause deleted")


def _match_term(pattern: Term, target: Term, binding: dict) -> bool:
    """One-way matching: only pattern variables bind."""
    if isinstance(pattern, Var):
        bound = binding.get(pattern.id)
        if bound is None:
            binding[pattern.id] = target
            return True
        return bound == target
    if isinstance(pattern, Struct):
        return (isinstance(target, Struct)
                and pattern.functor == target.functor
                and len(pattern.args) == len(target.args)
                and all(_match_term(p, t, binding)
                        for p, t in zip(pattern.args, target.args)))
    return pattern == target


def _match_goal(pattern, target, binding: dict) -> bool:
    if isinstance(pattern, Call) and isinstance(target, Call):
        return _match_term(pattern.term, target.term, binding)
    if isinstance(pattern, Msw) and isinstance(target, Msw):
        return (_match_term(pattern.switch, target.switch, binding)
                and _match_term(pattern.outcome, target.outcome, binding))
    return False


def _apply_fold(ws: _Workspace, step: Fold, step_no: int,
                log: TransformLog) -> None:
    target = ws.get(step.target)
    definer = ws.get_recorded(step.definer)
    i, j = step.first, step.last
    if not (1 <= i <= j <= len(target.body)):
        raise TransformError(
            f"positions {i}..{j} out of range for clause ({step.target})")
    segment = target.body[i - 1:j]
    if len(definer.body) != len(segment):
        raise TransformError(
            f"defining clause ({step.definer}) has {len(definer.body)} body "
            f"goals but the folded segment has {len(segment)}")
    binding: dict[int, Term] = {}
    for pg, tg in zip(definer.body, segment):
        if not _match_goal(pg, tg, binding):
            raise TransformError(
                "folded segment is not an instance of the defining "
                f"clause ({step.definer}) body")
    head_vars = set(term_vars(definer.head))
    internal = [v for v in body_vars(definer.body) if v not in head_vars]
    outside_vars = set(term_vars(target.head))
    for k, g in enumerate(target.body):
        if not (i - 1 <= k <= j - 1):
            outside_vars.update(goal_vars(g))
    folded_head = map_vars(definer.head, binding)
    head_image_vars = set(term_vars(folded_head))
    seen_images = set()
    for v in internal:
        img = binding.get(v)
        if not isinstance(img, Var):
            raise TransformError(
                f"internal variable of ({step.definer}) is instantiated to "
                f"{to_text(img) if img is not None else '?'}; fold not applicable")
        if img.id in seen_images:
            raise TransformError(
                "two internal variables map to the same variable; "
                "fold not applicable")
        seen_images.add(img.id)
        if img.id in outside_vars or img.id in head_image_vars:
            raise TransformError(
                f"internal variable image {to_text(img)} occurs elsewhere in "
                "the target clause; fold not applicable")
    new_body = target.body[:i - 1] + (Call(folded_head),) + target.body[j:]
    del ws.clauses[step.target]
    c = _renumber_clause(target.head, new_body)
    cid = ws.add(c)
    log.add(f"step {step_no}: fold ({step.target}) at {i}..{j} by "
            f"({step.definer}) gives ({cid}) {clause_to_text(c)}")


# ---------------------------------------------------------------------------
# Script files
# ---------------------------------------------------------------------------

_UNFOLD_RE = re.compile(r"unfold\s+(\d+)\s+at\s+(\d+)\s*\.$")
_FOLD_RE = re.compile(r"fold\s+(\d+)\s+at\s+(\d+)\s*\.\.\s*(\d+)\s+by\s+(\d+)\s*\.$")


def parse_script(text: str) -> TransformScript:
    steps = []
    for raw in text.splitlines():
        line = raw.split("%")[0].strip()
        if not line:
            continue
        if line.startswith("define "):
            body_text = line[len("define "):]
            from .parser import parse_clause
            steps.append(Define(parse_clause(body_text)))
            continue
        m = _UNFOLD_RE.match(line)
        if m:
            steps.append(Unfold(int(m.group(1)), int(m.group(2))))
            continue
        m = _FOLD_RE.match(line)
        if m:
            steps.append(Fold(int(m.group(1)), int(m.group(2)),
                              int(m.group(3)), int(m.group(4))))
            continue
        raise TransformError(f"bad script line: {line!r}")
    return TransformScript(steps)


def read_script(path: str) -> TransformScript:
    with open(path) as f:
        return parse_script(f.read())


# ---------------------------------------------------------------------------
# Probe-based equivalence
# ---------------------------------------------------------------------------

@dataclass
class ProbeResult:
    probe: tuple
    status: str              # equal | unequal | skipped
    detail: str = ""


@dataclass
class EquivalenceReport:
    results: list = field(default_factory=list)

    @property
    def all_equal(self) -> bool:
        return all(r.status != "unequal" for r in self.results)

    @property
    def skipped(self) -> int:
        return sum(r.status == "skipped" for r in self.results)

    def __str__(self):
        lines = [f"{r.status}\t{','.join(to_text(t) for t in r.probe)}"
                 + (f"\t{r.detail}" if r.detail else "")
                 for r in self.results]
        return "\n".join(lines) + "\n"


def _instantiate(pattern: Term, probe: tuple) -> Term:
    vs = term_vars(pattern)
    if len(vs) != len(probe):
        raise TransformError(
            f"pattern {to_text(pattern)} has {len(vs)} variables but the "
            f"probe supplies {len(probe)} terms")
    return map_vars(pattern, {v: t for v, t in zip(vs, probe)})


def _explanation_multiset(program: Program, goal: Term, limit: int,
                          max_steps: int) -> Optional[Counter]:
    graph = Solver(program, max_steps=max_steps).solve_all(goal)
    if graph is None:
        return Counter()
    return Counter(explanation_key(e)
                   for e in expand_explanations(graph, limit))


def check_explanation_equivalence(p1: Program, goal1: Term, p2: Program,
                                  goal2: Term, probes: list,
                                  limit: int = 10_000,
                                  max_steps: int = 10_000_000) -> EquivalenceReport:
    """Compare bounded explanation multisets of both programs on each probe.

    This is falsification by testing, not a proof: probes that explode past
    the enumeration limit are skipped and flagged.
    """
    report = EquivalenceReport()
    for probe in probes:
        probe = tuple(probe)
        g1 = _instantiate(goal1, probe)
        g2 = _instantiate(goal2, probe)
        try:
            m1 = _explanation_multiset(p1, g1, limit, max_steps)
            m2 = _explanation_multiset(p2, g2, limit, max_steps)
        except ExplosionError:
            report.results.append(ProbeResult(probe, "skipped",
                                              "explanation limit exceeded"))
            continue
        if m1 == m2:
            report.results.append(ProbeResult(probe, "equal"))
        else:
            diff = (m1 - m2) or (m2 - m1)
            example = next(iter(diff))
            report.results.append(ProbeResult(
                probe, "unequal",
                "differing explanation " + ";".join(
                    f"{s}={o} x{k}" for s, o, k in example)))
    return report
