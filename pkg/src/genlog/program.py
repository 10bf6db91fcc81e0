"""Program representation: clauses, body goals, switch declarations."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

from .terms import (
    Atom, Int, Struct, Term, Var, canonical, is_ground, list_items, map_vars,
    term_vars, to_text, unify,
)

log = logging.getLogger(__name__)


class ProgramError(Exception):
    """Raised for load-time errors: syntax, invalid declarations, bad heads."""


# ---------------------------------------------------------------------------
# Body goals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Call:
    term: Term


@dataclass(frozen=True)
class Msw:
    switch: Term
    outcome: Term


@dataclass(frozen=True)
class Unify2:
    left: Term
    right: Term


@dataclass(frozen=True)
class StrictEq:
    left: Term
    right: Term


@dataclass(frozen=True)
class IfThenElse:
    cond: tuple
    then: tuple
    orelse: tuple


@dataclass(frozen=True)
class Disj:
    left: tuple
    right: tuple


@dataclass(frozen=True)
class TrueGoal:
    pass


@dataclass(frozen=True)
class FailGoal:
    pass


TRUE = TrueGoal()
FAIL = FailGoal()

BodyGoal = Call | Msw | Unify2 | StrictEq | IfThenElse | Disj | TrueGoal | FailGoal


def goal_vars(g: BodyGoal) -> list[int]:
    if isinstance(g, Call):
        return term_vars(g.term)
    if isinstance(g, Msw):
        return term_vars(Struct("msw", (g.switch, g.outcome)))
    if isinstance(g, (Unify2, StrictEq)):
        return term_vars(Struct("=", (g.left, g.right)))
    if isinstance(g, IfThenElse):
        return body_vars(g.cond) + body_vars(g.then) + body_vars(g.orelse)
    if isinstance(g, Disj):
        return body_vars(g.left) + body_vars(g.right)
    return []


def body_vars(body: tuple) -> list[int]:
    out: list[int] = []
    for g in body:
        out.extend(goal_vars(g))
    return out


def map_goal_vars(g: BodyGoal, mapping: dict[int, Term]) -> BodyGoal:
    if isinstance(g, Call):
        return Call(map_vars(g.term, mapping))
    if isinstance(g, Msw):
        return Msw(map_vars(g.switch, mapping), map_vars(g.outcome, mapping))
    if isinstance(g, Unify2):
        return Unify2(map_vars(g.left, mapping), map_vars(g.right, mapping))
    if isinstance(g, StrictEq):
        return StrictEq(map_vars(g.left, mapping), map_vars(g.right, mapping))
    if isinstance(g, IfThenElse):
        return IfThenElse(
            tuple(map_goal_vars(x, mapping) for x in g.cond),
            tuple(map_goal_vars(x, mapping) for x in g.then),
            tuple(map_goal_vars(x, mapping) for x in g.orelse),
        )
    if isinstance(g, Disj):
        return Disj(
            tuple(map_goal_vars(x, mapping) for x in g.left),
            tuple(map_goal_vars(x, mapping) for x in g.right),
        )
    return g


def _contains_msw(body: tuple) -> bool:
    for g in body:
        if isinstance(g, Msw):
            return True
        if isinstance(g, IfThenElse) and (
            _contains_msw(g.cond) or _contains_msw(g.then) or _contains_msw(g.orelse)
        ):
            return True
        if isinstance(g, Disj) and (_contains_msw(g.left) or _contains_msw(g.right)):
            return True
    return False


def _called_preds(body: tuple) -> set[tuple[str, int]]:
    out: set[tuple[str, int]] = set()
    for g in body:
        if isinstance(g, Call):
            t = g.term
            if isinstance(t, Atom):
                out.add((t.name, 0))
            elif isinstance(t, Struct):
                out.add((t.functor, len(t.args)))
        elif isinstance(g, IfThenElse):
            out |= _called_preds(g.cond) | _called_preds(g.then) | _called_preds(g.orelse)
        elif isinstance(g, Disj):
            out |= _called_preds(g.left) | _called_preds(g.right)
    return out


# ---------------------------------------------------------------------------
# Clauses and programs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Clause:
    head: Term
    body: tuple  # of BodyGoal
    nvars: int   # variables are numbered 0..nvars-1, clause-local
    line: int = 0

    def pred(self) -> tuple[str, int]:
        h = self.head
        if isinstance(h, Atom):
            return (h.name, 0)
        assert isinstance(h, Struct)
        return (h.functor, len(h.args))


RESERVED_PREDS = {("msw", 2), ("true", 0), ("fail", 0), ("values", 2),
                  ("=", 2), ("==", 2), (";", 2), ("->", 2)}


@dataclass
class SwitchDecl:
    pattern: Term
    outcomes: tuple  # ground terms, ordered, duplicate-free


class Program:
    """An immutable logic program plus its switch-outcome declarations."""

    def __init__(self, clauses: list[Clause], switch_decls: list[SwitchDecl]):
        self.clauses = list(clauses)
        self.switch_decls = list(switch_decls)
        self.index: dict[tuple[str, int], list[Clause]] = {}
        for c in self.clauses:
            self.index.setdefault(c.pred(), []).append(c)
        self._switch_cache: dict[Term, Optional[tuple[int, tuple]]] = {}
        self._validate()

    # -- validation ---------------------------------------------------------

    def _validate(self) -> None:
        for d in self.switch_decls:
            if not d.outcomes:
                raise ProgramError(f"empty outcome list for switch {to_text(d.pattern)}")
            seen = set()
            for v in d.outcomes:
                if not is_ground(v):
                    raise ProgramError(
                        f"non-ground outcome {to_text(v)} for switch {to_text(d.pattern)}")
                if v in seen:
                    raise ProgramError(
                        f"duplicate outcome {to_text(v)} for switch {to_text(d.pattern)}")
                seen.add(v)
        for i, d1 in enumerate(self.switch_decls):
            for d2 in self.switch_decls[i + 1:]:
                p2 = map_vars(d2.pattern, {v: Var(v + 10_000_000)
                                           for v in term_vars(d2.pattern)})
                if unify(d1.pattern, p2) is not None:
                    raise ProgramError(
                        "ambiguous switch declarations: "
                        f"{to_text(d1.pattern)} overlaps {to_text(d2.pattern)}")
        for c in self.clauses:
            if isinstance(c.head, Var):
                raise ProgramError(f"clause head is a variable (line {c.line})")
            if c.pred() in RESERVED_PREDS:
                raise ProgramError(
                    f"clause head redefines reserved form {c.pred()[0]}/{c.pred()[1]}"
                    f" (line {c.line})")
            self._check_det_conditions(c.body, c.line)
        self._lint_singletons()

    def _check_det_conditions(self, body: tuple, line: int) -> None:
        for g in body:
            if isinstance(g, IfThenElse):
                if _contains_msw(g.cond):
                    raise ProgramError(
                        f"if-then-else condition contains msw (line {line})")
                for pred in sorted(_called_preds(g.cond)):
                    if self._pred_has_msw(pred, set()):
                        raise ProgramError(
                            "if-then-else condition calls probabilistic predicate "
                            f"{pred[0]}/{pred[1]} (line {line})")
                self._check_det_conditions(g.cond, line)
                self._check_det_conditions(g.then, line)
                self._check_det_conditions(g.orelse, line)
            elif isinstance(g, Disj):
                self._check_det_conditions(g.left, line)
                self._check_det_conditions(g.right, line)

    def _pred_has_msw(self, pred: tuple[str, int], visiting: set) -> bool:
        if pred in visiting:
            return False
        visiting.add(pred)
        for c in self.index.get(pred, []):
            if _contains_msw(c.body):
                return True
            for sub in _called_preds(c.body):
                if self._pred_has_msw(sub, visiting):
                    return True
        return False

    def _lint_singletons(self) -> None:
        for c in self.clauses:
            counts: dict[int, int] = {}
            for v in term_vars(c.head) + body_vars(c.body):
                counts[v] = counts.get(v, 0) + 1
            singles = [v for v, n in counts.items() if n == 1]
            if singles and c.body:
                log.debug("singleton variables in clause at line %d: %s", c.line, singles)

    # -- switch lookup ------------------------------------------------------

    def match_switch(self, switch: Term) -> Optional[tuple[int, tuple]]:
        """Return (declaration index, outcomes) for a ground switch term."""
        hit = self._switch_cache.get(switch)
        if hit is not None or switch in self._switch_cache:
            return hit
        found = None
        for i, d in enumerate(self.switch_decls):
            if unify(d.pattern, switch) is not None:
                found = (i, d.outcomes)
                break
        self._switch_cache[switch] = found
        return found

    def outcomes(self, switch: Term) -> tuple:
        m = self.match_switch(switch)
        if m is None:
            raise KeyError(f"no values declaration matches {to_text(switch)}")
        return m[1]

    # -- printing -----------------------------------------------------------

    def to_text(self) -> str:
        from .parser import program_to_text
        return program_to_text(self)
