"""Tabled exhaustive search producing shared AND-OR explanation graphs.

Every user predicate call is tabled on its call pattern (variant key).  A
table entry is built by exhaustively solving the pattern; its answers become
goal nodes whose derivations record, in body order, the probabilistic choices
made and the child goal nodes consumed.  A call pattern that is re-entered
while still being built means the explanation structure is cyclic, which the
downstream dynamic programming cannot handle, so it is a hard error.
"""

from __future__ import annotations

import sys
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .program import (
    Call, Disj, FailGoal, IfThenElse, Msw, Program, StrictEq, TrueGoal, Unify2,
)
from .terms import (
    Atom, Bindings, Struct, Term, Var, canonical, is_ground, offset_vars,
    to_text,
)

sys.setrecursionlimit(200_000)


class EngineError(Exception):
    pass


class StepLimitExceeded(EngineError):
    """The work meter passed its cap; the query is likely non-terminating."""


class CyclicDependency(EngineError):
    """A tabled goal depends on itself; no acyclic explanation graph exists."""


class UnknownPredicate(EngineError):
    pass


class InstantiationError(EngineError):
    pass


class ExplosionError(EngineError):
    """Explanation enumeration exceeded the configured limit."""


@dataclass(frozen=True, slots=True)
class SwitchOutcome:
    switch: Term     # ground
    outcome: Term    # ground
    index: int       # position in the declared outcome list


class Derivation:
    """One successful clause-body resolution: ordered choices and subgoals."""

    __slots__ = ("items", "_key")

    def __init__(self, items: tuple):
        self.items = items  # of SwitchOutcome | GoalNode, in body order
        self._key = tuple(
            ("m", it.switch, it.outcome) if isinstance(it, SwitchOutcome)
            else ("g", id(it))
            for it in items
        )

    @property
    def switches(self) -> list[SwitchOutcome]:
        return [x for x in self.items if isinstance(x, SwitchOutcome)]

    @property
    def subgoals(self) -> list["GoalNode"]:
        return [x for x in self.items if isinstance(x, GoalNode)]

    def __repr__(self):
        return "Derivation(" + ", ".join(map(repr, self.items)) + ")"


class GoalNode:
    __slots__ = ("goal", "derivations", "index")

    def __init__(self, goal: Term):
        self.goal = goal
        self.derivations: list[Derivation] = []
        self.index = -1

    def __repr__(self):
        return f"GoalNode({to_text(self.goal)}, {len(self.derivations)} derivs)"


@dataclass
class ExplanationGraph:
    """Acyclic AND-OR graph; `nodes` is topologically ordered, children first.

    When the query had unbound output variables, the root is a synthetic node
    whose derivations each wrap one instantiated answer.
    """

    root: GoalNode
    nodes: list[GoalNode]
    synthetic_root: bool = False

    def node_count(self) -> int:
        return len(self.nodes)

    def derivation_size(self) -> int:
        return sum(len(d.items) for n in self.nodes for d in n.derivations)

    def dump(self) -> str:
        lines = []
        for n in self.nodes:
            derivs = []
            for d in n.derivations:
                parts = []
                for it in d.items:
                    if isinstance(it, SwitchOutcome):
                        parts.append(f"msw({to_text(it.switch)},{to_text(it.outcome)})")
                    else:
                        parts.append(f"goal({it.index})")
                derivs.append(",".join(parts) if parts else "true")
            lines.append(f"node {n.index} {to_text(n.goal)} := " + "; ".join(derivs))
        return "\n".join(lines) + "\n"


class _TableEntry:
    __slots__ = ("answers", "complete")

    def __init__(self):
        self.answers: list[tuple[Term, GoalNode]] = []
        self.complete = False


class Solver:
    def __init__(self, program: Program, max_steps: int = 1_000_000,
                 occurs_check: bool = True):
        self.program = program
        self.max_steps = max_steps
        self.occurs_check = occurs_check
        self.b = Bindings()
        self.table: dict[object, _TableEntry] = {}
        self.in_progress: set[object] = set()
        self.var_counter = 10_000_000  # above any clause-local id
        self._all_nodes: list[GoalNode] = []

    # -- bookkeeping --------------------------------------------------------

    @property
    def steps(self) -> int:
        return self.b.ops

    def _tick(self, n: int = 0) -> None:
        if self.b.ops > self.max_steps:
            raise StepLimitExceeded(
                f"exceeded {self.max_steps} resolution steps; "
                "the query may not terminate")

    def _fresh(self, term: Term, nvars: int) -> Term:
        base = self.var_counter
        self.var_counter += nvars
        return offset_vars(term, base)

    # -- goal solving -------------------------------------------------------

    def _solve_body(self, goals: tuple, i: int, items: list) -> Iterator[None]:
        if i == len(goals):
            yield
            return
        for _ in self._solve_goal(goals[i], items):
            yield from self._solve_body(goals, i + 1, items)

    def _solve_goal(self, g, items: list) -> Iterator[None]:
        b = self.b
        if isinstance(g, Call):
            yield from self._solve_call(g.term, items)
        elif isinstance(g, Msw):
            yield from self._solve_msw(g, items)
        elif isinstance(g, Unify2):
            mark = b.mark()
            self._tick()
            if b.unify(g.left, g.right, occurs_check=self.occurs_check):
                yield
            b.undo_to(mark)
        elif isinstance(g, StrictEq):
            self._tick()
            if b.resolve(g.left) == b.resolve(g.right):
                yield
        elif isinstance(g, IfThenElse):
            mark = b.mark()
            n = len(items)
            scratch: list = []
            found = False
            for _ in self._solve_body(g.cond, 0, scratch):
                found = True
                yield from self._solve_body(g.then, 0, items)
                break
            del items[n:]
            b.undo_to(mark)
            if not found:
                yield from self._solve_body(g.orelse, 0, items)
        elif isinstance(g, Disj):
            mark = b.mark()
            n = len(items)
            yield from self._solve_body(g.left, 0, items)
            del items[n:]
            b.undo_to(mark)
            yield from self._solve_body(g.right, 0, items)
            del items[n:]
            b.undo_to(mark)
        elif isinstance(g, TrueGoal):
            yield
        elif isinstance(g, FailGoal):
            return
        else:  # pragma: no cover
            raise EngineError(f"unhandled goal {g!r}")

    def _solve_msw(self, g: Msw, items: list) -> Iterator[None]:
        b = self.b
        switch = b.resolve(g.switch)
        self._tick()
        if not is_ground(switch):
            raise InstantiationError(
                f"msw switch name not ground: {to_text(switch)}")
        decl = self.program.match_switch(switch)
        if decl is None:
            # no declaration: the choice point simply fails (guarded branches
            # in bottom-up parsers rely on this)
            return
        _, outcomes = decl
        for idx, out in enumerate(outcomes):
            mark = b.mark()
            self._tick()
            if b.unify(g.outcome, out, occurs_check=self.occurs_check):
                items.append(SwitchOutcome(switch, out, idx))
                yield
                items.pop()
            b.undo_to(mark)

    def _solve_call(self, term: Term, items: list) -> Iterator[None]:
        b = self.b
        pattern = b.resolve(term)
        self._tick()
        entry = self._get_table(pattern)
        for answer, node in entry.answers:
            mark = b.mark()
            self._tick()
            if b.unify(term, answer, occurs_check=self.occurs_check):
                items.append(node)
                yield
                items.pop()
            b.undo_to(mark)

    # -- tabling ------------------------------------------------------------

    def _get_table(self, pattern: Term) -> _TableEntry:
        key = canonical(pattern)
        entry = self.table.get(key)
        if entry is not None:
            if not entry.complete:
                raise CyclicDependency(
                    f"goal depends on itself: {to_text(pattern)}")
            return entry
        entry = _TableEntry()
        self.table[key] = entry

        if isinstance(pattern, Atom):
            pred = (pattern.name, 0)
        elif isinstance(pattern, Struct):
            pred = (pattern.functor, len(pattern.args))
        else:
            raise EngineError(f"cannot call {to_text(pattern)}")
        clauses = self.program.index.get(pred)
        if clauses is None:
            raise UnknownPredicate(f"unknown predicate {pred[0]}/{pred[1]}")

        # Solve a fresh variant so the entry is independent of the call site.
        goal = self._fresh(pattern, 0) if is_ground(pattern) else self._rename_fresh(pattern)
        by_answer: dict[object, GoalNode] = {}
        seen_derivs: dict[object, set] = {}
        for clause in clauses:
            head = self._fresh(clause.head, clause.nvars)
            body = clause.body
            base = self.var_counter - clause.nvars
            mark = self.b.mark()
            self._tick()
            if self.b.unify(head, goal, occurs_check=self.occurs_check):
                body_fresh = tuple(
                    _offset_goal(g2, base) for g2 in body
                )
                items2: list = []
                for _ in self._solve_body(body_fresh, 0, items2):
                    answer = self.b.resolve(goal)
                    akey = canonical(answer)
                    node = by_answer.get(akey)
                    if node is None:
                        node = GoalNode(answer)
                        by_answer[akey] = node
                        seen_derivs[akey] = set()
                    d = Derivation(tuple(items2))
                    if d._key not in seen_derivs[akey]:
                        seen_derivs[akey].add(d._key)
                        node.derivations.append(d)
            self.b.undo_to(mark)
        for akey, node in by_answer.items():
            self._all_nodes.append(node)
            entry.answers.append((node.goal, node))
        entry.complete = True
        return entry

    def _rename_fresh(self, pattern: Term) -> Term:
        from .terms import map_vars, term_vars
        vs = term_vars(pattern)
        base = self.var_counter
        self.var_counter += len(vs)
        return map_vars(pattern, {v: Var(base + i) for i, v in enumerate(vs)})

    # -- entry point --------------------------------------------------------

    def solve_all(self, query: Term) -> Optional[ExplanationGraph]:
        pattern = self.b.resolve(query)
        entry = self._get_table(pattern)
        if not entry.answers:
            return None
        if len(entry.answers) == 1 and canonical(entry.answers[0][0]) == canonical(pattern) \
                and is_ground(pattern):
            root = entry.answers[0][1]
            synthetic = False
        else:
            root = GoalNode(pattern)
            for _, node in entry.answers:
                root.derivations.append(Derivation((node,)))
            self._all_nodes.append(root)
            synthetic = True
        nodes = _reachable_in_order(self._all_nodes, root)
        for i, n in enumerate(nodes):
            n.index = i
        return ExplanationGraph(root, nodes, synthetic_root=synthetic)


def _offset_goal(g, base: int):
    from .program import map_goal_vars
    # offset by remapping: ids < 10M are clause-local
    from .terms import Var as V

    class _OffsetDict(dict):
        def get(self, k, default=None):
            return V(k + base)

    return map_goal_vars(g, _OffsetDict())


def _reachable_in_order(all_nodes: list[GoalNode], root: GoalNode) -> list[GoalNode]:
    keep = set()
    stack = [root]
    while stack:
        n = stack.pop()
        if id(n) in keep:
            continue
        keep.add(id(n))
        for d in n.derivations:
            for it in d.items:
                if isinstance(it, GoalNode):
                    stack.append(it)
    return [n for n in all_nodes if id(n) in keep]


def solve_all(program: Program, query: Term, max_steps: int = 1_000_000,
              occurs_check: bool = True) -> Optional[ExplanationGraph]:
    """All explanations for `query` as a shared graph; None when unprovable."""
    return Solver(program, max_steps=max_steps,
                  occurs_check=occurs_check).solve_all(query)


# ---------------------------------------------------------------------------
# Brute-force expansion (test oracle and equivalence probes)
# ---------------------------------------------------------------------------

def count_explanations(graph: ExplanationGraph, cap: int) -> int:
    """Number of explanations in the expansion, saturating at cap + 1."""
    counts: dict[int, int] = {}
    for n in graph.nodes:
        total = 0
        for d in n.derivations:
            prod = 1
            for it in d.items:
                if isinstance(it, GoalNode):
                    prod *= counts[id(it)]
                    if prod > cap:
                        break
            total += prod
            if total > cap:
                total = cap + 1
                break
        counts[id(n)] = total
    return counts[id(graph.root)]


def expand_explanations(graph: ExplanationGraph, limit: int) -> list[Counter]:
    """Explicit explanation list, each a Counter over (switch, outcome).

    Duplicate explanations arising from distinct proofs are kept as separate
    list entries.
    """
    if limit < 1:
        raise ValueError("limit must be >= 1")
    if count_explanations(graph, limit) > limit:
        raise ExplosionError(f"more than {limit} explanations")
    memo: dict[int, list[Counter]] = {}
    for n in graph.nodes:
        out: list[Counter] = []
        for d in n.derivations:
            partial = [Counter()]
            for it in d.items:
                if isinstance(it, SwitchOutcome):
                    for c in partial:
                        c[(it.switch, it.outcome)] += 1
                else:
                    child = memo[id(it)]
                    partial = [c + ce for c in partial for ce in child]
            out.extend(partial)
        memo[id(n)] = out
    return memo[id(graph.root)]


def enumerate_explanations(graph: ExplanationGraph, limit: int) -> list[dict]:
    """Explanations as plain {(switch, outcome): count} dicts."""
    return [dict(c) for c in expand_explanations(graph, limit)]


def explanation_key(counter: Counter) -> tuple:
    """Canonical hashable form of one explanation (a multiset of choices)."""
    return tuple(sorted(
        ((to_text(sw), to_text(out), k) for (sw, out), k in counter.items())
    ))
