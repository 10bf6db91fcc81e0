"""Semiring dynamic programming over explanation graphs.

All arithmetic is carried out in log space.  In weight mode a switch outcome
contributes its raw weight exponent; in probability mode it contributes the
log of its probability.  The same inside / Viterbi / inside-outside passes
therefore serve both the generative and the discriminative reading of a
program.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

from .engine import Derivation, ExplanationGraph, GoalNode, SwitchOutcome
from .parser import parse_term
from .program import Program
from .terms import Term, to_text

NEG_INF = float("-inf")


class InferenceError(Exception):
    pass


class ContainmentError(InferenceError):
    """Complete-goal explanation not contained in the incomplete goal's set."""


def log_sum_exp(values: Iterable[float]) -> float:
    vs = [v for v in values]
    m = max(vs, default=NEG_INF)
    if m == NEG_INF:
        return NEG_INF
    return m + math.log(sum(math.exp(v - m) for v in vs))


# ---------------------------------------------------------------------------
# Parameters
# ---------------------------------------------------------------------------

class SwitchSpace:
    """Outcome lookup for ground switch terms, backed by a program's
    values declarations."""

    def __init__(self, program: Program):
        self._program = program

    def outcomes(self, switch: Term) -> tuple:
        return self._program.outcomes(switch)

    def has(self, switch: Term) -> bool:
        return self._program.match_switch(switch) is not None


class ParameterTable:
    """Per-ground-switch parameter vectors aligned with declared outcomes.

    mode "probability": vectors are distributions (default uniform).
    mode "weight":      vectors are free exponents (default all zero).
    """

    PROBABILITY = "probability"
    WEIGHT = "weight"

    def __init__(self, mode: str, switch_space: SwitchSpace):
        if mode not in (self.PROBABILITY, self.WEIGHT):
            raise ValueError(f"bad mode {mode!r}")
        self.mode = mode
        self.space = switch_space
        self.entries: dict[Term, list[float]] = {}

    # -- access -------------------------------------------------------------

    def vector(self, switch: Term) -> list[float]:
        v = self.entries.get(switch)
        if v is None:
            n = len(self.space.outcomes(switch))
            v = [1.0 / n] * n if self.mode == self.PROBABILITY else [0.0] * n
        return v

    def set(self, switch: Term, values: Iterable[float]) -> None:
        values = list(values)
        outs = self.space.outcomes(switch)
        if len(values) != len(outs):
            raise ValueError(
                f"{len(values)} values for switch {to_text(switch)} "
                f"with {len(outs)} outcomes")
        if self.mode == self.PROBABILITY:
            if any(x < 0 for x in values):
                raise ValueError("negative probability")
            s = sum(values)
            if abs(s - 1.0) > 1e-12:
                raise ValueError(f"probabilities for {to_text(switch)} sum to {s}")
        else:
            if any(not math.isfinite(x) for x in values):
                raise ValueError("non-finite weight")
        self.entries[switch] = values

    def get(self, switch: Term, outcome: Term) -> float:
        outs = self.space.outcomes(switch)
        return self.vector(switch)[list(outs).index(outcome)]

    def log_weight(self, sw: SwitchOutcome) -> float:
        vec = self.entries.get(sw.switch)
        if vec is None:
            if self.mode == self.WEIGHT:
                return 0.0
            return -math.log(len(self.space.outcomes(sw.switch)))
        x = vec[sw.index]
        if self.mode == self.WEIGHT:
            return x
        return math.log(x) if x > 0.0 else NEG_INF

    # -- conversions --------------------------------------------------------

    def to_weight_mode(self) -> "ParameterTable":
        """log-transform a probability table into an equivalent weight table."""
        if self.mode != self.PROBABILITY:
            raise ValueError("expected a probability table")
        out = ParameterTable(self.WEIGHT, self.space)
        for sw, vec in self.entries.items():
            out.entries[sw] = [math.log(x) if x > 0 else -1e300 for x in vec]
        return out

    def copy(self) -> "ParameterTable":
        out = ParameterTable(self.mode, self.space)
        out.entries = {k: list(v) for k, v in self.entries.items()}
        return out

    # -- file format --------------------------------------------------------

    def save(self, path: str) -> None:
        with open(path, "w") as f:
            f.write(f"mode: {self.mode}\n")
            for sw in sorted(self.entries, key=to_text):
                outs = self.space.outcomes(sw)
                for out_t, val in zip(outs, self.entries[sw]):
                    f.write(f"{to_text(sw)}\t{to_text(out_t)}\t{val:.17g}\n")

    @classmethod
    def load(cls, path: str, switch_space: SwitchSpace) -> "ParameterTable":
        with open(path) as f:
            header = f.readline().strip()
            if not header.startswith("mode:"):
                raise ValueError(f"{path}: missing mode header")
            mode = header.split(":", 1)[1].strip()
            table = cls(mode, switch_space)
            rows: dict[Term, dict[Term, float]] = {}
            for line in f:
                line = line.rstrip("\n")
                if not line:
                    continue
                sw_s, out_s, val_s = line.split("\t")
                rows.setdefault(parse_term(sw_s), {})[parse_term(out_s)] = float(val_s)
            for sw, by_out in rows.items():
                outs = switch_space.outcomes(sw)
                vec = table.vector(sw)
                vec = list(vec)
                for out_t, val in by_out.items():
                    vec[list(outs).index(out_t)] = val
                table.entries[sw] = vec
        return table


# ---------------------------------------------------------------------------
# Sparse count vectors
# ---------------------------------------------------------------------------

class CountVector(dict):
    """Sparse map (switch term, outcome term) -> real."""

    def add(self, switch: Term, outcome: Term, amount: float = 1.0) -> None:
        key = (switch, outcome)
        self[key] = self.get(key, 0.0) + amount

    def scaled(self, factor: float) -> "CountVector":
        out = CountVector()
        for k, v in self.items():
            out[k] = v * factor
        return out

    def __str__(self):
        parts = [f"({to_text(s)},{to_text(o)})={v:g}"
                 for (s, o), v in sorted(self.items(), key=lambda kv: str(kv[0]))]
        return "{" + ", ".join(parts) + "}"


# ---------------------------------------------------------------------------
# Dynamic programming passes
# ---------------------------------------------------------------------------

def _check_params(graph: ExplanationGraph, params: ParameterTable) -> None:
    for n in graph.nodes:
        for d in n.derivations:
            for it in d.items:
                if isinstance(it, SwitchOutcome):
                    w = params.log_weight(it)
                    if math.isnan(w) or w == float("inf"):
                        raise InferenceError(
                            f"non-finite parameter for msw({to_text(it.switch)},"
                            f"{to_text(it.outcome)})")


def _derivation_value(d: Derivation, params: ParameterTable,
                      inside_vals: dict[int, float]) -> float:
    total = 0.0
    for it in d.items:
        if isinstance(it, SwitchOutcome):
            total += params.log_weight(it)
        else:
            total += inside_vals[id(it)]
        if total == NEG_INF:
            return NEG_INF
    return total


def inside(graph: ExplanationGraph, params: ParameterTable) -> dict[int, float]:
    """Log inside value per node id; the root entry is log Z in weight mode
    and the log probability of the goal in probability mode."""
    _check_params(graph, params)
    vals: dict[int, float] = {}
    for n in graph.nodes:
        vals[id(n)] = log_sum_exp(
            _derivation_value(d, params, vals) for d in n.derivations)
    return vals


def inside_root(graph: ExplanationGraph, params: ParameterTable) -> float:
    return inside(graph, params)[id(graph.root)]


def conditional_log_prob(complete: ExplanationGraph, incomplete: ExplanationGraph,
                         params: ParameterTable, slack: float = 1e-9) -> float:
    """log p(y|x) = inside(complete) - inside(incomplete)."""
    num = inside_root(complete, params)
    den = inside_root(incomplete, params)
    v = num - den
    if v > slack:
        raise ContainmentError(
            f"complete goal scores above the incomplete total ({v:g} > 0); "
            "the goal pair is inconsistent")
    return min(v, 0.0)


@dataclass
class ViterbiResult:
    explanation: CountVector
    decode: Term
    score: float
    choices: list[SwitchOutcome]  # pre-order along the winning proof


def viterbi(graph: ExplanationGraph, params: ParameterTable) -> ViterbiResult:
    """Max-product pass with backpointers; ties prefer the derivation listed
    first (clause order, then outcome declaration order)."""
    _check_params(graph, params)
    best: dict[int, tuple[float, Derivation]] = {}
    for n in graph.nodes:
        b_val, b_d = NEG_INF, None
        for d in n.derivations:
            total = 0.0
            for it in d.items:
                if isinstance(it, SwitchOutcome):
                    total += params.log_weight(it)
                else:
                    total += best[id(it)][0]
            if b_d is None or total > b_val:
                b_val, b_d = total, d
        best[id(n)] = (b_val, b_d)

    explanation = CountVector()
    choices: list[SwitchOutcome] = []
    decode = graph.root.goal

    def walk(node: GoalNode):
        d = best[id(node)][1]
        for it in d.items:
            if isinstance(it, SwitchOutcome):
                explanation.add(it.switch, it.outcome, 1.0)
                choices.append(it)
            else:
                walk(it)

    if graph.synthetic_root:
        d = best[id(graph.root)][1]
        answer_node = d.items[0]
        decode = answer_node.goal
        walk(answer_node)
    else:
        walk(graph.root)
    return ViterbiResult(explanation, decode, best[id(graph.root)][0], choices)


def expected_counts(graph: ExplanationGraph, params: ParameterTable) -> CountVector:
    """E[count of each switch outcome | goal] by inside-outside.

    The outside pass runs in reverse topological order and accumulates over
    all parents, so shared subgoals are handled with graph (not tree)
    semantics.
    """
    ins = inside(graph, params)
    root_val = ins[id(graph.root)]
    if root_val == NEG_INF:
        raise InferenceError("goal has zero total weight; counts undefined")

    outside: dict[int, float] = {id(n): NEG_INF for n in graph.nodes}
    outside[id(graph.root)] = 0.0
    counts = CountVector()
    for n in reversed(graph.nodes):
        out_n = outside[id(n)]
        if out_n == NEG_INF:
            continue
        for d in n.derivations:
            dval = _derivation_value(d, params, ins)
            if dval == NEG_INF:
                continue
            base = out_n + dval - root_val  # log posterior mass of derivation
            mass = math.exp(base)
            for it in d.items:
                if isinstance(it, SwitchOutcome):
                    counts.add(it.switch, it.outcome, mass)
                else:
                    # contribution to the child's outside value
                    contrib = out_n + dval - ins[id(it)]
                    prev = outside[id(it)]
                    outside[id(it)] = (
                        contrib if prev == NEG_INF
                        else log_sum_exp((prev, contrib)))
    return counts


def graph_cost(graph: ExplanationGraph) -> int:
    """Operation count of one DP sweep: total derivation size."""
    return graph.derivation_size()
