"""Parameter estimation.

Probability mode: maximum likelihood by counting (complete data) and EM over
explanation graphs (incomplete data).  Weight mode: regularized conditional
log likelihood with its analytic gradient, minimized by L-BFGS with a strong
Wolfe line search.
"""

from __future__ import annotations

import logging
import math
import weakref
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .engine import (
    ExplanationGraph, GoalNode, SwitchOutcome, expand_explanations, solve_all,
)
from .inference import (
    ContainmentError, CountVector, InferenceError, ParameterTable, SwitchSpace,
    expected_counts, inside_root, log_sum_exp,
)
from .program import Program
from .terms import Term, to_text

log = logging.getLogger(__name__)

NEG_INF = float("-inf")


class LearningError(Exception):
    pass


@dataclass
class Instance:
    """One training example: the observed goal, optionally with its labels."""
    incomplete_goal: Term
    complete_goal: Optional[Term] = None


@dataclass
class TrainConfig:
    method: str = "counting"      # counting | em | lbfgs
    mu: float = 1.0               # L2 strength
    lbfgs_memory: int = 10
    grad_tol: float = 1e-5
    max_iters: int = 500
    em_tol: float = 1e-6
    smoothing: float = 0.0
    perturb_init: bool = False    # break symmetric EM starts deterministically
    max_steps: int = 10_000_000   # engine work cap per goal

    def __post_init__(self):
        if self.method not in ("counting", "em", "lbfgs"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.mu < 0:
            raise ValueError("mu must be >= 0")
        if self.grad_tol <= 0 or self.em_tol <= 0:
            raise ValueError("tolerances must be > 0")
        if self.smoothing < 0:
            raise ValueError("smoothing must be >= 0")


@dataclass
class FitReport:
    final_objective: float = 0.0
    iterations: int = 0
    objective_trace: list = field(default_factory=list)
    converged: bool = False

    def to_text(self) -> str:
        lines = [
            f"final_objective: {self.final_objective:.17g}",
            f"iterations: {self.iterations}",
            f"converged: {'yes' if self.converged else 'no'}",
            "trace:",
        ]
        lines += [f"{v:.17g}" for v in self.objective_trace]
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Shared graph plumbing
# ---------------------------------------------------------------------------

_graph_caches: "weakref.WeakKeyDictionary[Program, dict]" = weakref.WeakKeyDictionary()


def _graph_for(program: Program, goal: Term, max_steps: int) -> ExplanationGraph:
    cache = _graph_caches.setdefault(program, {})
    g = cache.get(goal)
    if g is None:
        g = solve_all(program, goal, max_steps=max_steps)
        if g is None:
            raise LearningError(f"unprovable goal {to_text(goal)}")
        cache[goal] = g
    return g


def _unique_explanation(program: Program, goal: Term, max_steps: int) -> CountVector:
    g = _graph_for(program, goal, max_steps)
    expls = expand_explanations(g, 1000)
    distinct = {tuple(sorted(((to_text(s), to_text(o)), k)
                             for (s, o), k in e.items()))
                for e in expls}
    if len(distinct) != 1:
        raise LearningError(
            f"complete goal {to_text(goal)} has {len(distinct)} distinct "
            "explanations; expected exactly one")
    out = CountVector()
    for (s, o), k in expls[0].items():
        out.add(s, o, float(k))
    return out


# ---------------------------------------------------------------------------
# Counting MLE
# ---------------------------------------------------------------------------

def count_mle(program: Program, data: list, smoothing: float = 0.0) -> ParameterTable:
    """theta_{i,v} = (count(i,v) + smoothing) / (count(i) + smoothing * |V_i|)."""
    space = SwitchSpace(program)
    table = ParameterTable(ParameterTable.PROBABILITY, space)
    counts: dict[Term, dict[Term, float]] = {}
    for inst in data:
        if inst.complete_goal is None:
            raise LearningError("counting needs complete goals")
        expl = _unique_explanation(program, inst.complete_goal, 10_000_000)
        for (sw, out), k in expl.items():
            counts.setdefault(sw, {})[out] = counts.get(sw, {}).get(out, 0.0) + k
    for sw, by_out in counts.items():
        outs = space.outcomes(sw)
        raw = [by_out.get(o, 0.0) + smoothing for o in outs]
        total = sum(raw)
        if total == 0.0:
            log.warning("switch %s observed zero times; left uniform", to_text(sw))
            continue
        table.entries[sw] = [x / total for x in raw]
    return table


# ---------------------------------------------------------------------------
# EM
# ---------------------------------------------------------------------------

def em_fit(program: Program, data: list, init: Optional[ParameterTable] = None,
           cfg: Optional[TrainConfig] = None) -> tuple[ParameterTable, FitReport]:
    """Expectation-maximization on explanation graphs of the incomplete goals."""
    cfg = cfg or TrainConfig(method="em")
    space = SwitchSpace(program)
    graphs = [_graph_for(program, inst.incomplete_goal, cfg.max_steps)
              for inst in data]

    switches: dict[Term, None] = {}
    for g in graphs:
        for n in g.nodes:
            for d in n.derivations:
                for it in d.items:
                    if isinstance(it, SwitchOutcome):
                        switches.setdefault(it.switch)

    theta = init.copy() if init is not None else ParameterTable(
        ParameterTable.PROBABILITY, space)
    if init is None:
        for j, sw in enumerate(switches):
            n = len(space.outcomes(sw))
            vec = [1.0 / n] * n
            if cfg.perturb_init:
                vec = [x + 1e-3 * (i + j) for i, x in enumerate(vec)]
                s = sum(vec)
                vec = [x / s for x in vec]
            theta.entries[sw] = vec

    report = FitReport()
    prev_ll = NEG_INF
    for it in range(cfg.max_iters):
        ll = 0.0
        acc: dict[Term, dict[Term, float]] = {}
        for g in graphs:
            lp = inside_root(g, theta)
            if lp == NEG_INF:
                raise LearningError(
                    f"instance {to_text(g.root.goal)} has zero probability; "
                    "perturb the initialization or supply one")
            ll += lp
            for (sw, out), v in expected_counts(g, theta).items():
                acc.setdefault(sw, {})[out] = acc.get(sw, {}).get(out, 0.0) + v
        report.objective_trace.append(ll)
        report.iterations = it + 1
        if ll - prev_ll < cfg.em_tol and it > 0:
            report.converged = True
            break
        prev_ll = ll
        for sw, by_out in acc.items():
            outs = space.outcomes(sw)
            raw = [by_out.get(o, 0.0) for o in outs]
            total = sum(raw)
            if total > 0.0:
                theta.entries[sw] = [x / total for x in raw]
    report.final_objective = report.objective_trace[-1]
    return theta, report


# ---------------------------------------------------------------------------
# Conditional log likelihood (weight mode)
# ---------------------------------------------------------------------------

class _CompiledDataset:
    """Flattened, index-based view of a discriminative training set.

    Parameters are numbered 0..n-1 over the switch-outcome pairs that occur in
    some graph; each instance carries its target counts and an array-coded
    copy of its incomplete graph so objective evaluations avoid term hashing.
    """

    def __init__(self, program: Program, data: list, max_steps: int):
        self.space = SwitchSpace(program)
        self.param_ids: dict[tuple[Term, Term], int] = {}
        self.instances = []
        for inst in data:
            if inst.complete_goal is None:
                raise LearningError("discriminative training needs complete goals")
            target = _unique_explanation(program, inst.complete_goal, max_steps)
            g = _graph_for(program, inst.incomplete_goal, max_steps)
            self.instances.append((self._target_vec(target), self._compile(g)))
        self.n_params = len(self.param_ids)

    def _pid(self, sw: Term, out: Term) -> int:
        key = (sw, out)
        pid = self.param_ids.get(key)
        if pid is None:
            pid = len(self.param_ids)
            self.param_ids[key] = pid
        return pid

    def _target_vec(self, target: CountVector) -> list:
        return [(self._pid(sw, out), k) for (sw, out), k in target.items()]

    def _compile(self, g: ExplanationGraph):
        index = {id(n): i for i, n in enumerate(g.nodes)}
        nodes = []
        for n in g.nodes:
            derivs = []
            for d in n.derivations:
                params = []
                children = []
                for it in d.items:
                    if isinstance(it, SwitchOutcome):
                        params.append((self._pid(it.switch, it.outcome), 1))
                    else:
                        children.append(index[id(it)])
                derivs.append((params, children))
            nodes.append(derivs)
        return nodes, index[id(g.root)]

    # -- evaluation ----------------------------------------------------------

    def neg_cll(self, lam: np.ndarray, mu: float) -> tuple[float, np.ndarray]:
        """-l(lambda|D) and its gradient, summed over instances."""
        obj = 0.0
        grad = mu * lam.copy()
        for target, (nodes, root) in self.instances:
            num = 0.0
            for pid, k in target:
                num += k * lam[pid]
            ins = self._inside(nodes, lam)
            if not math.isfinite(ins[root]):
                raise InferenceError("non-finite partition value")
            if num - ins[root] > 1e-9:
                raise ContainmentError(
                    "target explanation scores above the total weight; "
                    "the complete goal is not covered by the incomplete one")
            obj += ins[root] - num
            for pid, k in target:
                grad[pid] -= k
            self._add_expectations(nodes, root, lam, ins, grad)
        obj += 0.5 * mu * float(lam @ lam)
        return obj, grad

    @staticmethod
    def _inside(nodes, lam):
        ins = [NEG_INF] * len(nodes)
        for i, derivs in enumerate(nodes):
            vals = []
            for params, children in derivs:
                v = 0.0
                for pid, k in params:
                    v += k * lam[pid]
                for c in children:
                    v += ins[c]
                vals.append(v)
            ins[i] = log_sum_exp(vals)
        return ins

    @staticmethod
    def _add_expectations(nodes, root, lam, ins, grad):
        outside = [NEG_INF] * len(nodes)
        outside[root] = 0.0
        rootv = ins[root]
        for i in range(len(nodes) - 1, -1, -1):
            out_i = outside[i]
            if out_i == NEG_INF:
                continue
            for params, children in nodes[i]:
                dval = 0.0
                for pid, k in params:
                    dval += k * lam[pid]
                for c in children:
                    dval += ins[c]
                if dval == NEG_INF:
                    continue
                mass = math.exp(out_i + dval - rootv)
                for pid, k in params:
                    grad[pid] += k * mass
                for c in children:
                    contrib = out_i + dval - ins[c]
                    prev = outside[c]
                    outside[c] = (contrib if prev == NEG_INF
                                  else log_sum_exp((prev, contrib)))

    # -- table <-> vector ----------------------------------------------------

    def to_table(self, lam: np.ndarray) -> ParameterTable:
        table = ParameterTable(ParameterTable.WEIGHT, self.space)
        for (sw, out), pid in self.param_ids.items():
            if sw not in table.entries:
                table.entries[sw] = [0.0] * len(self.space.outcomes(sw))
            idx = list(self.space.outcomes(sw)).index(out)
            table.entries[sw][idx] = float(lam[pid])
        return table

    def from_table(self, table: ParameterTable) -> np.ndarray:
        lam = np.zeros(self.n_params)
        for (sw, out), pid in self.param_ids.items():
            lam[pid] = table.get(sw, out)
        return lam


def cll_objective(program: Program, data: list, lam_table: ParameterTable,
                  mu: float) -> tuple[float, CountVector]:
    """Negative regularized conditional log likelihood and its gradient.

    Gradient entries follow the sign of the returned (negated) objective:
    -(sigma(E_t) - E[sigma|G_t]) + mu*lambda per coordinate.
    """
    if lam_table.mode != ParameterTable.WEIGHT:
        raise ValueError("expected a weight-mode table")
    ds = _compiled_for(program, data)
    lam = ds.from_table(lam_table)
    obj, grad = ds.neg_cll(lam, mu)
    out = CountVector()
    for (sw, o), pid in ds.param_ids.items():
        out[(sw, o)] = float(grad[pid])
    return obj, out


_compiled_cache: "weakref.WeakKeyDictionary[Program, dict]" = weakref.WeakKeyDictionary()


def _compiled_for(program: Program, data: list,
                  max_steps: int = 10_000_000) -> _CompiledDataset:
    cache = _compiled_cache.setdefault(program, {})
    key = tuple((inst.incomplete_goal, inst.complete_goal) for inst in data)
    ds = cache.get(key)
    if ds is None:
        ds = _CompiledDataset(program, data, max_steps)
        if len(cache) > 8:
            cache.clear()
        cache[key] = ds
    return ds


# ---------------------------------------------------------------------------
# L-BFGS with strong Wolfe line search
# ---------------------------------------------------------------------------

class LineSearchError(LearningError):
    pass


def _wolfe_search(f: Callable, x: np.ndarray, fx: float, gx: np.ndarray,
                  direction: np.ndarray, c1: float = 1e-4, c2: float = 0.9,
                  max_evals: int = 50):
    """Bracketing line search for the strong Wolfe conditions."""
    d0 = float(gx @ direction)
    if d0 >= 0:
        raise LineSearchError("not a descent direction")

    def phi(a):
        v, g = f(x + a * direction)
        return v, g, float(g @ direction)

    a_prev, f_prev, d_prev = 0.0, fx, d0
    a = 1.0
    a_max = 1e8
    best = None
    for _ in range(max_evals):
        fa, ga, da = phi(a)
        if fa > fx + c1 * a * d0 or (best is not None and fa >= f_prev):
            return _zoom(phi, fx, d0, a_prev, f_prev, d_prev, a, fa, da, c1, c2)
        if abs(da) <= -c2 * d0:
            return a, fa, ga
        if da >= 0:
            return _zoom(phi, fx, d0, a, fa, da, a_prev, f_prev, d_prev, c1, c2)
        best = a
        a_prev, f_prev, d_prev = a, fa, da
        a = min(2 * a, a_max)
        if a >= a_max:
            break
    raise LineSearchError("line search failed to bracket a Wolfe point")


def _zoom(phi, f0, d0, lo, f_lo, d_lo, hi, f_hi, d_hi, c1, c2, max_iters=50):
    for _ in range(max_iters):
        # secant on the directional derivative, safeguarded so the trial
        # point stays an interval fraction away from both ends (else the
        # bracket may shrink too slowly)
        width = abs(hi - lo)
        inner_lo = min(lo, hi) + 0.1 * width
        inner_hi = max(lo, hi) - 0.1 * width
        if d_lo != d_hi:
            a = lo - d_lo * (hi - lo) / (d_hi - d_lo)
            if not (inner_lo <= a <= inner_hi):
                a = 0.5 * (lo + hi)
        else:
            a = 0.5 * (lo + hi)
        fa, ga, da = phi(a)
        if fa > f0 + c1 * a * d0 or fa >= f_lo:
            hi, f_hi, d_hi = a, fa, da
        else:
            if abs(da) <= -c2 * d0:
                return a, fa, ga
            if da * (hi - lo) >= 0:
                hi, f_hi, d_hi = lo, f_lo, d_lo
            lo, f_lo, d_lo = a, fa, da
        if abs(hi - lo) < 1e-16 * max(1.0, abs(lo)):
            return a, fa, ga
    raise LineSearchError("zoom failed to satisfy the Wolfe conditions")


def lbfgs_minimize(objective: Callable, x0, memory: int = 10,
                   grad_tol: float = 1e-5,
                   max_iters: int = 500) -> tuple[np.ndarray, FitReport]:
    """Two-loop-recursion L-BFGS.

    On a line-search failure the history is dropped and one steepest-descent
    restart is attempted; a second failure aborts.
    """
    if memory < 1:
        raise ValueError("memory must be >= 1")
    x = np.asarray(x0, dtype=float).copy()
    report = FitReport()
    if x.size == 0:
        report.converged = True
        v, _ = objective(x)
        report.final_objective = v
        report.objective_trace.append(v)
        return x, report

    fx, gx = objective(x)
    if not math.isfinite(fx):
        raise LearningError("non-finite objective at the start point")
    report.objective_trace.append(fx)
    s_hist: list[np.ndarray] = []
    y_hist: list[np.ndarray] = []
    restarted = False

    for it in range(max_iters):
        if float(np.max(np.abs(gx))) < grad_tol:
            report.converged = True
            break
        # two-loop recursion
        q = gx.copy()
        alphas = []
        for s, y in zip(reversed(s_hist), reversed(y_hist)):
            rho = 1.0 / float(y @ s)
            a = rho * float(s @ q)
            alphas.append((a, rho))
            q -= a * y
        if s_hist:
            s, y = s_hist[-1], y_hist[-1]
            q *= float(s @ y) / float(y @ y)
        for (a, rho), s, y in zip(reversed(alphas), s_hist, y_hist):
            b = rho * float(y @ q)
            q += (a - b) * s
        direction = -q

        try:
            step, f_new, g_new = _wolfe_search(objective, x, fx, gx, direction)
        except LineSearchError:
            if restarted:
                report.iterations = it + 1
                break
            restarted = True
            s_hist.clear()
            y_hist.clear()
            direction = -gx
            try:
                step, f_new, g_new = _wolfe_search(objective, x, fx, gx, direction)
            except LineSearchError:
                report.iterations = it + 1
                break

        x_new = x + step * direction
        s_vec = x_new - x
        y_vec = g_new - gx
        if float(s_vec @ y_vec) > 1e-12 * float(np.linalg.norm(s_vec)) * \
                max(1e-300, float(np.linalg.norm(y_vec))):
            s_hist.append(s_vec)
            y_hist.append(y_vec)
            if len(s_hist) > memory:
                s_hist.pop(0)
                y_hist.pop(0)
        x, fx, gx = x_new, f_new, g_new
        report.objective_trace.append(fx)
        report.iterations = it + 1
    else:
        report.iterations = max_iters
    if not report.converged and float(np.max(np.abs(gx))) < grad_tol:
        report.converged = True
    report.final_objective = fx
    return x, report


def train_crf(program: Program, data: list,
              cfg: Optional[TrainConfig] = None) -> tuple[ParameterTable, FitReport]:
    """Fit weight-mode parameters by minimizing the regularized negative CLL."""
    cfg = cfg or TrainConfig(method="lbfgs")
    if cfg.method != "lbfgs":
        raise ValueError("train_crf requires method=lbfgs")
    ds = _compiled_for(program, data, cfg.max_steps)
    x0 = np.zeros(ds.n_params)
    lam, report = lbfgs_minimize(
        lambda lam_vec: ds.neg_cll(lam_vec, cfg.mu), x0,
        memory=cfg.lbfgs_memory, grad_tol=cfg.grad_tol, max_iters=cfg.max_iters)
    return ds.to_table(lam), report
