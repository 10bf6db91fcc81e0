"""End-to-end acceptance gate.

Each test checks one shipping criterion at its stated tolerance and prints a
single summary line. The suite exercises the public surface only: generated
model programs, the tabled solver, the dynamic-programming passes, the three
estimators, the unfold/fold machinery, and the bundled UCI-style datasets.
"""

import itertools
import math
import random
import time
from pathlib import Path

import numpy as np

from genlog.engine import Solver, StepLimitExceeded, expand_explanations, solve_all
from genlog.experiments import (
    LabeledExample, cross_validate, evaluate, fit, make_example,
)
from genlog.inference import (
    ParameterTable, SwitchSpace, conditional_log_prob, expected_counts,
    inside_root, viterbi,
)
from genlog.learning import Instance, TrainConfig, cll_objective, em_fit, \
    lbfgs_minimize
from genlog.parser import clause_to_text, parse_program, parse_term
from genlog.terms import Struct, Var, make_list, to_text, Atom
from genlog.transform import apply_script, check_explanation_equivalence, \
    parse_script
from genlog.zoo import (
    Grammar, TabularSchema, encode_sequence, encode_tabular, encode_tree,
    generate_cfg_programs, generate_hmm_program, generate_tabular_program,
    read_csv_rows, read_schema, tree_leaves,
)


DATA = Path(__file__).resolve().parents[1] / "data" / "uci"


def _report(n, name, ok, detail=""):
    tag = "PASS" if ok else "FAIL"
    line = f"ACCEPTANCE {n} {name}: {tag}"
    if detail:
        line += f"  [{detail}]"
    print(line, flush=True)
    assert ok, line


# ---------------------------------------------------------------------------
# Shared model instances
# ---------------------------------------------------------------------------

WEATHER = TabularSchema(
    "season", ["spring", "summer", "fall", "winter"],
    [("temp", ["high", "mild", "low"]), ("humidity", ["high", "low"])])

SMALL_BNC = TabularSchema(
    "cls", ["p", "q", "r"],
    [("a", ["0", "1"]), ("b", ["x", "y", "z"]), ("c", ["0", "1"])],
    parent_map={"a": ["cls"], "b": ["a", "cls"], "c": ["b", "cls"]})

GRAMMAR_2RULE = Grammar("s", [("s", ("a",)), ("s", ("s", "a"))], {"a"})

GRAMMAR_NPVP = Grammar(
    "s",
    [("s", ("np", "vp")), ("np", ("d", "n")), ("np", ("n",)),
     ("vp", ("v",)), ("vp", ("v", "np"))],
    {"d", "n", "v"})


def _graph(program, goal_text_or_term):
    t = goal_text_or_term
    if isinstance(t, str):
        t = parse_term(t)
    g = solve_all(program, t)
    assert g is not None
    return g


def _graph_switches(graph):
    """Ground switch instances appearing anywhere in the graph."""
    out = []
    seen = set()
    for expl in expand_explanations(graph, 100_000):
        for sw, _ in expl:
            if sw not in seen:
                seen.add(sw)
                out.append(sw)
    return out


def _fill(table, rng, switches):
    for sw in switches:
        n = len(table.space.outcomes(sw))
        if table.mode == ParameterTable.PROBABILITY:
            raw = [rng.random() + 0.05 for _ in range(n)]
            s = sum(raw)
            table.set(sw, [x / s for x in raw])
        else:
            table.set(sw, [rng.uniform(-2, 2) for _ in range(n)])


def _expl_log_value(expl, table):
    total = 0.0
    for (sw, out), k in expl.items():
        idx = list(table.space.outcomes(sw)).index(out)
        x = table.vector(sw)[idx]
        total += k * (math.log(x)
                      if table.mode == ParameterTable.PROBABILITY else x)
    return total


def _oracle_total(expls, table):
    return sum(math.exp(_expl_log_value(e, table)) for e in expls)


def _oracle_expected(expls, table):
    num, den = {}, 0.0
    for e in expls:
        v = math.exp(_expl_log_value(e, table))
        den += v
        for key, k in e.items():
            num[key] = num.get(key, 0.0) + v * k
    return {key: val / den for key, val in num.items()}


def _zoo_instances():
    """(label, program, ground goal) across every generated model family."""
    out = []
    p = parse_program(generate_tabular_program(WEATHER, "naive_bayes"))
    out.append(("naive_bayes", p, parse_term("nb([high,low])")))
    p = parse_program(generate_tabular_program(SMALL_BNC, "bnc"))
    out.append(("bnc", p, encode_tabular(SMALL_BNC, ["0", "y", "1"], False,
                                         "bnc")))
    p = parse_program(generate_hmm_program(["s0", "s1"], ["a", "b"]))
    out.append(("hmm", p, parse_term("hmm0([a,b,a,b])")))
    td, lc = generate_cfg_programs(GRAMMAR_NPVP)
    out.append(("cfg_topdown", parse_program(td), parse_term("parse([d,n,v,n])")))
    out.append(("cfg_leftcorner", parse_program(lc), parse_term("plcg([d,n,v,n])")))
    return out


# ---------------------------------------------------------------------------
# 1. Dynamic programming vs brute-force enumeration
# ---------------------------------------------------------------------------

def test_01_oracle_equivalence():
    t0 = time.monotonic()
    ok = True
    for label, p, goal in _zoo_instances():
        g = _graph(p, goal)
        expls = expand_explanations(g, 10_000)
        switches = _graph_switches(g)
        space = SwitchSpace(p)
        for seed in range(50):
            mode = (ParameterTable.PROBABILITY if seed % 2 == 0
                    else ParameterTable.WEIGHT)
            table = ParameterTable(mode, space)
            _fill(table, random.Random(seed), switches)

            want_total = _oracle_total(expls, table)
            got_total = math.exp(inside_root(g, table))
            ok &= abs(got_total - want_total) <= 1e-9 * max(1.0, want_total)

            want_best = max(_expl_log_value(e, table) for e in expls)
            res = viterbi(g, table)
            ok &= abs(res.score - want_best) <= 1e-9 * max(1.0, abs(want_best))
            ok &= abs(_expl_log_value(dict(res.explanation), table)
                      - res.score) <= 1e-9

            want_ec = _oracle_expected(expls, table)
            got_ec = expected_counts(g, table)
            for key in set(want_ec) | set(got_ec):
                w = want_ec.get(key, 0.0)
                ok &= abs(got_ec.get(key, 0.0) - w) <= 1e-9 * max(1.0, abs(w))
            if not ok:
                break
        if not ok:
            break
    spent = time.monotonic() - t0
    ok &= spent < 120.0
    _report(1, "oracle equivalence", ok, f"{spent:.1f}s")


# ---------------------------------------------------------------------------
# 2. Analytic conditional-likelihood gradient vs finite differences
# ---------------------------------------------------------------------------

def _gradient_fixtures():
    nb = parse_program(generate_tabular_program(WEATHER, "naive_bayes"))
    nb_data = [Instance(parse_term("nb([high,low])"),
                        parse_term("nb([high,low],summer)")),
               Instance(parse_term("nb([mild,high])"),
                        parse_term("nb([mild,high],winter)"))]

    hmm = parse_program(generate_hmm_program(["s0", "s1"], ["a", "b"]))
    rng = random.Random(13)
    hmm_data = []
    for n in range(1, 7):
        xs = [rng.choice("ab") for _ in range(n)]
        ys = [rng.choice(["s0", "s1"]) for _ in range(n)]
        hmm_data.append(Instance(encode_sequence(xs),
                                 encode_sequence(xs, ys)))

    td, _ = generate_cfg_programs(GRAMMAR_2RULE)
    cfg = parse_program(td)
    comp, _, sent = encode_tree(GRAMMAR_2RULE, "(s (s (s a) a) a)")
    cfg_data = [Instance(sent, comp)]
    return [("nb", nb, nb_data), ("hmm", hmm, hmm_data), ("cfg", cfg, cfg_data)]


def test_02_gradient_check():
    t0 = time.monotonic()
    ok = True
    h, mu = 1e-5, 0.7
    for label, p, data in _gradient_fixtures():
        space = SwitchSpace(p)
        switches = []
        for inst in data:
            g = _graph(p, inst.incomplete_goal)
            for sw in _graph_switches(g):
                if sw not in switches:
                    switches.append(sw)
        for seed in (None, 0, 1, 2):
            lam = ParameterTable(ParameterTable.WEIGHT, space)
            if seed is not None:
                _fill(lam, random.Random(seed), switches)
            _, grad = cll_objective(p, data, lam, mu)
            for (sw, out), g_val in grad.items():
                idx = list(space.outcomes(sw)).index(out)
                up = lam.copy()
                up.entries[sw] = list(up.vector(sw))
                up.entries[sw][idx] += h
                dn = lam.copy()
                dn.entries[sw] = list(dn.vector(sw))
                dn.entries[sw][idx] -= h
                fd = (cll_objective(p, data, up, mu)[0]
                      - cll_objective(p, data, dn, mu)[0]) / (2 * h)
                ok &= abs(fd - g_val) <= 1e-4 * max(1.0, abs(g_val))
    spent = time.monotonic() - t0
    ok &= spent < 60.0
    _report(2, "gradient finite differences", ok, f"{spent:.1f}s")


# ---------------------------------------------------------------------------
# 3. Log-probability weights reduce the CRF to the generative conditional
# ---------------------------------------------------------------------------

def _conditional_pairs():
    nb = parse_program(generate_tabular_program(WEATHER, "naive_bayes"))
    pairs = [("nb", nb, parse_term("nb([high,low],summer)"),
              parse_term("nb([high,low])")),
             ("nb", nb, parse_term("nb([low,high],spring)"),
              parse_term("nb([low,high])"))]
    hmm = parse_program(generate_hmm_program(["s0", "s1"], ["a", "b"]))
    pairs.append(("hmm", hmm,
                  encode_sequence(list("abba"), ["s0", "s1", "s1", "s0"]),
                  encode_sequence(list("abba"))))
    td, lc = generate_cfg_programs(GRAMMAR_NPVP)
    comp_td, comp_lc, sent = encode_tree(
        GRAMMAR_NPVP, "(s (np d n) (vp v (np n)))")
    pairs.append(("cfg_topdown", parse_program(td), comp_td, sent))
    pairs.append(("cfg_leftcorner", parse_program(lc), comp_lc,
                  Struct("plcg", (make_list(
                      [Atom(w) for w in ["d", "n", "v", "n"]]),))))
    return pairs


def test_03_generative_discriminative_reduction():
    ok = True
    for label, p, comp_goal, inc_goal in _conditional_pairs():
        comp, inc = _graph(p, comp_goal), _graph(p, inc_goal)
        space = SwitchSpace(p)
        switches = _graph_switches(inc)
        for seed in range(3):
            theta = ParameterTable(ParameterTable.PROBABILITY, space)
            _fill(theta, random.Random(seed), switches)
            w = theta.to_weight_mode()
            lhs = conditional_log_prob(comp, inc, w)
            rhs = inside_root(comp, theta) - inside_root(inc, theta)
            ok &= abs(lhs - rhs) <= 1e-9
    _report(3, "weights ln(theta) reduction", ok)


# ---------------------------------------------------------------------------
# 4 and 5. Tabular benchmark reproduction
# ---------------------------------------------------------------------------

def _tabular_examples(schema_file, csv_file, structure):
    schema = read_schema(str(DATA / schema_file))
    rows = read_csv_rows(str(DATA / csv_file), schema)
    return schema, [make_example(encode_tabular(schema, r, True, structure))
                    for r in rows]


def _cv(schema, examples, structure, cfg):
    p = parse_program(generate_tabular_program(schema, structure))
    rep = cross_validate(p, examples, "class_accuracy", cfg,
                         folds=10, seed=0, threads=4)
    return 100 * rep.mean


def test_04_car_reproduction():
    t0 = time.monotonic()
    sch_nb, ex_nb = _tabular_examples("car_nb.schema", "car.csv", "naive_bayes")
    sch_bn, ex_bn = _tabular_examples("car_bnc.schema", "car.csv", "bnc")

    nb = _cv(sch_nb, ex_nb, "naive_bayes",
             TrainConfig(method="counting", smoothing=0.5))
    lr = _cv(sch_nb, ex_nb, "naive_bayes",
             TrainConfig(method="lbfgs", mu=1.0))
    bnc = _cv(sch_bn, ex_bn, "bnc",
              TrainConfig(method="counting", smoothing=0.5))
    crf_bnc = _cv(sch_bn, ex_bn, "bnc",
                  TrainConfig(method="lbfgs", mu=0.01))

    ok = abs(nb - 86.11) <= 3.0
    ok &= abs(lr - 93.28) <= 3.0
    ok &= abs(bnc - 91.55) <= 3.0
    ok &= abs(crf_bnc - 99.82) <= 1.5
    ok &= lr > nb
    ok &= crf_bnc > bnc
    spent = time.monotonic() - t0
    _report(4, "car 10-fold accuracies", ok,
            f"nb={nb:.2f} lr={lr:.2f} bnc={bnc:.2f} "
            f"crf_bnc={crf_bnc:.2f} {spent:.0f}s")


def test_05_zoo_reproduction():
    sch, ex = _tabular_examples("zoo.schema", "zoo.csv", "naive_bayes")
    nb = _cv(sch, ex, "naive_bayes",
             TrainConfig(method="counting", smoothing=0.5))
    lr = _cv(sch, ex, "naive_bayes", TrainConfig(method="lbfgs", mu=1.0))
    ok = abs(nb - 97.0) <= 4.0 and abs(lr - 96.0) <= 5.0
    _report(5, "zoo 10-fold accuracies", ok, f"nb={nb:.2f} lr={lr:.2f}")


# ---------------------------------------------------------------------------
# 6. Sequence and tree substitutes for the licensed-corpus experiments
# ---------------------------------------------------------------------------

HMM3_TRUE = {
    "init": [0.5, 0.3, 0.2],
    "tr(s0)": [0.6, 0.2, 0.2], "tr(s1)": [0.2, 0.6, 0.2],
    "tr(s2)": [0.2, 0.2, 0.6],
    "out(s0)": [0.7, 0.2, 0.1], "out(s1)": [0.1, 0.7, 0.2],
    "out(s2)": [0.2, 0.1, 0.7],
}


def _draw(rng, dist, opts):
    r = rng.random()
    acc = 0.0
    for p_i, o in zip(dist, opts):
        acc += p_i
        if r <= acc:
            return o
    return opts[-1]


def _sample_hmm(rng, n):
    states, vocab = ["s0", "s1", "s2"], ["a", "b", "c"]
    s = _draw(rng, HMM3_TRUE["init"], states)
    xs, ys = [], []
    for _ in range(n):
        xs.append(_draw(rng, HMM3_TRUE[f"out({s})"], vocab))
        ys.append(s)
        s = _draw(rng, HMM3_TRUE[f"tr({s})"], states)
    return xs, ys


def test_06a_crf_tags_at_least_counting_minus_two_points():
    p = parse_program(generate_hmm_program(["s0", "s1", "s2"],
                                           ["a", "b", "c"]))
    from genlog.experiments import token_accuracy
    count_accs, crf_accs = [], []
    for seed in range(5):
        rng = random.Random(seed)
        examples = []
        for _ in range(75):
            xs, ys = _sample_hmm(rng, rng.randint(3, 7))
            examples.append(make_example(encode_sequence(xs, ys)))
        train, test = examples[:50], examples[50:]
        gen, _ = fit(p, train, TrainConfig(method="counting", smoothing=0.5))
        crf, _ = fit(p, train, TrainConfig(method="lbfgs", mu=1.0))
        count_accs.append(evaluate(p, test, gen.to_weight_mode(),
                                   token_accuracy))
        crf_accs.append(evaluate(p, test, crf, token_accuracy))
    mean_count = sum(count_accs) / len(count_accs)
    mean_crf = sum(crf_accs) / len(crf_accs)
    ok = mean_crf >= mean_count - 0.02
    _report(6, "a: CRF tagging vs counting", ok,
            f"crf={100 * mean_crf:.2f} counting={100 * mean_count:.2f}")


def _language(grammar, max_len):
    """All terminal strings of length <= max_len, by sentential-form search."""
    nts = set(grammar.nonterminals)
    out, frontier, seen = [], [(grammar.start,)], set()
    while frontier:
        form = frontier.pop()
        if len(form) > max_len or form in seen:
            continue
        seen.add(form)
        i = next((k for k, s in enumerate(form) if s in nts), None)
        if i is None:
            out.append(list(form))
            continue
        for lhs, rhs in grammar.rules:
            if lhs == form[i]:
                frontier.append(form[:i] + rhs + form[i + 1:])
    return sorted(out, key=lambda s: (len(s), s))


def test_06b_crf_viterbi_tree_equals_pcfg_viterbi_tree():
    ok = True
    for grammar in (GRAMMAR_2RULE, GRAMMAR_NPVP):
        td, lc = generate_cfg_programs(grammar)
        for src, pred in ((td, "parse"), (lc, "plcg")):
            p = parse_program(src)
            space = SwitchSpace(p)
            for sent in _language(grammar, 8):
                goal = Struct(pred, (make_list([Atom(w) for w in sent]),
                                     Var(0)))
                g = _graph(p, goal)
                switches = _graph_switches(g)
                for seed in range(3):
                    theta = ParameterTable(ParameterTable.PROBABILITY, space)
                    _fill(theta, random.Random(seed), switches)
                    a = viterbi(g, theta).decode
                    b = viterbi(g, theta.to_weight_mode()).decode
                    ok &= a == b
    _report(6, "b: tree argmax equivalence", ok)


GRAMMAR_PP = Grammar(
    "s",
    [("s", ("np", "vp")), ("np", ("n",)), ("np", ("n", "pp")),
     ("vp", ("v", "np")), ("vp", ("v", "np", "pp")), ("pp", ("p", "np"))],
    {"n", "v", "p"})

PP_TRUE = {"s": [1.0], "np": [0.6, 0.4], "vp": [0.9, 0.1], "pp": [1.0]}


def _sample_tree(rng, grammar, sym, depth=0):
    if sym in grammar.terminals:
        return sym
    rules = [r for l, r in grammar.rules if l == sym]
    dist = PP_TRUE[sym]
    if depth > 6:     # force the shortest expansion deep in the tree
        rhs = min(rules, key=len)
    else:
        rhs = _draw(rng, dist, rules)
    return (sym, [_sample_tree(rng, grammar, s, depth + 1) for s in rhs])


def test_06c_counting_on_trees_beats_em_on_sentences():
    td, _ = generate_cfg_programs(GRAMMAR_PP)
    p = parse_program(td)
    count_accs, em_accs = [], []
    for seed in range(5):
        rng = random.Random(seed)
        examples = []
        while len(examples) < 60:
            tree = _sample_tree(rng, GRAMMAR_PP, "s")
            if len(tree_leaves(tree)) > 10:
                continue
            comp, _, sent = encode_tree(GRAMMAR_PP, tree)
            examples.append(make_example(comp))
        train, test = examples[:40], examples[40:]
        counted, _ = fit(p, train, TrainConfig(method="counting",
                                               smoothing=0.1))
        em_table, _ = em_fit(
            p, [Instance(ex.incomplete) for ex in train],
            cfg=TrainConfig(method="em", max_iters=100, em_tol=1e-8))
        from genlog.experiments import exact_match
        count_accs.append(evaluate(p, test, counted, exact_match))
        em_accs.append(evaluate(p, test, em_table, exact_match))
    mean_count = sum(count_accs) / len(count_accs)
    mean_em = sum(em_accs) / len(em_accs)
    ok = mean_count > mean_em
    _report(6, "c: counting-on-trees > EM-on-sentences", ok,
            f"counting={100 * mean_count:.2f} em={100 * mean_em:.2f}")


# ---------------------------------------------------------------------------
# 7. EM monotonicity
# ---------------------------------------------------------------------------

def test_07_em_monotone_everywhere():
    ok = True
    fixtures = []

    hmm = parse_program(generate_hmm_program(["s0", "s1"], ["a", "b"]))
    rng = random.Random(0)
    fixtures.append((hmm, [Instance(encode_sequence(
        [rng.choice("ab") for _ in range(4)])) for _ in range(12)]))

    nb = parse_program(generate_tabular_program(WEATHER, "naive_bayes"))
    fixtures.append((nb, [Instance(parse_term("nb([high,low])")),
                          Instance(parse_term("nb([high,low])")),
                          Instance(parse_term("nb([mild,high])"))]))

    td, _ = generate_cfg_programs(GRAMMAR_PP)
    cfg = parse_program(td)
    rng = random.Random(1)
    sents = []
    for _ in range(8):
        tree = _sample_tree(rng, GRAMMAR_PP, "s")
        if len(tree_leaves(tree)) <= 9:
            _, _, sent = encode_tree(GRAMMAR_PP, tree)
            sents.append(Instance(sent))
    fixtures.append((cfg, sents))

    for p, data in fixtures:
        space = SwitchSpace(p)
        for seed in range(3):
            init = ParameterTable(ParameterTable.PROBABILITY, space)
            switches = []
            for inst in data:
                for sw in _graph_switches(_graph(p, inst.incomplete_goal)):
                    if sw not in switches:
                        switches.append(sw)
            _fill(init, random.Random(seed), switches)
            _, rep = em_fit(p, data, init=init,
                            cfg=TrainConfig(method="em", max_iters=60))
            trace = rep.objective_trace
            ok &= all(b >= a - 1e-10 for a, b in zip(trace, trace[1:]))
    _report(7, "EM monotone log-likelihood", ok)


# ---------------------------------------------------------------------------
# 8. Program derivation by unfold/fold
# ---------------------------------------------------------------------------

COMPLETE_SRC = """
values(init,[s0,s1]).
values(tr(_),[s0,s1]).
values(out(_),[a,b]).

hmm0([X0|Xs],[Y0|Ys]):- msw(init,Y0),msw(out(Y0),X0),hmm1(Y0,Xs,Ys).
hmm1(_,[],[]).
hmm1(Y0,[X|Xs],[Y|Ys]):- msw(tr(Y0),Y),msw(out(Y),X),hmm1(Y,Xs,Ys).
"""

DERIVATION_SCRIPT = """
define hmm0(X):- hmm0(X,Y).
define hmm1(Y0,Xs):- hmm1(Y0,Xs,Ys).
unfold 4 at 1.
fold 6 at 3..3 by 5.
unfold 5 at 1.
fold 9 at 3..3 by 5.
"""

SPECIALIZED_CLAUSES = """
hmm0([X|Xs]):- msw(init,Y0),msw(out(Y0),X),hmm1(Y0,Xs).
hmm1(_,[]).
hmm1(Y0,[X|Xs]):- msw(tr(Y0),Y),msw(out(Y),X),hmm1(Y,Xs).
"""


def test_08_transformation_derivation():
    derived, _ = apply_script(parse_program(COMPLETE_SRC),
                              parse_script(DERIVATION_SCRIPT))
    want = parse_program(COMPLETE_SRC + SPECIALIZED_CLAUSES)
    ok = [clause_to_text(c) for c in derived.clauses] == \
        [clause_to_text(c) for c in want.clauses]

    naive = parse_program(COMPLETE_SRC + "hmm0(X):- hmm0(X,_).\n")
    goal = parse_term("hmm0(Xs)")
    probes = [(parse_term("[" + ",".join(s) + "]"),)
              for k in range(1, 6) for s in itertools.product("ab", repeat=k)]
    report = check_explanation_equivalence(derived, goal, naive, goal, probes)
    ok &= report.all_equal and report.skipped == 0

    goal12 = parse_term("hmm0([" + ",".join("a" for _ in range(12)) + "])")
    fast = Solver(derived, max_steps=1_000_000)
    fast.solve_all(goal12)
    ok &= fast.steps < 1_000
    slow = Solver(naive, max_steps=1_000_000)
    try:
        slow.solve_all(goal12)
        naive_steps = slow.steps
    except StepLimitExceeded:
        naive_steps = 1_000_001
    ok &= naive_steps > 100_000
    _report(8, "unfold/fold derivation", ok,
            f"derived={fast.steps} naive>{min(naive_steps, 1_000_000)}")


# ---------------------------------------------------------------------------
# 9. Optimizer unit suite
# ---------------------------------------------------------------------------

def test_09_lbfgs_suite():
    def quad(x):
        d = x - 1.0
        return float(d @ d), 2 * d
    x, rep = lbfgs_minimize(quad, np.zeros(5), grad_tol=1e-10)
    ok = np.max(np.abs(x - 1.0)) < 1e-8 and rep.iterations <= 10

    def rosen(v):
        a, b = v
        val = (1 - a) ** 2 + 100 * (b - a * a) ** 2
        g = np.array([-2 * (1 - a) - 400 * a * (b - a * a),
                      200 * (b - a * a)])
        return val, g
    x, _ = lbfgs_minimize(rosen, np.array([-1.2, 1.0]), grad_tol=1e-9,
                          max_iters=2000)
    ok &= np.max(np.abs(x - 1.0)) < 1e-6

    X = np.array([[1.0, 0.2], [0.9, -0.4], [-1.1, 0.5], [-0.7, -0.8]])
    y = np.array([1.0, 1.0, 0.0, 0.0])

    def logreg(w):
        z = X @ w
        pr = 1 / (1 + np.exp(-z))
        val = -float(y @ np.log(pr) + (1 - y) @ np.log(1 - pr)) + \
            0.5 * float(w @ w)
        return val, X.T @ (pr - y) + w

    rng = np.random.default_rng(0)
    sols = [lbfgs_minimize(logreg, rng.normal(size=2) * 4, grad_tol=1e-10)[0]
            for _ in range(4)]
    ok &= all(np.max(np.abs(s - sols[0])) < 1e-6 for s in sols[1:])
    _report(9, "L-BFGS unit suite", ok)
