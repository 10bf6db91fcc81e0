"""Unfold/fold transformation and explanation-set equivalence probes."""

import itertools

import pytest

from genlog.engine import Solver, StepLimitExceeded
from genlog.parser import clause_to_text, parse_clause, parse_program, parse_term
from genlog.transform import (
    Define, Fold, TransformError, TransformScript, Unfold, apply_script,
    check_explanation_equivalence, parse_script,
)


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


def run_derivation():
    p = parse_program(COMPLETE_SRC)
    return apply_script(p, parse_script(DERIVATION_SCRIPT))


def test_script_reproduces_specialized_program():
    p2, log = run_derivation()
    want = parse_program(COMPLETE_SRC + SPECIALIZED_CLAUSES)
    got = [clause_to_text(c) for c in p2.clauses]
    expect = [clause_to_text(c) for c in want.clauses]
    assert got == expect
    assert len(log.lines) == 7  # 2 defines, 3 unfold products, 2 folds


def test_script_replay_deterministic():
    a, _ = run_derivation()
    b, _ = run_derivation()
    assert [clause_to_text(c) for c in a.clauses] == \
        [clause_to_text(c) for c in b.clauses]


def test_unfold_propagates_bindings():
    p = parse_program("p(X):- q(X).\nq(a).\nr(b).\n")
    p2, log = apply_script(p, TransformScript([Unfold(1, 1)]))
    assert any(clause_to_text(c) == "p(a)." for c in p2.clauses)


def test_unfold_zero_resolvents():
    # q/1 exists but no clause head matches q(b): the unfolded clause vanishes
    p = parse_program("p(b):- q(b).\nq(a).\n")
    p2, log = apply_script(p, TransformScript([Unfold(1, 1)]))
    assert all(c.pred() != ("p", 1) for c in p2.clauses)
    assert "clause deleted" in log.lines[0]


def test_fold_rejects_escaping_internal_variable():
    src = """
values(c,[x,y]).
p(A):- msw(c,A), q(A,B), r(B).
q(x,x).
r(x).
"""
    p = parse_program(src)
    # definer's internal variable B maps to a variable also used by r(B)
    script = TransformScript([
        Define(parse_clause("q1(A):- q(A,B).")),
        Fold(1, 2, 2, 4),
    ])
    with pytest.raises(TransformError, match="occurs elsewhere"):
        apply_script(p, script)


def test_fold_rejects_instantiated_internal_variable():
    p = parse_program("p:- q(a).\nq(a).\n")
    script = TransformScript([
        Define(parse_clause("q1:- q(B).")),
        Fold(1, 1, 1, 3),
    ])
    with pytest.raises(TransformError, match="instantiated"):
        apply_script(p, script)


def test_fold_accepts_and_replaces():
    p = parse_program("p(A):- q(A,B), r(A).\nq(a,a).\nr(a).\n")
    script = TransformScript([
        Define(parse_clause("q1(A):- q(A,B).")),
        Fold(1, 1, 1, 4),
    ])
    p2, log = apply_script(p, script)
    texts = [clause_to_text(c) for c in p2.clauses]
    assert "p(A) :- q1(A), r(A)." in texts


def test_script_parser_errors():
    with pytest.raises(TransformError):
        parse_script("unfold one at 2.")
    with pytest.raises(TransformError):
        parse_script("refold 1 at 1.")


def test_bad_step_reports_number():
    p = parse_program(COMPLETE_SRC)
    script = parse_script("define hmm0(X):- hmm0(X,Y).\nunfold 9 at 1.")
    with pytest.raises(TransformError, match="step 2"):
        apply_script(p, script)


# -- equivalence probes ------------------------------------------------------

def _string_probes(max_len):
    out = []
    for k in range(1, max_len + 1):
        for s in itertools.product("ab", repeat=k):
            out.append((parse_term("[" + ",".join(s) + "]"),))
    return out


def test_equivalence_derived_vs_naive():
    derived, _ = run_derivation()
    naive = parse_program(COMPLETE_SRC + "hmm0(X):- hmm0(X,_).\n")
    goal = parse_term("hmm0(Xs)")
    report = check_explanation_equivalence(
        derived, goal, naive, goal, _string_probes(5))
    assert report.all_equal
    assert report.skipped == 0
    assert len(report.results) == sum(2 ** k for k in range(1, 6))


def test_equivalence_self():
    p = parse_program(COMPLETE_SRC + SPECIALIZED_CLAUSES)
    goal = parse_term("hmm0(Xs)")
    report = check_explanation_equivalence(p, goal, p, goal, _string_probes(3))
    assert report.all_equal


def test_equivalence_detects_difference():
    p1 = parse_program(COMPLETE_SRC + SPECIALIZED_CLAUSES)
    changed = SPECIALIZED_CLAUSES.replace("msw(out(Y0),X)", "msw(out(s0),X)")
    assert changed != SPECIALIZED_CLAUSES
    p2 = parse_program(COMPLETE_SRC + changed)
    goal = parse_term("hmm0(Xs)")
    report = check_explanation_equivalence(p1, goal, p2, goal,
                                           _string_probes(2))
    assert not report.all_equal
    bad = [r for r in report.results if r.status == "unequal"]
    assert bad and "differing explanation" in bad[0].detail


def test_equivalence_skips_exploding_probe():
    p = parse_program(COMPLETE_SRC + SPECIALIZED_CLAUSES)
    goal = parse_term("hmm0(Xs)")
    probe = (parse_term("[" + ",".join("a" for _ in range(14)) + "]"),)
    report = check_explanation_equivalence(p, goal, p, goal, [probe], limit=10)
    assert report.results[0].status == "skipped"


# -- tabling effect ----------------------------------------------------------

def _steps(program, goal, cap):
    s = Solver(program, max_steps=cap)
    s.solve_all(goal)
    return s.steps


def test_derived_program_kills_exponential_blowup():
    derived, _ = run_derivation()
    naive = parse_program(COMPLETE_SRC + "hmm0(X):- hmm0(X,_).\n")
    for n in (4, 8, 12):
        goal = parse_term("hmm0([" + ",".join("a" for _ in range(n)) + "])")
        assert _steps(derived, goal, 1_000_000) < 1_000
    goal12 = parse_term("hmm0([" + ",".join("a" for _ in range(12)) + "])")
    try:
        naive_steps = _steps(naive, goal12, 1_000_000)
    except StepLimitExceeded:
        naive_steps = 1_000_001
    assert naive_steps > 100_000
