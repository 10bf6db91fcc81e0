"""Tabled search and explanation graphs."""

import pytest

from genlog.engine import (
    CyclicDependency, ExplosionError, InstantiationError, Solver,
    StepLimitExceeded, UnknownPredicate, count_explanations,
    enumerate_explanations, expand_explanations, explanation_key, solve_all,
)
from genlog.parser import parse_program, parse_term
from genlog.terms import Atom, to_text


COINS_SRC = """
values(coin(_),[heads,tails]).

two(X,Y):- msw(coin(1),X), msw(coin(2),Y).
agree:- two(X,X).
double_heads:- two(heads,heads).
"""


def test_ground_query_single_answer_root():
    p = parse_program(COINS_SRC)
    g = solve_all(p, parse_term("double_heads"))
    assert g is not None
    assert not g.synthetic_root
    expls = enumerate_explanations(g, 10)
    assert expls == [{(parse_term("coin(1)"), Atom("heads")): 1,
                      (parse_term("coin(2)"), Atom("heads")): 1}]


def test_open_query_synthetic_root():
    p = parse_program(COINS_SRC)
    g = solve_all(p, parse_term("two(X,Y)"))
    assert g.synthetic_root
    assert len(g.root.derivations) == 4
    assert count_explanations(g, 100) == 4


def test_unprovable_returns_none():
    p = parse_program(COINS_SRC + "never:- two(heads,x).\n")
    assert solve_all(p, parse_term("never")) is None


def test_sharing_no_duplicate_subgraphs():
    # both derivations of agree consume the same tabled two/2 answers
    p = parse_program(COINS_SRC)
    g = solve_all(p, parse_term("agree"))
    assert count_explanations(g, 10) == 2
    keys = {explanation_key(c) for c in expand_explanations(g, 10)}
    assert len(keys) == 2


def test_nodes_topologically_ordered():
    p = parse_program(COINS_SRC)
    g = solve_all(p, parse_term("agree"))
    pos = {id(n): i for i, n in enumerate(g.nodes)}
    for n in g.nodes:
        for d in n.derivations:
            for child in d.subgoals:
                assert pos[id(child)] < pos[id(n)]
    assert g.nodes[-1] is g.root


def test_tabling_reuses_entries():
    src = """
values(c,[a,b]).
p(X):- msw(c,X).
q:- p(X), p(Y), X == Y.
r:- q, q.
"""
    p = parse_program(src)
    s = Solver(p)
    g = s.solve_all(parse_term("r"))
    # both open p/_ calls and both q calls are variants: one table entry
    # each, so every answer node appears once in the graph
    labels = [to_text(n.goal) for n in g.nodes]
    assert labels.count("p(a)") == 1
    assert labels.count("p(b)") == 1
    assert labels.count("q") == 1


def test_cyclic_program_is_an_error():
    p = parse_program("values(c,[a]).\nloop:- loop.\n")
    with pytest.raises(CyclicDependency):
        solve_all(p, parse_term("loop"))


def test_unknown_predicate_error():
    p = parse_program("p:- missing.\n")
    with pytest.raises(UnknownPredicate, match="missing/0"):
        solve_all(p, parse_term("p"))


def test_nonground_switch_error():
    p = parse_program("values(c(_),[a]).\np(X):- msw(c(X),a).\n")
    with pytest.raises(InstantiationError):
        solve_all(p, parse_term("p(Y)"))


def test_undeclared_switch_fails_quietly():
    p = parse_program("values(c,[a]).\np:- msw(other,a).\nq:- msw(c,a).\n")
    assert solve_all(p, parse_term("p")) is None
    assert solve_all(p, parse_term("q")) is not None


def test_step_limit():
    # every recursive call is a new, larger pattern: never a variant, so the
    # step meter is the only thing that stops it
    src = "g(X):- g(f(X)).\n"
    p = parse_program(src)
    with pytest.raises(StepLimitExceeded):
        solve_all(p, parse_term("g(a)"), max_steps=200)


def test_open_recursion_is_cyclic_not_divergent():
    # an open-ended recursive call that is a variant of its parent is
    # reported as a cycle instead of running away
    src = "len([],z).\nlen([_|T],s(N)):- len(T,N).\n"
    p = parse_program(src)
    with pytest.raises(CyclicDependency):
        solve_all(p, parse_term("len(L,N)"))


def test_if_then_else_commits_to_first_solution():
    # conditions must be deterministic (no switches); the first condition
    # solution commits
    src = """
values(c,[a,b]).
mem(X,[X|_]).
mem(X,[_|T]):- mem(X,T).
pick(Y):- ( mem(X,[a,b]) -> X = Y ; fail ).
"""
    p = parse_program(src)
    g = solve_all(p, parse_term("pick(X)"))
    answers = [to_text(d.subgoals[0].goal) for d in g.root.derivations] \
        if g.synthetic_root else [to_text(g.root.goal)]
    assert answers == ["pick(a)"]


def test_if_then_else_rejects_probabilistic_condition():
    from genlog.program import ProgramError
    src = "values(c,[a,b]).\npick(X):- ( msw(c,X) -> true ; fail ).\n"
    with pytest.raises(ProgramError, match="condition contains msw"):
        parse_program(src)


def test_disjunction_collects_both_branches():
    src = """
values(c,[a,b]).
pick(X):- ( msw(c,X) ; X = c ).
"""
    p = parse_program(src)
    g = solve_all(p, parse_term("pick(X)"))
    assert count_explanations(g, 10) == 3


def test_strict_eq_and_unify_goals():
    src = """
values(c,[a,b]).
same:- msw(c,X), msw(c,Y), X == Y.
bind(X):- X = f(a).
"""
    p = parse_program(src)
    g = solve_all(p, parse_term("same"))
    assert count_explanations(g, 10) == 2
    g2 = solve_all(p, parse_term("bind(Z)"))
    assert to_text(g2.root.derivations[0].subgoals[0].goal) == "bind(f(a))"


def test_expand_explanations_limit():
    p = parse_program(COINS_SRC)
    g = solve_all(p, parse_term("two(X,Y)"))
    with pytest.raises(ExplosionError):
        expand_explanations(g, 3)
    assert len(expand_explanations(g, 4)) == 4


def test_duplicate_derivations_collapse():
    # explanations are a set: two clauses proving the same answer with the
    # same choices contribute one derivation, not two
    src = """
values(c,[a]).
p:- msw(c,a).
p:- msw(c,a).
"""
    p = parse_program(src)
    g = solve_all(p, parse_term("p"))
    assert count_explanations(g, 10) == 1


def test_derivation_size_and_dump():
    p = parse_program(COINS_SRC)
    g = solve_all(p, parse_term("agree"))
    assert g.derivation_size() > 0
    text = g.dump()
    assert "agree" in text and "msw(coin(1),heads)" in text
