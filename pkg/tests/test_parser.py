"""Program reader and writer: syntax coverage and the round trip."""

import pytest

from genlog.parser import (
    SyntaxErrorWithPos, clause_to_text, goal_to_text, parse_clause,
    parse_program, parse_term, program_to_text,
)
from genlog.program import (
    Call, Disj, FAIL, IfThenElse, Msw, ProgramError, StrictEq, TRUE, Unify2,
)
from genlog.terms import Atom, Int, Struct, Var, make_list


def test_parse_term_shapes():
    assert parse_term("foo") == Atom("foo")
    assert parse_term("42") == Int(42)
    assert parse_term("-7") == Int(-7)
    assert parse_term("f(a,B,1)") == Struct(
        "f", (Atom("a"), Var(0), Int(1)))
    assert parse_term("[a,b]") == make_list([Atom("a"), Atom("b")])
    assert parse_term("[H|T]") == make_list([Var(0)], tail=Var(1))
    assert parse_term("[]") == Atom("[]")
    assert parse_term("'5more'") == Atom("5more")
    assert parse_term("'it''s'" .replace("''", "\\'")) == Atom("it's")


def test_variable_scoping_per_clause():
    c = parse_clause("p(X,Y,X):- q(Y).")
    assert c.head == Struct("p", (Var(0), Var(1), Var(0)))
    assert c.body == (Call(Struct("q", (Var(1),))),)
    assert c.nvars == 2
    # underscore is always fresh
    c2 = parse_clause("p(_,_).")
    assert c2.head.args[0] != c2.head.args[1]


def test_body_goal_kinds():
    c = parse_clause("p:- msw(coin,X), X = heads, X == heads, true, fail.")
    kinds = [type(g) for g in c.body]
    assert kinds == [Msw, Unify2, StrictEq, type(TRUE), type(FAIL)]


def test_if_then_else_and_disjunction():
    c = parse_clause("p(X):- ( q(X) -> r(X) ; s(X) ).")
    (g,) = c.body
    assert isinstance(g, IfThenElse)
    assert g.cond == (Call(Struct("q", (Var(0),))),)
    assert g.orelse == (Call(Struct("s", (Var(0),))),)
    c2 = parse_clause("p(X):- ( q(X) ; s(X) ).")
    assert isinstance(c2.body[0], Disj)
    c3 = parse_clause("p(X):- ( q(X) -> r(X) ).")
    assert isinstance(c3.body[0], IfThenElse)
    assert c3.body[0].orelse == (FAIL,)


def test_precedence_semicolon_binds_loosest():
    c = parse_clause("p:- ( a, b ; c ).")
    (g,) = c.body
    assert isinstance(g, Disj)
    assert g.left == (Call(Atom("a")), Call(Atom("b")))
    assert g.right == (Call(Atom("c")),)


def test_values_become_switch_decls():
    p = parse_program("values(coin,[heads,tails]).\nflip(X):- msw(coin,X).\n")
    assert len(p.switch_decls) == 1
    d = p.switch_decls[0]
    assert d.pattern == Atom("coin")
    assert d.outcomes == (Atom("heads"), Atom("tails"))
    assert len(p.clauses) == 1


def test_values_errors():
    with pytest.raises(ProgramError, match="fact"):
        parse_program("values(coin,[a,b]):- true.")
    with pytest.raises(ProgramError, match="proper list"):
        parse_program("values(coin,X).")


def test_syntax_errors_have_positions():
    with pytest.raises(SyntaxErrorWithPos, match="line 2"):
        parse_program("p(a).\nq(b) :- .\n")
    with pytest.raises(SyntaxErrorWithPos):
        parse_term("f(a")
    with pytest.raises(SyntaxErrorWithPos, match="variable used as a goal"):
        parse_clause("p(X):- X.")
    with pytest.raises(SyntaxErrorWithPos, match="msw takes exactly two"):
        parse_clause("p:- msw(a).")
    with pytest.raises(SyntaxErrorWithPos, match="trailing"):
        parse_clause("p(a). q(b).")


def test_comments_and_whitespace():
    p = parse_program("% leading comment\np(a). % trailing\n\n  q(b).\n")
    assert len(p.clauses) == 2


def test_writer_round_trip():
    src = """\
values(coin,[heads,tails]).
values(attr(_),['5more',x]).
flip(A) :- msw(coin,A).
both(A,B) :- msw(coin,A), msw(coin,B), A == B.
pick(A) :- ( A = heads -> true ; fail ).
"""
    p = parse_program(src)
    text = program_to_text(p)
    p2 = parse_program(text)
    assert program_to_text(p2) == text
    assert [clause_to_text(c) for c in p.clauses] == \
        [clause_to_text(c) for c in p2.clauses]


def test_goal_to_text_true_goal():
    c = parse_clause("p:- true.")
    assert goal_to_text(c.body[0]) == "true"
    assert clause_to_text(c) == "p :- true."
