"""Reader and writer for the Prolog-subset program syntax.

Supported constructs: facts and rules, `msw/2`, `values/2` declarations,
`=`, `==`, `->`/`;`, `true`, `fail`, lists with `[H|T]` sugar, integers,
quoted atoms and `%` line comments.  That is the entire surface the bundled
model programs need; there is no cut, negation or arithmetic.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .program import (
    BodyGoal, Call, Clause, Disj, FAIL, IfThenElse, Msw, Program, ProgramError,
    StrictEq, SwitchDecl, TRUE, TrueGoal, Unify2, body_vars, goal_vars,
)
from .terms import (
    Atom, Int, NIL, Struct, Term, Var, is_ground, list_items, make_list,
    term_vars, to_text,
)


class SyntaxErrorWithPos(ProgramError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{msg} at line {line}, column {col}")
        self.line = line
        self.col = col


@dataclass
class Token:
    kind: str   # atom, var, int, punct, end
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<comment>%[^\n]*)
      | (?P<punct>:-|->|==|=|\(|\)|\[|\]|\||,|;)
      | (?P<int>-?\d+)
      | (?P<atom>[a-z][A-Za-z0-9_]*)
      | (?P<qatom>'(?:[^'\\]|\\.)*')
      | (?P<var>[A-Z_][A-Za-z0-9_]*)
      | (?P<dot>\.)
    """,
    re.VERBOSE,
)


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    line, col, pos = 1, 1, 0
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if not m:
            raise SyntaxErrorWithPos(f"unexpected character {source[pos]!r}", line, col)
        text = m.group(0)
        kind = m.lastgroup
        if kind == "ws" or kind == "comment":
            pass
        elif kind == "dot":
            nxt = source[m.end():m.end() + 1]
            if nxt == "(":
                # '.'/2 written explicitly is not part of the language
                raise SyntaxErrorWithPos("'.' functor not supported", line, col)
            tokens.append(Token("end", ".", line, col))
        elif kind == "qatom":
            name = text[1:-1].replace("\\'", "'").replace("\\\\", "\\")
            tokens.append(Token("atom", name, line, col))
        else:
            tokens.append(Token(kind, text, line, col))
        for ch in text:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0
        self.varmap: dict[str, int] = {}
        self.nvars = 0

    def peek(self) -> Token:
        return self.tokens[self.i]

    def next(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, kind: str, text: str | None = None) -> Token:
        t = self.next()
        if t.kind != kind or (text is not None and t.text != text):
            want = text or kind
            raise SyntaxErrorWithPos(f"expected {want!r}, found {t.text!r}", t.line, t.col)
        return t

    def fresh_var(self, name: str) -> Var:
        if name == "_":
            vid = self.nvars
            self.nvars += 1
            return Var(vid)
        if name not in self.varmap:
            self.varmap[name] = self.nvars
            self.nvars += 1
        return Var(self.varmap[name])

    # -- terms --------------------------------------------------------------

    def term(self) -> Term:
        t = self.peek()
        if t.kind == "atom":
            self.next()
            if self.peek().kind == "punct" and self.peek().text == "(":
                self.next()
                args = [self.term()]
                while self.peek().text == "," and self.peek().kind == "punct":
                    self.next()
                    args.append(self.term())
                self.expect("punct", ")")
                return Struct(t.text, tuple(args))
            return Atom(t.text)
        if t.kind == "var":
            self.next()
            return self.fresh_var(t.text)
        if t.kind == "int":
            self.next()
            return Int(int(t.text))
        if t.kind == "punct" and t.text == "[":
            self.next()
            if self.peek().text == "]" and self.peek().kind == "punct":
                self.next()
                return NIL
            items = [self.term()]
            while self.peek().text == "," and self.peek().kind == "punct":
                self.next()
                items.append(self.term())
            tail: Term = NIL
            if self.peek().text == "|":
                self.next()
                tail = self.term()
            self.expect("punct", "]")
            return make_list(items, tail)
        if t.kind == "punct" and t.text == "(":
            self.next()
            inner = self.term()
            self.expect("punct", ")")
            return inner
        raise SyntaxErrorWithPos(f"expected a term, found {t.text!r}", t.line, t.col)

    # -- clause bodies ------------------------------------------------------
    # precedence: ';' < '->' < ','

    def body(self) -> tuple:
        return self._flatten_conj(self._disj())

    def _disj(self):
        left = self._implies()
        if self.peek().kind == "punct" and self.peek().text == ";":
            self.next()
            right = self._disj()
            if isinstance(left, tuple) and len(left) == 1 and isinstance(left[0], _Arrow):
                arrow = left[0]
                return (IfThenElse(arrow.cond, arrow.then,
                                   self._flatten_conj(right)),)
            return (Disj(self._flatten_conj(left), self._flatten_conj(right)),)
        return left

    def _implies(self):
        left = self._conj()
        if self.peek().kind == "punct" and self.peek().text == "->":
            self.next()
            right = self._implies()
            return (_Arrow(self._flatten_conj(left), self._flatten_conj(right)),)
        return left

    def _conj(self):
        goals = [self._goal()]
        while self.peek().kind == "punct" and self.peek().text == ",":
            self.next()
            goals.append(self._goal())
        out: list = []
        for g in goals:
            if isinstance(g, tuple):
                out.extend(g)
            else:
                out.append(g)
        return tuple(out)

    def _goal(self):
        t = self.peek()
        if t.kind == "punct" and t.text == "(":
            self.next()
            inner = self._disj()
            self.expect("punct", ")")
            return inner
        term = self.term()
        nxt = self.peek()
        if nxt.kind == "punct" and nxt.text == "=":
            self.next()
            return Unify2(term, self.term())
        if nxt.kind == "punct" and nxt.text == "==":
            self.next()
            return StrictEq(term, self.term())
        return self._term_goal(term, t)

    def _term_goal(self, term: Term, tok: Token) -> BodyGoal:
        if isinstance(term, Var):
            raise SyntaxErrorWithPos("variable used as a goal", tok.line, tok.col)
        if term == Atom("true"):
            return TRUE
        if term == Atom("fail"):
            return FAIL
        if isinstance(term, Struct) and term.functor == "msw":
            if len(term.args) != 2:
                raise SyntaxErrorWithPos("msw takes exactly two arguments",
                                         tok.line, tok.col)
            return Msw(term.args[0], term.args[1])
        if isinstance(term, Int):
            raise SyntaxErrorWithPos("integer used as a goal", tok.line, tok.col)
        return Call(term)

    def _flatten_conj(self, x) -> tuple:
        if isinstance(x, tuple):
            out: list = []
            for g in x:
                if isinstance(g, _Arrow):
                    out.append(IfThenElse(g.cond, g.then, (FAIL,)))
                else:
                    out.append(g)
            return tuple(out)
        return (x,)

    # -- clauses ------------------------------------------------------------

    def clause(self) -> tuple[Term, tuple, int, int]:
        self.varmap = {}
        self.nvars = 0
        start = self.peek()
        head = self.term()
        if isinstance(head, (Var, Int)):
            raise SyntaxErrorWithPos("invalid clause head", start.line, start.col)
        body: tuple = ()
        if self.peek().kind == "punct" and self.peek().text == ":-":
            self.next()
            body = self.body()
        self.expect("end")
        return head, body, self.nvars, start.line


@dataclass
class _Arrow:
    cond: tuple
    then: tuple


def parse_term(text: str) -> Term:
    """Parse a single term (goals for queries, switch names, outcomes...)."""
    p = _Parser(tokenize(text))
    t = p.term()
    tok = p.peek()
    if tok.kind not in ("eof", "end"):
        raise SyntaxErrorWithPos(f"trailing input {tok.text!r}", tok.line, tok.col)
    return t


def parse_clause(text: str) -> Clause:
    """Parse a single clause ending with a dot."""
    p = _Parser(tokenize(text))
    head, body, nvars, line = p.clause()
    tok = p.peek()
    if tok.kind != "eof":
        raise SyntaxErrorWithPos(f"trailing input {tok.text!r}", tok.line, tok.col)
    return Clause(head, body, nvars, line)


def parse_program(source: str) -> Program:
    """Parse program text into a Program; `values/2` facts become switch
    declarations, everything else a clause."""
    p = _Parser(tokenize(source))
    clauses: list[Clause] = []
    decls: list[SwitchDecl] = []
    while p.peek().kind != "eof":
        head, body, nvars, line = p.clause()
        if isinstance(head, Struct) and head.functor == "values" and len(head.args) == 2:
            if body:
                raise ProgramError(f"values/2 must be a fact (line {line})")
            pattern, outs = head.args
            try:
                outcomes = tuple(list_items(outs))
            except ValueError:
                raise ProgramError(
                    f"values/2 outcomes must be a proper list (line {line})")
            decls.append(SwitchDecl(pattern, outcomes))
        else:
            clauses.append(Clause(head, body, nvars, line))
    return Program(clauses, decls)


# ---------------------------------------------------------------------------
# Writer
# ---------------------------------------------------------------------------

def _named_vars(nvars: int, order: list[int]) -> dict[int, Term]:
    # Stable readable names in order of first appearance: A, B, ..., Z, V26...
    mapping: dict[int, Term] = {}
    for i, vid in enumerate(order):
        name = chr(ord("A") + i) if i < 26 else f"V{i}"
        mapping[vid] = Atom("\x00" + name)  # marker: print bare, no quoting
    return mapping


def _t(t: Term) -> str:
    if isinstance(t, Atom) and t.name.startswith("\x00"):
        return t.name[1:]
    if isinstance(t, Struct):
        if t.functor == "." and len(t.args) == 2:
            parts = [_t(t.args[0])]
            rest = t.args[1]
            while isinstance(rest, Struct) and rest.functor == "." and len(rest.args) == 2:
                parts.append(_t(rest.args[0]))
                rest = rest.args[1]
            if rest == NIL:
                return "[" + ",".join(parts) + "]"
            return "[" + ",".join(parts) + "|" + _t(rest) + "]"
        return to_text(Atom(t.functor)) + "(" + ",".join(_t(a) for a in t.args) + ")"
    return to_text(t)


def goal_to_text(g: BodyGoal) -> str:
    if isinstance(g, Call):
        return _t(g.term)
    if isinstance(g, Msw):
        return f"msw({_t(g.switch)},{_t(g.outcome)})"
    if isinstance(g, Unify2):
        return f"{_t(g.left)} = {_t(g.right)}"
    if isinstance(g, StrictEq):
        return f"{_t(g.left)} == {_t(g.right)}"
    if isinstance(g, IfThenElse):
        cond = ", ".join(goal_to_text(x) for x in g.cond)
        then = ", ".join(goal_to_text(x) for x in g.then)
        if g.orelse == (FAIL,):
            return f"( {cond} -> {then} )"
        orelse = ", ".join(goal_to_text(x) for x in g.orelse)
        return f"( {cond} -> {then} ; {orelse} )"
    if isinstance(g, Disj):
        left = ", ".join(goal_to_text(x) for x in g.left)
        right = ", ".join(goal_to_text(x) for x in g.right)
        return f"( {left} ; {right} )"
    if isinstance(g, TrueGoal):
        return "true"
    return "fail"


def clause_to_text(c: Clause) -> str:
    from .program import map_goal_vars
    from .terms import map_vars
    order: list[int] = []
    for v in term_vars(c.head) + body_vars(c.body):
        if v not in order:
            order.append(v)
    mapping = _named_vars(c.nvars, order)
    head = map_vars(c.head, mapping)
    body = tuple(map_goal_vars(g, mapping) for g in c.body)
    if not body:
        return _t(head) + "."
    return _t(head) + " :- " + ", ".join(goal_to_text(g) for g in body) + "."


def program_to_text(program: Program) -> str:
    lines = []
    for d in program.switch_decls:
        order = term_vars(d.pattern)
        mapping = {vid: Atom("\x00_") for vid in order}
        from .terms import map_vars
        pat = map_vars(d.pattern, mapping)
        lines.append(f"values({_t(pat)},[{','.join(_t(o) for o in d.outcomes)}]).")
    for c in program.clauses:
        lines.append(clause_to_text(c))
    return "\n".join(lines) + "\n"
