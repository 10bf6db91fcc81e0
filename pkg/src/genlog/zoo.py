"""Bundled model generators and data encoders.

Five program families are generated from declarative descriptions: naive
Bayes and Bayesian-network classifiers from a tabular schema, a linear-chain
labeling model from state/vocabulary lists, and a top-down plus a left-corner
parser from a context-free grammar.  Each family has a complete-goal form
(with labels) and an incomplete-goal form (observation only), so the same
generated text runs in probability mode or weight mode.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from typing import Optional

from .program import Program
from .parser import parse_program, parse_term
from .terms import Atom, Struct, Term, make_list, to_text
from .terms import _atom_text as atom_text


class ZooError(Exception):
    pass


# ---------------------------------------------------------------------------
# Tabular models
# ---------------------------------------------------------------------------

@dataclass
class TabularSchema:
    class_name: str
    class_values: list
    attributes: list            # of (name, values)
    parent_map: dict = field(default_factory=dict)   # attr -> list of parents

    def __post_init__(self):
        names = [n for n, _ in self.attributes]
        if len(set(names)) != len(names) or self.class_name in names:
            raise ZooError("duplicate attribute names")
        seen = {self.class_name}
        for n, _ in self.attributes:
            for p in self.parent_map.get(n, []):
                if p not in seen:
                    raise ZooError(
                        f"parent {p} of {n} is not the class or an earlier "
                        "attribute")
            seen.add(n)

    def attr_values(self, name: str) -> list:
        for n, vs in self.attributes:
            if n == name:
                return vs
        raise KeyError(name)


def _var_names(schema: TabularSchema) -> dict:
    """attribute/class -> clause variable name, first letter uppercased."""
    out = {}
    used = set()
    for n in [schema.class_name] + [a for a, _ in schema.attributes]:
        v = n[0].upper()
        k = 2
        while v in used:
            v = n[0].upper() + str(k)
            k += 1
        used.add(v)
        out[n] = v
    return out


def generate_tabular_program(schema: TabularSchema, structure: str) -> str:
    if structure not in ("naive_bayes", "bnc"):
        raise ZooError(f"unknown structure {structure!r}")
    if structure == "naive_bayes" and schema.parent_map:
        raise ZooError("naive_bayes takes no parent map")
    vn = _var_names(schema)
    c = vn[schema.class_name]
    lines = ["values(%s,[%s])." % (schema.class_name,
                                   ",".join(map(atom_text, schema.class_values)))]
    for n, vs in schema.attributes:
        lines.append("values(attr(%s,_),[%s])." % (n, ",".join(map(atom_text, vs))))
    lines.append("")
    attr_list = "[" + ",".join(vn[n] for n, _ in schema.attributes) + "]"
    if structure == "naive_bayes":
        body = [f"msw({schema.class_name},{c})"]
        body += [f"msw(attr({n},{c}),{vn[n]})" for n, _ in schema.attributes]
        lines.append(f"nb({attr_list},{c}):-")
        lines += [f"    {g}{',' if i + 1 < len(body) else '.'}"
                  for i, g in enumerate(body)]
        lines.append(f"nb({attr_list}):- nb({attr_list},_).")
    else:
        lines.append("bn(Attrs):- bn(Attrs,_).")
        lines.append(f"bn(Attrs,{c}):-")
        lines.append(f"   Attrs = {attr_list},")
        body = [f"msw({schema.class_name},{c})"]
        for n, _ in schema.attributes:
            parents = schema.parent_map.get(n, [schema.class_name])
            pvars = ",".join(vn[p] for p in parents)
            body.append(f"msw(attr({n},[{pvars}]),{vn[n]})")
        lines.append("   " + ", ".join(body) + ".")
    return "\n".join(lines) + "\n"


def encode_tabular(schema: TabularSchema, row: list, with_class: bool,
                   structure: str = "naive_bayes") -> Term:
    pred = "nb" if structure == "naive_bayes" else "bn"
    if with_class:
        attrs, cls = row[:-1], row[-1]
        if cls not in schema.class_values:
            raise ZooError(f"class value {cls!r} not declared")
    else:
        attrs = row
    if len(attrs) != len(schema.attributes):
        raise ZooError(f"expected {len(schema.attributes)} attribute values")
    for v, (n, vs) in zip(attrs, schema.attributes):
        if v not in vs:
            raise ZooError(f"value {v!r} out of domain for attribute {n}")
    lst = make_list([Atom(v) for v in attrs])
    if with_class:
        return Struct(pred, (lst, Atom(cls)))
    return Struct(pred, (lst,))


def read_schema(path: str) -> TabularSchema:
    """First `name: v1,...` line is the class; the rest declare attributes in
    order; `parents(name) = p1,p2` lines give the network structure."""
    class_name = None
    class_values: list = []
    attributes: list = []
    parent_map: dict = {}
    with open(path) as f:
        for raw in f:
            line = raw.split("%")[0].strip()
            if not line:
                continue
            m = re.match(r"parents\((\w+)\)\s*=\s*(.*)$", line)
            if m:
                parent_map[m.group(1)] = [x.strip() for x in
                                          m.group(2).split(",") if x.strip()]
                continue
            m = re.match(r"(\w+)\s*:\s*(.*)$", line)
            if not m:
                raise ZooError(f"{path}: bad schema line {line!r}")
            name = m.group(1)
            vals = [x.strip() for x in m.group(2).split(",") if x.strip()]
            if class_name is None:
                class_name, class_values = name, vals
            else:
                attributes.append((name, vals))
    if class_name is None:
        raise ZooError(f"{path}: empty schema")
    return TabularSchema(class_name, class_values, attributes, parent_map)


def read_csv_rows(path: str, schema: TabularSchema) -> list:
    """Rows ordered as schema attributes then class, matched by header name."""
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        want = [n for n, _ in schema.attributes] + [schema.class_name]
        try:
            cols = [header.index(h) for h in want]
        except ValueError as e:
            raise ZooError(f"{path}: missing column ({e})")
        return [[r[c] for c in cols] for r in reader if r]


# ---------------------------------------------------------------------------
# Linear-chain labeling
# ---------------------------------------------------------------------------

def generate_hmm_program(states: list, vocabulary: list) -> str:
    if not states or not vocabulary:
        raise ZooError("states and vocabulary must be nonempty")
    return f"""\
values(init,[{','.join(states)}]).
values(tr(_),[{','.join(states)}]).
values(out(_),[{','.join(vocabulary)}]).

hmm0([X0|Xs],[Y0|Ys]):- msw(init,Y0),msw(out(Y0),X0),hmm1(Y0,Xs,Ys).
hmm1(_,[],[]).
hmm1(Y0,[X|Xs],[Y|Ys]):- msw(tr(Y0),Y),msw(out(Y),X),hmm1(Y,Xs,Ys).

hmm0([X|Xs]):- msw(init,Y0),msw(out(Y0),X),hmm1(Y0,Xs).
hmm1(_,[]).
hmm1(Y0,[X|Xs]):- msw(tr(Y0),Y),msw(out(Y),X),hmm1(Y,Xs).
"""


def encode_sequence(tokens: list, labels: Optional[list] = None) -> Term:
    if not tokens:
        raise ZooError("empty sequence")
    xs = make_list([Atom(t) for t in tokens])
    if labels is None:
        return Struct("hmm0", (xs,))
    if len(labels) != len(tokens):
        raise ZooError(f"{len(tokens)} tokens but {len(labels)} labels")
    return Struct("hmm0", (xs, make_list([Atom(y) for y in labels])))


def read_sequences(path: str) -> list:
    """Records of (tokens, labels-or-None); one or two tab-separated lines per
    record, records separated by blank lines."""
    records = []
    block: list = []
    with open(path) as f:
        for raw in list(f) + [""]:
            line = raw.rstrip("\n")
            if line.strip():
                block.append(line.split("\t"))
                continue
            if not block:
                continue
            if len(block) == 1:
                records.append((block[0], None))
            elif len(block) == 2:
                records.append((block[0], block[1]))
            else:
                raise ZooError(f"{path}: record with {len(block)} lines")
            block = []
    return records


# ---------------------------------------------------------------------------
# Context-free grammars
# ---------------------------------------------------------------------------

@dataclass
class Grammar:
    start: str
    rules: list                 # of (lhs, tuple of rhs symbols)
    terminals: set

    def __post_init__(self):
        self.nonterminals = []
        for lhs, _ in self.rules:
            if lhs not in self.nonterminals:
                self.nonterminals.append(lhs)
        if self.start not in self.nonterminals:
            raise ZooError(f"start symbol {self.start} has no rules")
        for lhs, rhs in self.rules:
            if lhs in self.terminals:
                raise ZooError(f"terminal {lhs} on a left-hand side")
            if not rhs:
                raise ZooError(f"empty right-hand side for {lhs}")
            for s in rhs:
                if s not in self.terminals and s not in self.nonterminals:
                    raise ZooError(f"undefined symbol {s} in a rule for {lhs}")
        self._reject_unary_cycles()
        if not self._productive():
            raise ZooError("start symbol derives no terminal string")

    def _reject_unary_cycles(self):
        edges = {(l, r[0]) for l, r in self.rules
                 if len(r) == 1 and r[0] in self.nonterminals}
        reach = set(edges)
        changed = True
        while changed:
            changed = False
            for a, b in list(reach):
                for c, d in edges:
                    if b == c and (a, d) not in reach:
                        reach.add((a, d))
                        changed = True
        for n in self.nonterminals:
            if (n, n) in reach:
                raise ZooError(f"unary rule cycle through {n}")

    def _productive(self) -> bool:
        prod = set(self.terminals)
        changed = True
        while changed:
            changed = False
            for lhs, rhs in self.rules:
                if lhs not in prod and all(s in prod for s in rhs):
                    prod.add(lhs)
                    changed = True
        return self.start in prod

    def rules_for(self, nt: str) -> list:
        return [(l, r) for l, r in self.rules if l == nt]


def read_grammar(path: str) -> Grammar:
    start = None
    rules = []
    symbols: set = set()
    lhss: set = set()
    with open(path) as f:
        for raw in f:
            line = raw.split("%")[0].strip()
            if not line:
                continue
            m = re.match(r"start\s*:\s*(\w+)$", line)
            if m:
                start = m.group(1)
                continue
            m = re.match(r"(\w+)\s*->\s*(.+)$", line)
            if not m:
                raise ZooError(f"{path}: bad grammar line {line!r}")
            lhs = m.group(1)
            rhs = tuple(m.group(2).split())
            rules.append((lhs, rhs))
            lhss.add(lhs)
            symbols.add(lhs)
            symbols.update(rhs)
    if start is None:
        raise ZooError(f"{path}: missing start line")
    return Grammar(start, rules, symbols - lhss)


def _rule_term(lhs: str, rhs: tuple) -> str:
    return f"rule({lhs},[{','.join(rhs)}])"


def _left_corner_closure(g: Grammar) -> set:
    """Reflexive-transitive closure of {(A, B) : A -> B ... in rules}."""
    symbols = set(g.nonterminals) | g.terminals
    reach = {(s, s) for s in symbols}
    reach |= {(l, r[0]) for l, r in g.rules}
    changed = True
    while changed:
        changed = False
        snapshot = list(reach)
        for a, b in snapshot:
            for c, d in snapshot:
                if b == c and (a, d) not in reach:
                    reach.add((a, d))
                    changed = True
    return reach


def _first_terminals(g: Grammar, closure: set) -> dict:
    return {nt: [t for t in sorted(g.terminals) if (nt, t) in closure]
            for nt in g.nonterminals}


def generate_cfg_programs(grammar: Grammar) -> tuple[str, str]:
    """(top-down parser text, left-corner parser text)."""
    g = grammar
    decls = [f"values({nt},[" +
             ",".join(_rule_term(l, r) for l, r in g.rules_for(nt)) + "])."
             for nt in g.nonterminals]
    facts = [f"terminal({t})." for t in sorted(g.terminals)]
    facts.append(f"start_symbol({g.start}).")

    topdown = "\n".join(decls + [""] + facts) + """

parse(L0,T):- start_symbol(C), tree(C,T,L0).
parse(L0):- start_symbol(C), sent(C,L0).

tree(A,t(A,Ts),L):- msw(A,rule(A,RHS)), trees(RHS,Ts,L).
trees([],[],[]).
trees([X|Xs],[T|Ts],L):-
   front(L,L1,L2), lenok(Xs,L2),
   ( terminal(X) -> T = X, L1 = [X] ; tree(X,T,L1) ),
   trees(Xs,Ts,L2).

sent(A,L):- msw(A,rule(A,RHS)), seq(RHS,L).
seq([],[]).
seq([X|Xs],L):-
   front(L,L1,L2), lenok(Xs,L2),
   ( terminal(X) -> L1 = [X] ; sent(X,L1) ),
   seq(Xs,L2).

front([X|L],[X],L).
front([X|L],[X|L1],L2):- front(L,L1,L2).
lenok([],_).
lenok([_|Xs],[_|L]):- lenok(Xs,L).
"""

    closure = _left_corner_closure(g)
    lc_decls = []
    for nt in g.nonterminals:
        firsts = _first_terminals(g, closure)[nt]
        if firsts:
            lc_decls.append(f"values(first({nt}),[{','.join(firsts)}]).")
    for gsym in g.nonterminals:
        for b in sorted(set(g.nonterminals) | g.terminals):
            outs = [_rule_term(l, r) for l, r in g.rules
                    if r[0] == b and (gsym, l) in closure]
            if outs:
                lc_decls.append(f"values(lc({gsym},{b}),[{','.join(outs)}]).")
    for nt in g.nonterminals:
        lc_decls.append(f"values(attach({nt}),[attach,project]).")
    lc_facts = [f"reachable({a},{b})."
                for a, b in sorted(closure)]
    lc_facts += [f"terminal({t})." for t in sorted(g.terminals)]
    lc_facts.append(f"start_symbol({g.start}).")

    leftcorner = "\n".join(lc_decls + [""] + lc_facts) + """

plcg(L0):-
   start_symbol(C),
   g_call([C],L0,[]).

g_call([],L,L).
g_call([G|R],[Wd|L],L2):-
   ( terminal(G) ->
         G = Wd, L1 = L
   ; msw(first(G),Wd),
        lc_call(G,Wd,L,L1) ),
   g_call(R,L1,L2).

lc_call(G,B,L,L2):-
   msw(lc(G,B),rule(A,[B|RHS2])),
   g_call(RHS2,L,L1),
   ( G == A -> attach_or_project(A,Op),
       ( Op == attach, L2=L1
       ; Op == project, lc_call(G,A,L1,L2) )
   ; lc_call(G,A,L1,L2) ).
attach_or_project(A,Op):-
   ( reachable(A,A) -> msw(attach(A),Op) ; Op = attach ).

plcg(L0,T):-
   start_symbol(C),
   g_call_t([C],L0,[],[T]).

g_call_t([],L,L,[]).
g_call_t([G|R],[Wd|L],L2,T):-
   ( terminal(G) ->
         G = Wd, L1 = L, T = [Wd|TR]
   ; msw(first(G),Wd), T = [TG|TR],
        lc_call_t(G,Wd,L,L1,Wd,TG) ),
   g_call_t(R,L1,L2,TR).

lc_call_t(G,B,L,L2,TB,TG):-
   msw(lc(G,B),rule(A,[B|RHS2])),
   g_call_t(RHS2,L,L1,TR),
   TA = t(A,[TB|TR]),
   ( G == A -> attach_or_project(A,Op),
       ( Op == attach, L2=L1, TG = TA
       ; Op == project, lc_call_t(G,A,L1,L2,TA,TG) )
   ; lc_call_t(G,A,L1,L2,TA,TG) ).
"""
    return topdown, leftcorner


# -- trees -------------------------------------------------------------------

def parse_bracketed_tree(text: str):
    """(S (NP a) b) -> nested ('S', [child...]) with terminal leaves as str."""
    tokens = re.findall(r"\(|\)|[^\s()]+", text)
    pos = 0

    def node():
        nonlocal pos
        if pos >= len(tokens):
            raise ZooError("unbalanced tree text")
        tok = tokens[pos]
        pos += 1
        if tok == "(":
            if pos >= len(tokens):
                raise ZooError("unbalanced tree text")
            label = tokens[pos]
            pos += 1
            children = []
            while pos < len(tokens) and tokens[pos] != ")":
                children.append(node())
            if pos >= len(tokens):
                raise ZooError("unbalanced tree text")
            pos += 1
            if not children:
                raise ZooError(f"empty constituent {label}")
            return (label, children)
        if tok == ")":
            raise ZooError("unbalanced tree text")
        return tok

    t = node()
    if pos != len(tokens):
        raise ZooError("trailing tokens after tree")
    if isinstance(t, str):
        raise ZooError("tree root must be a constituent")
    return t


def tree_leaves(tree) -> list:
    if isinstance(tree, str):
        return [tree]
    out = []
    for c in tree[1]:
        out.extend(tree_leaves(c))
    return out


def _tree_term(tree) -> Term:
    if isinstance(tree, str):
        return Atom(tree)
    label, children = tree
    return Struct("t", (Atom(label), make_list([_tree_term(c) for c in children])))


def tree_to_text(t: Term) -> str:
    """Inverse of parse_bracketed_tree on term-encoded trees."""
    from .terms import list_items
    if isinstance(t, Atom):
        return t.name
    assert isinstance(t, Struct) and t.functor == "t"
    label = t.args[0].name
    kids = " ".join(tree_to_text(c) for c in list_items(t.args[1]))
    return f"({label} {kids})"


def _check_tree_rules(grammar: Grammar, tree) -> None:
    if isinstance(tree, str):
        if tree not in grammar.terminals:
            raise ZooError(f"unknown terminal {tree}")
        return
    label, children = tree
    rhs = tuple(c if isinstance(c, str) else c[0] for c in children)
    if (label, rhs) not in grammar.rules:
        raise ZooError(f"tree uses undeclared rule {label} -> {' '.join(rhs)}")
    for c in children:
        _check_tree_rules(grammar, c)


def encode_tree(grammar: Grammar, tree) -> tuple[Term, Term, Term]:
    """(top-down complete goal, left-corner complete goal, sentence goal)."""
    if isinstance(tree, str):
        tree = parse_bracketed_tree(tree)
    _check_tree_rules(grammar, tree)
    sent = make_list([Atom(w) for w in tree_leaves(tree)])
    tt = _tree_term(tree)
    return (Struct("parse", (sent, tt)),
            Struct("plcg", (sent, tt)),
            Struct("parse", (sent,)))


def encode_sentence(tokens: list, leftcorner: bool = False) -> Term:
    xs = make_list([Atom(t) for t in tokens])
    return Struct("plcg" if leftcorner else "parse", (xs,))


def read_trees(path: str) -> list:
    out = []
    with open(path) as f:
        for line in f:
            if line.strip():
                out.append(parse_bracketed_tree(line.strip()))
    return out
