"""First-order terms: variables, atoms, integers, compounds.

Terms are immutable and hashable, so they can key tables and parameter maps
directly.  Variables are plain integer ids; clause-local ids are renamed apart
by offsetting against a solver-wide counter.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator


@dataclass(frozen=True, slots=True)
class Var:
    id: int

    def __repr__(self):
        return f"_{self.id}"


@dataclass(frozen=True, slots=True)
class Atom:
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True, slots=True)
class Int:
    value: int

    def __repr__(self):
        return str(self.value)


class Struct:
    """Compound term functor(args...). Hash is cached: structs key tables."""

    __slots__ = ("functor", "args", "_hash")

    def __init__(self, functor: str, args: tuple):
        self.functor = functor
        self.args = args
        self._hash = hash((functor,) + args)

    def __eq__(self, other):
        return (
            type(other) is Struct
            and self._hash == other._hash
            and self.functor == other.functor
            and self.args == other.args
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return to_text(self)


Term = Var | Atom | Int | Struct

NIL = Atom("[]")
TRUE_ATOM = Atom("true")


def struct(functor: str, *args: Term) -> Struct:
    return Struct(functor, tuple(args))


def atom(name: str) -> Atom:
    return Atom(name)


def cons(head: Term, tail: Term) -> Struct:
    return Struct(".", (head, tail))


def make_list(items, tail: Term = NIL) -> Term:
    out = tail
    for x in reversed(list(items)):
        out = cons(x, out)
    return out


def list_items(t: Term) -> list[Term]:
    """Return the elements of a proper list term; raise on anything else."""
    items = []
    while True:
        if t == NIL:
            return items
        if isinstance(t, Struct) and t.functor == "." and len(t.args) == 2:
            items.append(t.args[0])
            t = t.args[1]
        else:
            raise ValueError(f"not a proper list: {t!r}")


def is_list(t: Term) -> bool:
    while isinstance(t, Struct) and t.functor == "." and len(t.args) == 2:
        t = t.args[1]
    return t == NIL


def is_ground(t: Term) -> bool:
    if isinstance(t, Var):
        return False
    if isinstance(t, Struct):
        return all(is_ground(a) for a in t.args)
    return True


def term_vars(t: Term) -> list[int]:
    """Variable ids in order of first appearance."""
    seen: dict[int, None] = {}
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, Var):
            seen.setdefault(x.id, None)
        elif isinstance(x, Struct):
            stack.extend(reversed(x.args))
    return list(seen)


def offset_vars(t: Term, base: int) -> Term:
    """Rename apart: shift every variable id by `base`."""
    if isinstance(x := t, Var):
        return Var(x.id + base)
    if isinstance(t, Struct):
        return Struct(t.functor, tuple(offset_vars(a, base) for a in t.args))
    return t


def map_vars(t: Term, mapping: dict[int, Term]) -> Term:
    if isinstance(t, Var):
        return mapping.get(t.id, t)
    if isinstance(t, Struct):
        return Struct(t.functor, tuple(map_vars(a, mapping) for a in t.args))
    return t


def canonical(t: Term, numbering: dict[int, int] | None = None) -> object:
    """Hashable key identifying `t` up to variable renaming (variant key)."""
    if numbering is None:
        numbering = {}

    def walk(x):
        if isinstance(x, Var):
            return ("v", numbering.setdefault(x.id, len(numbering)))
        if isinstance(x, Atom):
            return ("a", x.name)
        if isinstance(x, Int):
            return ("i", x.value)
        return ("s", x.functor, tuple(walk(a) for a in x.args))

    return walk(t)


def alpha_equivalent(t1: Term, t2: Term) -> bool:
    return canonical(t1) == canonical(t2)


class Bindings:
    """Triangular substitution with a trail for backtracking.

    `ops` counts unification operations (one per term pair visited by
    `unify`); the solver reads it as its resolution-step meter.
    """

    __slots__ = ("map", "trail", "ops")

    def __init__(self):
        self.map: dict[int, Term] = {}
        self.trail: list[int] = []
        self.ops = 0

    def walk(self, t: Term) -> Term:
        while isinstance(t, Var):
            b = self.map.get(t.id)
            if b is None:
                return t
            t = b
        return t

    def bind(self, vid: int, t: Term) -> None:
        self.map[vid] = t
        self.trail.append(vid)

    def mark(self) -> int:
        return len(self.trail)

    def undo_to(self, mark: int) -> None:
        while len(self.trail) > mark:
            del self.map[self.trail.pop()]

    def occurs(self, vid: int, t: Term) -> bool:
        t = self.walk(t)
        if isinstance(t, Var):
            return t.id == vid
        if isinstance(t, Struct):
            return any(self.occurs(vid, a) for a in t.args)
        return False

    def unify(self, a: Term, b: Term, occurs_check: bool = True) -> bool:
        a = self.walk(a)
        b = self.walk(b)
        self.ops += 1
        if isinstance(a, Var):
            if isinstance(b, Var) and a.id == b.id:
                return True
            if occurs_check and self.occurs(a.id, b):
                return False
            self.bind(a.id, b)
            return True
        if isinstance(b, Var):
            if occurs_check and self.occurs(b.id, a):
                return False
            self.bind(b.id, a)
            return True
        if isinstance(a, Atom):
            return isinstance(b, Atom) and a.name == b.name
        if isinstance(a, Int):
            return isinstance(b, Int) and a.value == b.value
        if isinstance(b, Struct) and a.functor == b.functor and len(a.args) == len(b.args):
            return all(self.unify(x, y, occurs_check) for x, y in zip(a.args, b.args))
        return False

    def resolve(self, t: Term) -> Term:
        """Deep-apply the current substitution."""
        t = self.walk(t)
        if isinstance(t, Struct):
            return Struct(t.functor, tuple(self.resolve(a) for a in t.args))
        return t


def unify(t1: Term, t2: Term, binding: dict[int, Term] | None = None,
          occurs_check: bool = True) -> dict[int, Term] | None:
    """Functional unification: returns an extended substitution or None."""
    b = Bindings()
    if binding:
        b.map.update(binding)
    if b.unify(t1, t2, occurs_check=occurs_check):
        return dict(b.map)
    return None


def apply_subst(t: Term, binding: dict[int, Term]) -> Term:
    b = Bindings()
    b.map.update(binding)
    return b.resolve(t)


_UNQUOTED = re.compile(r"[a-z][A-Za-z0-9_]*\Z|[\[\]]{2}\Z|\.\Z")


def _atom_text(name: str) -> str:
    if _UNQUOTED.match(name) or name == "[]":
        return name
    return "'" + name.replace("\\", "\\\\").replace("'", "\\'") + "'"


def to_text(t: Term) -> str:
    """Canonical text form; round-trips through the program parser."""
    if isinstance(t, Var):
        return f"_G{t.id}"
    if isinstance(t, Atom):
        return _atom_text(t.name)
    if isinstance(t, Int):
        return str(t.value)
    if t.functor == "." and len(t.args) == 2:
        parts = [to_text(t.args[0])]
        rest = t.args[1]
        while isinstance(rest, Struct) and rest.functor == "." and len(rest.args) == 2:
            parts.append(to_text(rest.args[0]))
            rest = rest.args[1]
        if rest == NIL:
            return "[" + ",".join(parts) + "]"
        return "[" + ",".join(parts) + "|" + to_text(rest) + "]"
    return _atom_text(t.functor) + "(" + ",".join(to_text(a) for a in t.args) + ")"
