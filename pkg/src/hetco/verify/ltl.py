"""LTL formulas, negation normal form and exact evaluation on lassos."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union


def _cached_hash(self) -> int:
    # formulas are deep trees hashed over and over during automaton construction
    h = self.__dict__.get("_hash")
    if h is None:
        h = hash((type(self).__name__,) + tuple(self.__dict__[k] for k in self.__dataclass_fields__))
        object.__setattr__(self, "_hash", h)
    return h


@dataclass(frozen=True)
class Prop:
    name: str

    __hash__ = _cached_hash

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Const:
    value: bool

    __hash__ = _cached_hash

    def __str__(self):
        return "true" if self.value else "false"


@dataclass(frozen=True)
class Not:
    arg: "Formula"

    __hash__ = _cached_hash

    def __str__(self):
        return f"!{_wrap(self.arg)}"


@dataclass(frozen=True)
class Next:
    arg: "Formula"

    __hash__ = _cached_hash

    def __str__(self):
        return f"X {_wrap(self.arg)}"


@dataclass(frozen=True)
class Eventually:
    arg: "Formula"

    __hash__ = _cached_hash

    def __str__(self):
        return f"F {_wrap(self.arg)}"


@dataclass(frozen=True)
class Always:
    arg: "Formula"

    __hash__ = _cached_hash

    def __str__(self):
        return f"G {_wrap(self.arg)}"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    __hash__ = _cached_hash

    def __str__(self):
        return f"({self.left} && {self.right})"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

    __hash__ = _cached_hash

    def __str__(self):
        return f"({self.left} || {self.right})"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"

    __hash__ = _cached_hash

    def __str__(self):
        return f"({self.left} -> {self.right})"


@dataclass(frozen=True)
class Until:
    left: "Formula"
    right: "Formula"

    __hash__ = _cached_hash

    def __str__(self):
        return f"({self.left} U {self.right})"


@dataclass(frozen=True)
class Release:
    left: "Formula"
    right: "Formula"

    __hash__ = _cached_hash

    def __str__(self):
        return f"({self.left} R {self.right})"


Formula = Union[Prop, Const, Not, Next, Eventually, Always, And, Or, Implies, Until, Release]

TRUE = Const(True)
FALSE = Const(False)


def _wrap(f) -> str:
    s = str(f)
    if isinstance(f, (Prop, Const)) or s.startswith("("):
        return s
    return f"({s})"


def atoms(f: Formula) -> frozenset[str]:
    if isinstance(f, Prop):
        return frozenset([f.name])
    if isinstance(f, Const):
        return frozenset()
    if isinstance(f, (Not, Next, Eventually, Always)):
        return atoms(f.arg)
    return atoms(f.left) | atoms(f.right)


def is_temporal(f: Formula) -> bool:
    if isinstance(f, (Prop, Const)):
        return False
    if isinstance(f, (Next, Eventually, Always, Until, Release)):
        return True
    if isinstance(f, Not):
        return is_temporal(f.arg)
    return is_temporal(f.left) or is_temporal(f.right)


def nnf(f: Formula, negate: bool = False) -> Formula:
    """Negation normal form over ``Prop``, ``Not(Prop)``, ``Const``, ``And``, ``Or``, ``Next``, ``Until``, ``Release``.

    ``F a`` becomes ``true U a`` and ``G a`` becomes ``false R a``.
    """
    if isinstance(f, Prop):
        return Not(f) if negate else f
    if isinstance(f, Const):
        return Const(f.value != negate)
    if isinstance(f, Not):
        return nnf(f.arg, not negate)
    if isinstance(f, Next):
        return Next(nnf(f.arg, negate))
    if isinstance(f, Eventually):
        return nnf(Until(TRUE, f.arg), negate)
    if isinstance(f, Always):
        return nnf(Release(FALSE, f.arg), negate)
    if isinstance(f, Implies):
        return nnf(Or(Not(f.left), f.right), negate)
    if isinstance(f, And):
        cls = Or if negate else And
        return cls(nnf(f.left, negate), nnf(f.right, negate))
    if isinstance(f, Or):
        cls = And if negate else Or
        return cls(nnf(f.left, negate), nnf(f.right, negate))
    if isinstance(f, Until):
        cls = Release if negate else Until
        return cls(nnf(f.left, negate), nnf(f.right, negate))
    if isinstance(f, Release):
        cls = Until if negate else Release
        return cls(nnf(f.left, negate), nnf(f.right, negate))
    raise TypeError(f"not a formula: {f!r}")


def eval_on_lasso(prefix: list, cycle: list, f: Formula) -> bool:
    """Truth of ``f`` at position 0 of the word ``prefix · cycle^ω``.

    Letters are sets of true proposition names. Each position of the finite
    lasso has exactly one successor, so ``U`` is the least and ``R`` the
    greatest fixpoint of its one-step unfolding over those positions.
    """
    if not cycle:
        raise ValueError("a lasso needs a non-empty cycle")
    letters = [frozenset(x) for x in prefix] + [frozenset(x) for x in cycle]
    n = len(letters)
    succ = [i + 1 for i in range(n - 1)] + [len(prefix)]
    memo: dict = {}

    def val(g) -> list:
        if g in memo:
            return memo[g]
        if isinstance(g, Prop):
            r = [g.name in letters[i] for i in range(n)]
        elif isinstance(g, Const):
            r = [g.value] * n
        elif isinstance(g, Not):
            r = [not x for x in val(g.arg)]
        elif isinstance(g, And):
            a, b = val(g.left), val(g.right)
            r = [x and y for x, y in zip(a, b)]
        elif isinstance(g, Or):
            a, b = val(g.left), val(g.right)
            r = [x or y for x, y in zip(a, b)]
        elif isinstance(g, Implies):
            a, b = val(g.left), val(g.right)
            r = [(not x) or y for x, y in zip(a, b)]
        elif isinstance(g, Next):
            a = val(g.arg)
            r = [a[succ[i]] for i in range(n)]
        elif isinstance(g, (Until, Eventually)):
            a = [True] * n if isinstance(g, Eventually) else val(g.left)
            b = val(g.arg if isinstance(g, Eventually) else g.right)
            r = [False] * n
            changed = True
            while changed:
                changed = False
                for i in range(n):
                    v = b[i] or (a[i] and r[succ[i]])
                    if v != r[i]:
                        r[i] = v
                        changed = True
        elif isinstance(g, (Release, Always)):
            a = [False] * n if isinstance(g, Always) else val(g.left)
            b = val(g.arg if isinstance(g, Always) else g.right)
            r = [True] * n
            changed = True
            while changed:
                changed = False
                for i in range(n):
                    v = b[i] and (a[i] or r[succ[i]])
                    if v != r[i]:
                        r[i] = v
                        changed = True
        else:
            raise TypeError(f"not a formula: {g!r}")
        memo[g] = r
        return r

    return val(f)[0]


def conj(fs: Iterable[Formula]) -> Formula:
    out = None
    for f in fs:
        out = f if out is None else And(out, f)
    return TRUE if out is None else out
