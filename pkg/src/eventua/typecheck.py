"""Simple types for terms and formulas.

Individual-level judgments use ``SortV`` (individuals), ``Two`` (truth
values), products and arrows.  :func:`lift` maps a judgment to the intension
level by indexing every base sort over the events, so a binary predicate
``(V x V) -> 2`` becomes ``(V^I x V^I) -> 2^I``.

Signatures may contain type variables; :func:`solve` unifies them against the
use sites and returns the solved signature.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Union

from .errors import TypeMismatch, UnknownName
from .syntax import (
    App,
    Cmp,
    Const,
    Eq,
    Exist,
    FnRef,
    Iota,
    IotaActual,
    Not,
    And,
    Or,
    Pair,
    Pred,
    QUANTIFIERS,
    Restrict,
    TERM_TYPES,
    Var,
)


@dataclass(frozen=True)
class SortV:
    def __str__(self):
        return "V"


@dataclass(frozen=True)
class Two:
    def __str__(self):
        return "2"


@dataclass(frozen=True)
class Prod:
    left: "TypeExpr"
    right: "TypeExpr"

    def __str__(self):
        return f"({self.left} x {self.right})"


@dataclass(frozen=True)
class Arrow:
    dom: "TypeExpr"
    cod: "TypeExpr"

    def __str__(self):
        return f"({self.dom} -> {self.cod})"


@dataclass(frozen=True)
class Indexed:
    base: "TypeExpr"

    def __str__(self):
        return f"{self.base}^I"


@dataclass(frozen=True)
class TVar:
    name: str

    def __str__(self):
        return self.name


TypeExpr = Union[SortV, Two, Prod, Arrow, Indexed, TVar]

V = SortV()
TWO = Two()


def product(types) -> TypeExpr:
    """Right-nested product of one or more types."""
    types = list(types)
    out = types[-1]
    for t in reversed(types[:-1]):
        out = Prod(t, out)
    return out


def lift(t: TypeExpr) -> TypeExpr:
    if isinstance(t, (SortV, Two)):
        return Indexed(t)
    if isinstance(t, Prod):
        return Prod(lift(t.left), lift(t.right))
    if isinstance(t, Arrow):
        return Arrow(lift(t.dom), lift(t.cod))
    return t


class _Unifier:
    def __init__(self):
        self.subst: dict[str, TypeExpr] = {}
        self._fresh = itertools.count()

    def fresh(self) -> TVar:
        return TVar(f"_t{next(self._fresh)}")

    def resolve(self, t):
        while isinstance(t, TVar) and t.name in self.subst:
            t = self.subst[t.name]
        if isinstance(t, Prod):
            return Prod(self.resolve(t.left), self.resolve(t.right))
        if isinstance(t, Arrow):
            return Arrow(self.resolve(t.dom), self.resolve(t.cod))
        if isinstance(t, Indexed):
            return Indexed(self.resolve(t.base))
        return t

    def unify(self, a, b, what):
        a, b = self.resolve(a), self.resolve(b)
        if a == b:
            return
        if isinstance(a, TVar):
            self._bind(a, b, what)
        elif isinstance(b, TVar):
            self._bind(b, a, what)
        elif type(a) is type(b) and isinstance(a, (Prod, Arrow, Indexed)):
            if isinstance(a, Prod):
                self.unify(a.left, b.left, what)
                self.unify(a.right, b.right, what)
            elif isinstance(a, Arrow):
                self.unify(a.dom, b.dom, what)
                self.unify(a.cod, b.cod, what)
            else:
                self.unify(a.base, b.base, what)
        else:
            raise TypeMismatch(f"{what}: expected {b}, found {a}")

    def _bind(self, var, t, what):
        if _occurs(var.name, t):
            raise TypeMismatch(f"{what}: cyclic type {var} = {t}")
        self.subst[var.name] = t


def _occurs(name, t) -> bool:
    if isinstance(t, TVar):
        return t.name == name
    if isinstance(t, Prod):
        return _occurs(name, t.left) or _occurs(name, t.right)
    if isinstance(t, Arrow):
        return _occurs(name, t.dom) or _occurs(name, t.cod)
    if isinstance(t, Indexed):
        return _occurs(name, t.base)
    return False


class _Checker:
    def __init__(self, signature):
        self.signature = signature
        self.u = _Unifier()

    def lookup(self, name):
        try:
            return self.signature[name]
        except KeyError:
            raise UnknownName(f"{name} is not in the signature") from None

    def term(self, t):
        if isinstance(t, (Var, Const)):
            return V
        if isinstance(t, Pair):
            return Prod(self.term(t.left), self.term(t.right))
        if isinstance(t, App):
            if isinstance(t.fn, FnRef):
                fn_type = self.u.resolve(self.lookup(t.fn.name))
                label = t.fn.name
            else:
                fn_type = self.u.resolve(self.term(t.fn))
                label = "application head"
            arg_type = self.term(t.arg)
            if isinstance(fn_type, TVar):
                result = self.u.fresh()
                self.u.unify(fn_type, Arrow(arg_type, result), label)
                return result
            if not isinstance(fn_type, Arrow):
                raise TypeMismatch(f"{label} has non-function type {fn_type}")
            self.u.unify(arg_type, fn_type.dom, f"argument of {label}")
            return fn_type.cod
        if isinstance(t, FnRef):
            return self.lookup(t.name)
        if isinstance(t, (Iota, IotaActual)):
            self.u.unify(self.formula(t.body), TWO, "description body")
            return V
        if isinstance(t, Restrict):
            self.u.unify(self.formula(t.guard), TWO, "restriction guard")
            return self.term(t.term)
        raise TypeError(f"not a term: {t!r}")

    def formula(self, f):
        if isinstance(f, Pred):
            rel_type = self.lookup(f.name)
            arg_type = product(self.term(a) for a in f.args)
            self.u.unify(rel_type, Arrow(arg_type, TWO), f"predicate {f.name}")
            return TWO
        if isinstance(f, (Eq, Cmp)):
            left, right = self.term(f.left), self.term(f.right)
            self.u.unify(right, left, "comparison operands")
            if isinstance(f, Cmp) and f.op.ordering:
                self.u.unify(left, V, "ordered comparison")
            return TWO
        if isinstance(f, Exist):
            self.u.unify(self.term(f.term), V, "existence predicate")
            return TWO
        if isinstance(f, Not):
            self.u.unify(self.formula(f.body), TWO, "negation")
            return TWO
        if isinstance(f, (And, Or)):
            self.u.unify(self.formula(f.left), TWO, "connective")
            self.u.unify(self.formula(f.right), TWO, "connective")
            return TWO
        if isinstance(f, QUANTIFIERS):
            self.u.unify(self.formula(f.body), TWO, "quantifier body")
            return TWO
        raise TypeError(f"not a formula: {f!r}")

    def node(self, n):
        if isinstance(n, TERM_TYPES):
            return self.term(n)
        return self.formula(n)


def solve(node, signature: Mapping[str, TypeExpr]):
    """Type ``node`` and solve any type variables in ``signature``.

    Returns ``(node_type, solved_signature)``.
    """
    checker = _Checker(signature)
    t = checker.node(node)
    solved = {name: checker.u.resolve(ty) for name, ty in signature.items()}
    return checker.u.resolve(t), solved


def typecheck(node, signature: Mapping[str, TypeExpr]) -> TypeExpr:
    return solve(node, signature)[0]


def signature_of(world) -> dict[str, TypeExpr]:
    """Individual-level signature for every relation and function of a world."""
    sig: dict[str, TypeExpr] = {}
    for rel in world.relations.values():
        sig[rel.name] = Arrow(product([V] * rel.arity), TWO)
    for fn in world.functions.values():
        sig[fn.name] = Arrow(V, V)
    return sig
