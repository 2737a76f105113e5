"""Event-indexed evaluation of terms and formulas.

Terms evaluate to a partial value: an individual name (``str``), a
:class:`PairV`, a :class:`FnV`, or ``None`` for the undefined object.
Formulas evaluate to ``bool`` and the logic stays two-valued: an atomic
formula with an undefined argument is false.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Union

from .errors import (
    ApplicationOutsideGraph,
    ArityError,
    NonNumericComparison,
    UnboundVariable,
    UnknownFunction,
    UnknownIndividual,
    UnknownRelation,
)
from .syntax import (
    App,
    And,
    Cmp,
    Comparator,
    Const,
    Eq,
    Exist,
    ExistsH,
    ExistsU,
    FnRef,
    ForallH,
    ForallU,
    Iota,
    IotaActual,
    Not,
    Or,
    Pair,
    Pred,
    Restrict,
    TERM_TYPES,
    Var,
    free_vars,
    fresh_var,
)
from .universe import World


@dataclass(frozen=True)
class PairV:
    left: "Value"
    right: "Value"


@dataclass(frozen=True)
class FnV:
    """A finite function value; ``graph`` is a sorted tuple of (arg, result)."""

    graph: tuple
    _lookup: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_lookup", dict(self.graph))

    @classmethod
    def from_mapping(cls, mapping: Mapping) -> "FnV":
        return cls(tuple(sorted(mapping.items(), key=lambda kv: value_key(kv[0]))))

    def apply(self, arg: "Value") -> "Value":
        try:
            return self._lookup[arg]
        except (KeyError, TypeError):
            raise ApplicationOutsideGraph(
                f"{format_value(arg)} is outside the function's domain"
            ) from None


Value = Union[str, PairV, FnV, bool]
Env = Mapping[str, Value]

EMPTY_ENV: Env = MappingProxyType({})


def value_key(v) -> tuple:
    """Deterministic sort key across value kinds."""
    if isinstance(v, str):
        return (0, v)
    if isinstance(v, PairV):
        return (1, value_key(v.left), value_key(v.right))
    if isinstance(v, FnV):
        return (2, tuple((value_key(a), value_key(b)) for a, b in v.graph))
    if isinstance(v, bool):
        return (3, int(v))
    return (4,)


def format_value(v) -> str:
    if v is None:
        return "undefined"
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, str):
        return v
    if isinstance(v, PairV):
        return f"[{format_value(v.left)}, {format_value(v.right)}]"
    if isinstance(v, FnV):
        return "{" + ", ".join(f"{format_value(a)}->{format_value(b)}" for a, b in v.graph) + "}"
    return repr(v)


def compare(world: World, op: Comparator, left, right) -> bool:
    """Strict comparison of two partial values; undefined operands give False."""
    if left is None or right is None:
        return False
    if op is Comparator.EQ:
        return left == right
    if op is Comparator.NEQ:
        return left != right
    a = world.payload(left) if isinstance(left, str) else None
    b = world.payload(right) if isinstance(right, str) else None
    if a is None or b is None:
        bad = left if a is None else right
        raise NonNumericComparison(
            f"{op.symbol} needs numeric payloads; {format_value(bad)} has none"
        )
    if op is Comparator.LT:
        return a < b
    if op is Comparator.GT:
        return a > b
    if op is Comparator.LE:
        return a <= b
    return a >= b


class _Evaluation:
    """Evaluation at one fixed event."""

    __slots__ = ("world", "event", "potential", "actual")

    def __init__(self, world: World, event: str):
        world.check_event(event)
        self.world = world
        self.event = event
        self.potential = world.potential_sorted
        self.actual = world.actual_sorted(event)

    def term(self, env, t):
        if isinstance(t, Var):
            try:
                return env[t.name]
            except KeyError:
                raise UnboundVariable(t.name) from None
        if isinstance(t, Const):
            if t.name not in self.world.virtual:
                raise UnknownIndividual(f"unknown individual #{t.name}")
            return t.name
        if isinstance(t, Pair):
            left = self.term(env, t.left)
            right = self.term(env, t.right)
            if left is None or right is None:
                return None
            return PairV(left, right)
        if isinstance(t, App):
            return self.apply(env, t)
        if isinstance(t, Iota):
            return self.describe(env, t.var, t.body, self.potential)
        if isinstance(t, IotaActual):
            return self.describe(env, t.var, t.body, self.actual)
        if isinstance(t, Restrict):
            value = self.term(env, t.term)
            holds = self.formula(env, t.guard)
            return value if holds else None
        if isinstance(t, FnRef):
            return self.function_value(env, t.name)
        raise TypeError(f"not a term: {t!r}")

    def function_value(self, env, name):
        if name in env:
            return env[name]
        fn = self.world.functions.get(name)
        if fn is None:
            raise UnknownFunction(f"unknown function {name}")
        return FnV.from_mapping(fn.graph_at(self.event))

    def apply(self, env, t):
        head = t.fn
        if isinstance(head, FnRef) and head.name not in env:
            fn = self.world.functions.get(head.name)
            if fn is None:
                raise UnknownFunction(f"unknown function {head.name}")
            arg = self.term(env, t.arg)
            if arg is None:
                return None
            graph = fn.graph_at(self.event)
            if not isinstance(arg, str) or arg not in graph:
                raise ApplicationOutsideGraph(
                    f"{format_value(arg)} is outside the domain of {head.name}"
                )
            return graph[arg]
        fv = self.term(env, head)
        arg = self.term(env, t.arg)
        if fv is None or arg is None:
            return None
        if not isinstance(fv, FnV):
            raise UnknownFunction(f"{format_value(fv)} is not a function")
        return fv.apply(arg)

    def describe(self, env, var, body, domain):
        found = None
        for h in domain:
            if self.formula({**env, var: h}, body):
                if found is not None:
                    return None
                found = h
        return found

    def formula(self, env, f) -> bool:
        if isinstance(f, Pred):
            rel = self.world.relations.get(f.name)
            if rel is None:
                raise UnknownRelation(f"unknown relation {f.name}")
            if len(f.args) != rel.arity:
                raise ArityError(
                    f"{f.name} has arity {rel.arity}, applied to {len(f.args)} argument(s)"
                )
            values = tuple(self.term(env, a) for a in f.args)
            if any(not isinstance(v, str) for v in values):
                return False
            return values in rel.extension(self.event)
        if isinstance(f, Eq):
            left = self.term(env, f.left)
            right = self.term(env, f.right)
            return left is not None and right is not None and left == right
        if isinstance(f, Cmp):
            left = self.term(env, f.left)
            right = self.term(env, f.right)
            return compare(self.world, f.op, left, right)
        if isinstance(f, Exist):
            value = self.term(env, f.term)
            return isinstance(value, str) and value in self.world.potential
        if isinstance(f, Not):
            return not self.formula(env, f.body)
        if isinstance(f, And):
            return self.formula(env, f.left) and self.formula(env, f.right)
        if isinstance(f, Or):
            return self.formula(env, f.left) or self.formula(env, f.right)
        if isinstance(f, ForallH):
            return all(self.formula({**env, f.var: c}, f.body) for c in self.potential)
        if isinstance(f, ForallU):
            return all(self.formula({**env, f.var: a}, f.body) for a in self.actual)
        if isinstance(f, ExistsH):
            return any(self.formula({**env, f.var: c}, f.body) for c in self.potential)
        if isinstance(f, ExistsU):
            return any(self.formula({**env, f.var: a}, f.body) for a in self.actual)
        raise TypeError(f"not a formula: {f!r}")


def eval_term(world: World, env: Env, term, event: str):
    return _Evaluation(world, event).term(env or EMPTY_ENV, term)


def eval_formula(world: World, env: Env, formula, event: str) -> bool:
    return _Evaluation(world, event).formula(env or EMPTY_ENV, formula)


def exists_physically(world: World, env: Env, term, event: str) -> bool:
    """Existence by its definitional expansion ``exists y. y = term``."""
    y = fresh_var(free_vars(term), "y")
    return eval_formula(world, env, ExistsH(y, Eq(Var(y), term)), event)


# ---------------------------------------------------------------------------
# Concepts

TERM_CONCEPT = "term"
FORMULA_CONCEPT = "formula"


@dataclass(frozen=True)
class Concept:
    """A total map from events to values: the intension of an expression."""

    kind: str
    table: Mapping[str, object]

    def __post_init__(self):
        object.__setattr__(self, "table", MappingProxyType(dict(self.table)))

    __hash__ = None

    def __getitem__(self, event):
        return self.table[event]

    @property
    def events(self):
        return tuple(self.table)

    def precompose(self, mapping: Mapping[str, str]) -> "Concept":
        """The concept ``b -> self[mapping[b]]`` over the domain of ``mapping``."""
        return Concept(self.kind, {b: self.table[i] for b, i in mapping.items()})


def intension(world: World, env: Env, node) -> Concept:
    if isinstance(node, TERM_TYPES):
        return Concept(
            TERM_CONCEPT, {i: eval_term(world, env, node, i) for i in world.events}
        )
    return Concept(
        FORMULA_CONCEPT, {i: eval_formula(world, env, node, i) for i in world.events}
    )
