"""Event-driven relational layer.

Operands are abstractions ``{x | F}`` whose extent at an event is the set of
potential individuals satisfying ``F`` there.  Queries combine two operands
by a set operation, a comparator join or a junction rule, or restrict a binary
relation by a guard.  ``shift`` moves a query along an evolvent ``f: B -> I``:
every event-indexed part of the query (operand intensions, relation
extensions, the event handed to junction rules) is precomposed with ``f``, so
the shifted query at a view event ``b`` answers what the original answers at
``f(b)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Callable, Mapping

from .errors import (
    ArityError,
    ShapeError,
    UnboundVariable,
    UnknownEvent,
    UnknownFunction,
    UnknownRelation,
    UnknownRule,
    UnknownViewEvent,
)
from .evaluator import (
    Concept,
    FnV,
    PairV,
    TERM_CONCEPT,
    compare,
    eval_formula,
    intension,
)
from .syntax import (
    Abstraction,
    App,
    Comparator,
    Const,
    FnRef,
    Pair,
    free_vars,
    print_ast,
)
from .universe import Relation, World

__all__ = [
    "Comparator",
    "Evolvent",
    "FormulaQuery",
    "JoinQuery",
    "JunctionQuery",
    "JunctionRule",
    "Relation",
    "RestrictQuery",
    "RuleRegistry",
    "SetOp",
    "SetOpQuery",
    "Snapshot",
    "default_rules",
    "eval_query",
    "eval_setop",
    "eval_theta_case",
    "identity_evolvent",
    "junction",
    "make_evolvent",
    "materialize_view",
    "operand_extent",
    "restricted_relation",
    "shift",
    "theta_join",
]


class SetOp(enum.Enum):
    UNION = "union"
    INTERSECT = "intersect"
    DIFFERENCE = "difference"

    def apply(self, left: frozenset, right: frozenset) -> frozenset:
        if self is SetOp.UNION:
            return left | right
        if self is SetOp.INTERSECT:
            return left & right
        return left - right


# ---------------------------------------------------------------------------
# Operands


def check_closed(abstraction: Abstraction) -> None:
    extra = free_vars(abstraction.body) - {abstraction.var}
    if extra:
        raise UnboundVariable(sorted(extra)[0])


def operand_extent(world: World, abstraction: Abstraction, event: str) -> frozenset[str]:
    check_closed(abstraction)
    world.check_event(event)
    return frozenset(
        h
        for h in world.potential_sorted
        if eval_formula(world, {abstraction.var: h}, abstraction.body, event)
    )


def eval_setop(world: World, op: SetOp, lhs: Abstraction, rhs: Abstraction, event: str) -> frozenset[str]:
    return op.apply(operand_extent(world, lhs, event), operand_extent(world, rhs, event))


def theta_join(world: World, theta: Comparator, lhs: Abstraction, rhs: Abstraction, event: str) -> frozenset:
    left = sorted(operand_extent(world, lhs, event))
    right = sorted(operand_extent(world, rhs, event))
    return frozenset((h, k) for h in left for k in right if compare(world, theta, h, k))


# ---------------------------------------------------------------------------
# Junction rules


@dataclass(frozen=True)
class JunctionRule:
    """A named decision procedure ``(world, event, h, k) -> bool``."""

    name: str
    predicate: Callable[[World, str, str, str], bool] = field(compare=False)

    def __call__(self, world, event, h, k) -> bool:
        return bool(self.predicate(world, event, h, k))


def _theta_rule(op: Comparator) -> JunctionRule:
    return JunctionRule(f"theta:{op.symbol}", lambda w, e, h, k: compare(w, op, h, k))


class RuleRegistry:
    """Named junction rules; frozen before queries run."""

    def __init__(self, rules=()):
        self._rules: dict[str, JunctionRule] = {}
        self._frozen = False
        for rule in rules:
            self.register(rule)

    def register(self, rule: JunctionRule) -> None:
        if self._frozen:
            raise RuntimeError("rule registry is frozen")
        self._rules[rule.name] = rule

    def freeze(self) -> "RuleRegistry":
        self._frozen = True
        return self

    @property
    def frozen(self) -> bool:
        return self._frozen

    def names(self) -> list[str]:
        return sorted(self._rules)

    def get(self, name: str) -> JunctionRule:
        if name in self._rules:
            return self._rules[name]
        if name.startswith("theta:"):
            try:
                op = Comparator.parse(name[len("theta:"):])
            except Exception:
                op = None
            if op is not None and f"theta:{op.symbol}" in self._rules:
                return self._rules[f"theta:{op.symbol}"]
        raise UnknownRule(f"unknown junction rule {name}")


def default_rules() -> RuleRegistry:
    return RuleRegistry(
        [
            JunctionRule("always", lambda w, e, h, k: True),
            JunctionRule(
                "co-actual", lambda w, e, h, k: h in w.actual[e] and k in w.actual[e]
            ),
        ]
        + [_theta_rule(op) for op in Comparator]
    )


def _resolve_rule(rule, rules) -> JunctionRule:
    if isinstance(rule, JunctionRule):
        return rule
    return (rules or default_rules()).get(rule)


def junction(world: World, rule, lhs: Abstraction, rhs: Abstraction, event: str, rules=None) -> frozenset:
    rule = _resolve_rule(rule, rules)
    left = sorted(operand_extent(world, lhs, event))
    right = sorted(operand_extent(world, rhs, event))
    return frozenset((h, k) for h in left for k in right if rule(world, event, h, k))


# ---------------------------------------------------------------------------
# Restricted relations


def _binary_relation(world: World, name: str) -> Relation:
    rel = world.relations.get(name)
    if rel is None:
        raise UnknownRelation(f"unknown relation {name}")
    if rel.arity != 2:
        raise ArityError(f"restriction needs a binary relation; {name} has arity {rel.arity}")
    return rel


def _check_guard(guard) -> None:
    extra = free_vars(guard) - {"x", "y"}
    if extra:
        raise UnboundVariable(sorted(extra)[0])


def restricted_relation(world: World, rel: str, guard, event: str) -> frozenset:
    relation = _binary_relation(world, rel)
    _check_guard(guard)
    world.check_event(event)
    ext = relation.extension(event)
    return frozenset(
        (u, v)
        for u in world.potential_sorted
        for v in world.potential_sorted
        if (u, v) in ext and eval_formula(world, {"x": u, "y": v}, guard, event)
    )


# ---------------------------------------------------------------------------
# Evolvents


@dataclass(frozen=True)
class Evolvent:
    """A total map ``f: B -> I`` from view events to events."""

    mapping: Mapping[str, str]
    name: str = field(default="f", compare=False)

    def __post_init__(self):
        if not self.mapping:
            raise ValueError("an evolvent needs at least one view event")
        object.__setattr__(self, "mapping", MappingProxyType(dict(self.mapping)))

    def __hash__(self):
        return hash(tuple(self.mapping.items()))

    def __call__(self, b: str) -> str:
        try:
            return self.mapping[b]
        except KeyError:
            raise UnknownViewEvent(f"{b} is not a view event of {self.name}") from None

    @property
    def view_events(self) -> tuple[str, ...]:
        return tuple(self.mapping)

    def is_identity_on(self, world: World) -> bool:
        return set(self.mapping) == set(world.events) and all(b == i for b, i in self.mapping.items())


def make_evolvent(world: World, pairs, name: str = "f") -> Evolvent:
    mapping = {}
    for b, i in pairs:
        if b in mapping:
            raise ValueError(f"view event {b} mapped twice")
        if i not in world.actual:
            raise UnknownEvent(f"evolvent {name} maps {b} to unknown event {i}")
        mapping[b] = i
    return Evolvent(mapping, name)


def identity_evolvent(world: World) -> Evolvent:
    return Evolvent({i: i for i in world.events}, "1_I")


# ---------------------------------------------------------------------------
# Queries


@dataclass(frozen=True)
class SetOpQuery:
    op: SetOp
    lhs: Abstraction
    rhs: Abstraction
    script: tuple = ()


@dataclass(frozen=True)
class JoinQuery:
    theta: Comparator
    lhs: Abstraction
    rhs: Abstraction
    script: tuple = ()


@dataclass(frozen=True)
class JunctionQuery:
    rule: str
    lhs: Abstraction
    rhs: Abstraction
    script: tuple = ()


@dataclass(frozen=True)
class RestrictQuery:
    relation: str
    guard: object
    script: tuple = ()


@dataclass(frozen=True)
class FormulaQuery:
    formula: object
    script: tuple = ()


QueryExpr = SetOpQuery | JoinQuery | JunctionQuery | RestrictQuery | FormulaQuery


def shift(query, evolvent: Evolvent):
    return replace(query, script=query.script + (evolvent,))


def query_text(query) -> str:
    if isinstance(query, SetOpQuery):
        text = f"setop {query.op.value} {print_ast(query.lhs)} {print_ast(query.rhs)}"
    elif isinstance(query, JoinQuery):
        text = f"join {query.theta.symbol} {print_ast(query.lhs)} {print_ast(query.rhs)}"
    elif isinstance(query, JunctionQuery):
        text = f"junction {query.rule} {print_ast(query.lhs)} {print_ast(query.rhs)}"
    elif isinstance(query, RestrictQuery):
        text = f"restrict {query.relation} where {print_ast(query.guard)}"
    elif isinstance(query, FormulaQuery):
        text = f"eval {print_ast(query.formula)}"
    else:
        raise TypeError(f"not a query: {query!r}")
    for f in query.script:
        text += f" along {f.name}"
    return text


def source_event(query, b: str) -> str:
    """Follow the query's script back from view event ``b`` to an event of I."""
    event = b
    for f in reversed(query.script):
        event = f(event)
    return event


def _along(table: Mapping, script) -> dict:
    # precompose an I-indexed table with each evolvent in turn
    for f in script:
        table = {b: table[i] for b, i in f.mapping.items() if i in table}
    return table


def _read(table: Mapping, b: str, query):
    try:
        return table[b]
    except KeyError:
        raise UnknownViewEvent(f"{b} is not a view event of {query_text(query)}") from None


def _shifted_extent(world: World, abstraction: Abstraction, query, b: str) -> list[str]:
    check_closed(abstraction)
    out = []
    for h in world.potential_sorted:
        concept = intension(world, {abstraction.var: h}, abstraction.body)
        if _read(_along(concept.table, query.script), b, query):
            out.append(h)
    return out


def eval_query(world: World, query, event: str, rules: RuleRegistry | None = None) -> frozenset:
    """Rows of ``query`` at ``event`` (a view event when the query is shifted)."""
    if not query.script:
        return _eval_static(world, query, event, rules)
    source = source_event(query, event)
    world.check_event(source)
    if isinstance(query, SetOpQuery):
        left = frozenset(_shifted_extent(world, query.lhs, query, event))
        right = frozenset(_shifted_extent(world, query.rhs, query, event))
        return frozenset((h,) for h in query.op.apply(left, right))
    if isinstance(query, JoinQuery):
        left = _shifted_extent(world, query.lhs, query, event)
        right = _shifted_extent(world, query.rhs, query, event)
        return frozenset((h, k) for h in left for k in right if compare(world, query.theta, h, k))
    if isinstance(query, JunctionQuery):
        rule = _resolve_rule(query.rule, rules)
        left = _shifted_extent(world, query.lhs, query, event)
        right = _shifted_extent(world, query.rhs, query, event)
        rule_event = _read(_along({i: i for i in world.events}, query.script), event, query)
        return frozenset((h, k) for h in left for k in right if rule(world, rule_event, h, k))
    if isinstance(query, RestrictQuery):
        relation = _binary_relation(world, query.relation)
        _check_guard(query.guard)
        ext = _read(_along({i: relation.extension(i) for i in world.events}, query.script), event, query)
        rows = set()
        for u in world.potential_sorted:
            for v in world.potential_sorted:
                if (u, v) not in ext:
                    continue
                guard = intension(world, {"x": u, "y": v}, query.guard)
                if _read(_along(guard.table, query.script), event, query):
                    rows.add((u, v))
        return frozenset(rows)
    if isinstance(query, FormulaQuery):
        concept = intension(world, {}, query.formula)
        return frozenset({()}) if _read(_along(concept.table, query.script), event, query) else frozenset()
    raise TypeError(f"not a query: {query!r}")


def _eval_static(world, query, event, rules):
    if isinstance(query, SetOpQuery):
        return frozenset((h,) for h in eval_setop(world, query.op, query.lhs, query.rhs, event))
    if isinstance(query, JoinQuery):
        return theta_join(world, query.theta, query.lhs, query.rhs, event)
    if isinstance(query, JunctionQuery):
        return junction(world, query.rule, query.lhs, query.rhs, event, rules)
    if isinstance(query, RestrictQuery):
        return restricted_relation(world, query.relation, query.guard, event)
    if isinstance(query, FormulaQuery):
        return frozenset({()}) if eval_formula(world, {}, query.formula, event) else frozenset()
    raise TypeError(f"not a query: {query!r}")


# ---------------------------------------------------------------------------
# Views


def row_text(row) -> str:
    return "(" + ",".join(row) + ")"


@dataclass(frozen=True)
class Snapshot:
    view_event: str
    source_event: str
    rows: frozenset
    provenance: str = ""

    def sorted_rows(self) -> list:
        return sorted(self.rows, key=row_text)

    def render(self) -> str:
        lines = [f"view {self.view_event} source {self.source_event}"]
        lines.extend(row_text(r) for r in self.sorted_rows())
        return "\n".join(lines) + "\n"


def materialize_view(world: World, query, evolvent: Evolvent, b: str, rules=None) -> Snapshot:
    if b not in evolvent.mapping:
        raise UnknownViewEvent(f"{b} is not a view event of {evolvent.name}")
    shifted = shift(query, evolvent)
    return Snapshot(
        view_event=b,
        source_event=source_event(shifted, b),
        rows=eval_query(world, shifted, b, rules),
        provenance=query_text(shifted),
    )


# ---------------------------------------------------------------------------
# Comparator atoms under an evolvent

ATOMIC = "atomic object"
CONSTANT_FUNCTION = "constant function"
ORDERED_PAIR = "ordered pair"
APPLICATION = "application"


def operand_shape(world: World, operand) -> str:
    if isinstance(operand, Const):
        return ATOMIC
    if isinstance(operand, Pair) and isinstance(operand.left, Const) and isinstance(operand.right, Const):
        return ORDERED_PAIR
    if isinstance(operand, App) and isinstance(operand.fn, FnRef) and isinstance(operand.arg, Const):
        fn = world.functions.get(operand.fn.name)
        if fn is None:
            raise UnknownFunction(f"unknown function {operand.fn.name}")
        return CONSTANT_FUNCTION if fn.constant else APPLICATION
    raise ShapeError(
        "operand must be #x, g(#x), [#x, #y] or k(#y) for an event-dependent k"
    )


def eval_theta_case(
    world: World, theta: Comparator, h, operand, evolvent: Evolvent, b: str
) -> bool:
    """``theta[h, operand]`` at view event ``b``, composed along ``evolvent``.

    Each operand shape is computed from its own composition of concepts with
    the evolvent rather than by evaluating the atom at ``f(b)``.
    """
    shape = operand_shape(world, operand)
    if b not in evolvent.mapping:
        raise UnknownViewEvent(f"{b} is not a view event of {evolvent.name}")

    def along_f(term):
        return intension(world, {}, term).precompose(evolvent.mapping)[b]

    left = along_f(h)
    if shape == ATOMIC:
        right = along_f(operand)
    elif shape == CONSTANT_FUNCTION:
        x = along_f(operand.arg)
        right = world.functions[operand.fn.name].graph[x]
    elif shape == ORDERED_PAIR:
        x, y = along_f(operand.left), along_f(operand.right)
        right = PairV(x, y)
    else:
        fn = world.functions[operand.fn.name]
        fn_concept = Concept(
            TERM_CONCEPT, {i: FnV.from_mapping(fn.graph_at(i)) for i in world.events}
        )
        right = fn_concept.precompose(evolvent.mapping)[b].apply(along_f(operand.arg))
    return compare(world, theta, left, right)
