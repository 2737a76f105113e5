"""Types given by generator formulas, variable domains, and concept classes."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterator, Mapping, Sequence

from .errors import NonIndividualConcept, TypeDefinitionError, UnknownEvent
from .evaluator import FORMULA_CONCEPT, Concept, eval_formula
from .syntax import Abstraction, free_vars
from .universe import World


@dataclass(frozen=True)
class TypeDef:
    """``{var : H | generator}``; the generator has exactly ``var`` free."""

    name: str
    var: str
    generator: object
    sort: str = "H"

    def __post_init__(self):
        fv = free_vars(self.generator)
        if fv != {self.var}:
            raise TypeDefinitionError(
                f"generator of type {self.name} must have exactly {self.var} free, "
                f"has {{{', '.join(sorted(fv))}}}"
            )

    @classmethod
    def from_abstraction(cls, name: str, abstraction: Abstraction) -> "TypeDef":
        return cls(name, abstraction.var, abstraction.body)


@dataclass(frozen=True)
class ChoiceFunction:
    """A member of a variable domain: one individual chosen per event."""

    table: Mapping[str, str]

    def __post_init__(self):
        object.__setattr__(self, "table", MappingProxyType(dict(self.table)))

    def __getitem__(self, event):
        return self.table[event]

    def __hash__(self):
        return hash(tuple(self.table.items()))

    def __str__(self):
        return "{" + ", ".join(f"{e}->{h}" for e, h in self.table.items()) + "}"


class ConceptClass(enum.Enum):
    PROPOSITIONAL = "propositional"
    ACTUAL = "actual"
    POSSIBLE = "possible"
    VIRTUAL = "virtual"


def type_extent(world: World, tdef: TypeDef, event: str) -> frozenset[str]:
    world.check_event(event)
    return frozenset(
        h
        for h in world.potential_sorted
        if eval_formula(world, {tdef.var: h}, tdef.generator, event)
    )


def variable_domain(
    world: World, tdef: TypeDef, events: Sequence[str], limit: int
) -> Iterator[ChoiceFunction]:
    """Lazily enumerate choice functions over ``events``, at most ``limit``.

    Order is lexicographic: the first event varies slowest and candidates
    at each event are taken in name order.
    """
    events = list(events)
    if not events:
        raise ValueError("variable domain needs at least one event")
    if limit < 1:
        raise ValueError("limit must be positive")
    if len(set(events)) != len(events):
        raise ValueError("events must be distinct")
    for e in events:
        if e not in world.actual:
            raise UnknownEvent(f"unknown event {e}")
    extents = [sorted(type_extent(world, tdef, e)) for e in events]
    combos = itertools.product(*extents)
    for choice in itertools.islice(combos, limit):
        yield ChoiceFunction(dict(zip(events, choice)))


def domain_size(world: World, tdef: TypeDef, events: Sequence[str]) -> int:
    n = 1
    for e in events:
        n *= len(type_extent(world, tdef, e))
    return n


def classify_concept(world: World, concept: Concept) -> ConceptClass:
    if concept.kind == FORMULA_CONCEPT:
        return ConceptClass.PROPOSITIONAL
    missing = set(world.events) - set(concept.table)
    if missing:
        raise UnknownEvent(f"concept is not total: missing {', '.join(sorted(missing))}")
    defined = {e: v for e, v in concept.table.items() if v is not None}
    for v in defined.values():
        if not isinstance(v, str):
            raise NonIndividualConcept("only individual-valued concepts can be classified")
    # undefined entries count as vacuously inside every stratum
    if all(v in world.actual[e] for e, v in defined.items()):
        return ConceptClass.ACTUAL
    if all(v in world.potential for v in defined.values()):
        return ConceptClass.POSSIBLE
    return ConceptClass.VIRTUAL


def concept_choice(concept: Concept, events: Sequence[str]) -> ChoiceFunction | None:
    """The choice function a term concept induces on ``events``, if total there."""
    values = {e: concept.table[e] for e in events}
    if any(not isinstance(v, str) for v in values.values()):
        return None
    return ChoiceFunction(values)
