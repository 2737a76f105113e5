"""Finite worlds: individual strata, events, actual sets, relations and functions.

A world fixes the nested strata ``U_i <= H <= V`` (actual, potential and
virtual individuals) over a non-empty event set ``I``.  Worlds are loaded from
a small line-oriented text format and are immutable afterwards.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from types import MappingProxyType
from typing import Mapping

from .errors import (
    ArityError,
    DuplicateName,
    IncompleteFunction,
    ParseError,
    StratumError,
    UnknownEvent,
    UnknownIndividual,
)

NAME = re.compile(r"[A-Za-z0-9_]+\Z")

EXTENSIONAL = "extensional"
INTENSIONAL = "intensional"


@dataclass(frozen=True)
class Individual:
    name: str
    payload: Fraction | None = None


@dataclass(frozen=True)
class Relation:
    """A named predicate.

    Extensional relations hold one constant tuple set; intensional relations
    hold one tuple set per event (events never mentioned map to the empty set).
    """

    name: str
    arity: int
    kind: str = EXTENSIONAL
    tuples: frozenset = frozenset()
    by_event: Mapping[str, frozenset] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "tuples", frozenset(self.tuples))
        object.__setattr__(
            self,
            "by_event",
            MappingProxyType({e: frozenset(ts) for e, ts in self.by_event.items() if ts}),
        )

    @property
    def intensional(self) -> bool:
        return self.kind == INTENSIONAL

    def extension(self, event: str) -> frozenset:
        if self.kind == EXTENSIONAL:
            return self.tuples
        return self.by_event.get(event, frozenset())

    def all_tuples(self):
        if self.kind == EXTENSIONAL:
            return set(self.tuples)
        out = set()
        for ts in self.by_event.values():
            out |= ts
        return out


@dataclass(frozen=True)
class FunctionConst:
    """A unary function over V.

    A constant function has one graph shared by every event.  An intensional
    function carries a separate total graph per event.
    """

    name: str
    graph: Mapping[str, str] = field(default_factory=dict)
    kind: str = EXTENSIONAL
    by_event: Mapping[str, Mapping[str, str]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "graph", MappingProxyType(dict(self.graph)))
        object.__setattr__(
            self,
            "by_event",
            MappingProxyType(
                {e: MappingProxyType(dict(g)) for e, g in self.by_event.items()}
            ),
        )

    @property
    def constant(self) -> bool:
        return self.kind == EXTENSIONAL

    def graph_at(self, event: str) -> Mapping[str, str]:
        if self.kind == EXTENSIONAL:
            return self.graph
        return self.by_event[event]


@dataclass(frozen=True)
class World:
    individuals: tuple[Individual, ...]
    potential: frozenset[str]
    events: tuple[str, ...]
    actual: Mapping[str, frozenset[str]]
    relations: Mapping[str, Relation] = field(default_factory=dict)
    functions: Mapping[str, FunctionConst] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "individuals", tuple(self.individuals))
        object.__setattr__(self, "potential", frozenset(self.potential))
        object.__setattr__(self, "events", tuple(self.events))
        object.__setattr__(
            self,
            "actual",
            MappingProxyType({e: frozenset(self.actual.get(e, ())) for e in self.events}),
        )
        object.__setattr__(self, "relations", MappingProxyType(dict(self.relations)))
        object.__setattr__(self, "functions", MappingProxyType(dict(self.functions)))
        self.validate()

    __hash__ = None

    @cached_property
    def virtual(self) -> frozenset[str]:
        return frozenset(ind.name for ind in self.individuals)

    @cached_property
    def payloads(self) -> Mapping[str, Fraction]:
        return MappingProxyType(
            {ind.name: ind.payload for ind in self.individuals if ind.payload is not None}
        )

    @cached_property
    def potential_sorted(self) -> tuple[str, ...]:
        return tuple(sorted(self.potential))

    @cached_property
    def _actual_sorted(self) -> Mapping[str, tuple[str, ...]]:
        return {e: tuple(sorted(u)) for e, u in self.actual.items()}

    def actual_sorted(self, event: str) -> tuple[str, ...]:
        self.check_event(event)
        return self._actual_sorted[event]

    def payload(self, name: str) -> Fraction | None:
        return self.payloads.get(name)

    def check_event(self, event: str) -> None:
        if event not in self.actual:
            raise UnknownEvent(f"unknown event {event}")

    def validate(self) -> None:
        """Re-assert every world invariant; raises on the first violation."""
        names = [ind.name for ind in self.individuals]
        _no_duplicates(names, "individual")
        _no_duplicates(self.events, "event")
        if not names:
            raise StratumError("V must be non-empty")
        if not self.potential:
            raise StratumError("H must be non-empty")
        if not self.events:
            raise StratumError("I must be non-empty")
        virtual = set(names)
        if not self.potential <= virtual:
            extra = ", ".join(sorted(self.potential - virtual))
            raise StratumError(f"H is not a subset of V: {extra}")
        for event in self.events:
            u = self.actual[event]
            if not u <= self.potential:
                extra = ", ".join(sorted(u - self.potential))
                raise StratumError(f"U_{event} is not a subset of H: {extra}")
        for ind in self.individuals:
            if ind.payload is not None and not isinstance(ind.payload, Fraction):
                raise StratumError(f"payload of {ind.name} must be a rational number")
        events = set(self.events)
        for rel in self.relations.values():
            if rel.arity < 1:
                raise ArityError(f"relation {rel.name} must have positive arity")
            for e in rel.by_event:
                if e not in events:
                    raise UnknownEvent(f"relation {rel.name} mentions unknown event {e}")
            for tup in rel.all_tuples():
                if len(tup) != rel.arity:
                    raise ArityError(
                        f"tuple ({','.join(tup)}) has length {len(tup)}, "
                        f"relation {rel.name} has arity {rel.arity}"
                    )
                for comp in tup:
                    if comp not in virtual:
                        raise UnknownIndividual(
                            f"relation {rel.name} mentions undeclared individual {comp}"
                        )
        for fn in self.functions.values():
            if fn.constant:
                _check_graph(fn.name, fn.graph, virtual)
            else:
                for e in self.events:
                    if e not in fn.by_event:
                        raise IncompleteFunction(
                            f"function {fn.name} has no graph at event {e}"
                        )
                    _check_graph(f"{fn.name}@{e}", fn.by_event[e], virtual)
                for e in fn.by_event:
                    if e not in events:
                        raise UnknownEvent(f"function {fn.name} mentions unknown event {e}")
        clash = set(self.relations) & set(self.functions)
        if clash:
            raise DuplicateName(f"name used for both relation and function: {sorted(clash)[0]}")


def _no_duplicates(names, what):
    seen = set()
    for n in names:
        if n in seen:
            raise DuplicateName(f"{what} {n} declared twice")
        seen.add(n)


def _check_graph(label, graph, virtual):
    for arg, res in graph.items():
        if arg not in virtual or res not in virtual:
            bad = arg if arg not in virtual else res
            raise UnknownIndividual(f"function {label} mentions undeclared individual {bad}")
    missing = virtual - set(graph)
    if missing:
        raise IncompleteFunction(
            f"function {label} is not total on V: missing {', '.join(sorted(missing))}"
        )


def actual_at(world: World, event: str) -> frozenset[str]:
    world.check_event(event)
    return world.actual[event]


# ---------------------------------------------------------------------------
# World file format

_SECTION_RANK = {
    "world": 0,
    "virtual": 1,
    "potential": 2,
    "numeric": 3,
    "events": 4,
    "actual": 5,
    "relation": 6,
    "function": 7,
}
_TUPLE = re.compile(r"\(([^()]*)\)")
_HEADER = re.compile(r"(\w+)/(\d+)\Z")


def _parse_payload(text, lineno):
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad numeric payload {text!r}", line=lineno) from None
    return value


def _names(tokens, lineno):
    for tok in tokens:
        if not NAME.match(tok):
            raise ParseError(f"bad name {tok!r}", line=lineno)
    return list(tokens)


def _parse_tuples(text, lineno):
    tuples = []
    pos = 0
    for m in _TUPLE.finditer(text):
        if text[pos:m.start()].strip():
            raise ParseError(f"unexpected text {text[pos:m.start()].strip()!r}", line=lineno)
        inner = m.group(1).strip()
        comps = [c.strip() for c in inner.split(",")] if inner else []
        tuples.append(tuple(_names(comps, lineno)))
        pos = m.end()
    if text[pos:].strip():
        raise ParseError(f"unexpected text {text[pos:].strip()!r}", line=lineno)
    return tuples


def _parse_graph(tokens, lineno, label):
    graph = {}
    for tok in tokens:
        arg, sep, res = tok.partition("->")
        if not sep:
            raise ParseError(f"expected arg->result, got {tok!r}", line=lineno)
        _names([arg, res], lineno)
        if arg in graph:
            raise DuplicateName(f"line {lineno}: function {label} maps {arg} twice")
        graph[arg] = res
    return graph


def _split_colon(rest, lineno, what):
    head, sep, tail = rest.partition(":")
    if not sep:
        raise ParseError(f"expected ':' in {what}", line=lineno)
    return head.strip(), tail.strip()


def load_world(source: str) -> World:
    """Parse and validate a world file."""
    virtual: list[str] | None = None
    potential: list[str] | None = None
    payloads: dict[str, Fraction] = {}
    events: list[str] | None = None
    actual: dict[str, list[str]] = {}
    relations: dict[str, dict] = {}
    functions: dict[str, dict] = {}
    rank = -1
    block = None  # (kind, name) of the relation/function accepting `at` lines
    at_lineno = {}

    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, _, rest = line.partition(" ")
        rest = rest.strip()

        if keyword == "at":
            if block is None:
                raise ParseError("'at' line outside an intensional declaration", line=lineno)
            ev, body = _split_colon(rest, lineno, "at line")
            _names([ev], lineno)
            kind, name = block
            target = relations[name] if kind == "relation" else functions[name]
            if ev in target["by_event"]:
                raise DuplicateName(f"line {lineno}: {kind} {name} has two 'at {ev}' lines")
            if kind == "relation":
                target["by_event"][ev] = _parse_tuples(body, lineno)
            else:
                target["by_event"][ev] = _parse_graph(body.split(), lineno, name)
            at_lineno[(kind, name, ev)] = lineno
            continue

        if keyword not in _SECTION_RANK:
            raise ParseError(
                f"unknown section {keyword!r}", line=lineno, expected=list(_SECTION_RANK) + ["at"]
            )
        new_rank = _SECTION_RANK[keyword]
        if rank < 0 and keyword != "world":
            raise ParseError("file must start with 'world'", line=lineno, expected=["world"])
        if new_rank < rank or (new_rank == rank and keyword in ("world", "virtual", "potential", "numeric", "events")):
            raise ParseError(f"section {keyword!r} out of order", line=lineno)
        rank = new_rank
        block = None

        if keyword == "world":
            if rest:
                raise ParseError("unexpected text after 'world'", line=lineno)
        elif keyword == "virtual":
            virtual = _names(rest.split(), lineno)
        elif keyword == "potential":
            potential = _names(rest.split(), lineno)
        elif keyword == "numeric":
            for tok in rest.split():
                name, sep, value = tok.partition("=")
                if not sep:
                    raise ParseError(f"expected name=value, got {tok!r}", line=lineno)
                _names([name], lineno)
                if name in payloads:
                    raise DuplicateName(f"line {lineno}: payload for {name} given twice")
                payloads[name] = _parse_payload(value, lineno)
        elif keyword == "events":
            events = _names(rest.split(), lineno)
        elif keyword == "actual":
            ev, body = _split_colon(rest, lineno, "actual line")
            _names([ev], lineno)
            if ev in actual:
                raise DuplicateName(f"line {lineno}: actual set for {ev} declared twice")
            actual[ev] = _names(body.split(), lineno)
            at_lineno[("actual", ev)] = lineno
        elif keyword == "relation":
            head, _, tail = rest.partition(":")
            parts = head.split()
            if len(parts) != 2 or parts[1] not in (EXTENSIONAL, INTENSIONAL):
                raise ParseError(
                    "expected 'relation NAME/ARITY extensional|intensional'", line=lineno
                )
            m = _HEADER.match(parts[0])
            if not m:
                raise ParseError(f"bad relation header {parts[0]!r}", line=lineno)
            name, arity = m.group(1), int(m.group(2))
            if name in relations or name in functions:
                raise DuplicateName(f"line {lineno}: relation {name} declared twice")
            kind = parts[1]
            decl = {"arity": arity, "kind": kind, "tuples": [], "by_event": {}, "line": lineno}
            if kind == EXTENSIONAL:
                decl["tuples"] = _parse_tuples(tail, lineno)
            else:
                if tail.strip():
                    raise ParseError("intensional relations take 'at' lines", line=lineno)
                block = ("relation", name)
            relations[name] = decl
        elif keyword == "function":
            head, sep, tail = rest.partition(":")
            parts = head.split()
            if not parts or len(parts) > 2 or (len(parts) == 2 and parts[1] != INTENSIONAL):
                raise ParseError("expected 'function NAME : graph' or 'function NAME intensional'", line=lineno)
            name = _names(parts[:1], lineno)[0]
            if name in functions or name in relations:
                raise DuplicateName(f"line {lineno}: function {name} declared twice")
            decl = {"graph": {}, "by_event": {}, "line": lineno}
            if len(parts) == 2:
                if tail.strip():
                    raise ParseError("intensional functions take 'at' lines", line=lineno)
                decl["kind"] = INTENSIONAL
                block = ("function", name)
            else:
                if not sep:
                    raise ParseError("expected ':' in function line", line=lineno)
                decl["kind"] = EXTENSIONAL
                decl["graph"] = _parse_graph(tail.split(), lineno, name)
            functions[name] = decl

    if virtual is None or potential is None or events is None:
        missing = [k for k, v in (("virtual", virtual), ("potential", potential), ("events", events)) if v is None]
        raise ParseError(f"missing section(s): {', '.join(missing)}", expected=missing)

    vset = set(virtual)
    _no_duplicates(virtual, "individual")
    _no_duplicates(events, "event")
    _no_duplicates(potential, "potential individual")
    for name in payloads:
        if name not in vset:
            raise UnknownIndividual(f"payload for undeclared individual {name}")
    for ev, members in actual.items():
        where = f"line {at_lineno[('actual', ev)]}: "
        if ev not in events:
            raise UnknownEvent(f"{where}actual set for unknown event {ev}")
        _no_duplicates(members, f"actual individual of {ev}")
        for m in members:
            if m not in vset:
                raise UnknownIndividual(f"{where}undeclared individual {m} in U_{ev}")
    for name, decl in relations.items():
        for ev in decl["by_event"]:
            if ev not in events:
                raise UnknownEvent(f"line {at_lineno[('relation', name, ev)]}: unknown event {ev}")
        lists = [decl["tuples"]] + list(decl["by_event"].values())
        for ts in lists:
            for t in ts:
                if len(t) != decl["arity"]:
                    raise ArityError(
                        f"line {decl['line']}: tuple ({','.join(t)}) has length {len(t)}, "
                        f"relation {name} has arity {decl['arity']}"
                    )
                for comp in t:
                    if comp not in vset:
                        raise UnknownIndividual(
                            f"line {decl['line']}: relation {name} mentions undeclared individual {comp}"
                        )

    return World(
        individuals=tuple(Individual(n, payloads.get(n)) for n in virtual),
        potential=frozenset(potential),
        events=tuple(events),
        actual={e: frozenset(actual.get(e, ())) for e in events},
        relations={
            name: Relation(
                name,
                d["arity"],
                d["kind"],
                tuples=frozenset(d["tuples"]),
                by_event={e: frozenset(ts) for e, ts in d["by_event"].items()},
            )
            for name, d in relations.items()
        },
        functions={
            name: FunctionConst(name, d["graph"], d["kind"], d["by_event"])
            for name, d in functions.items()
        },
    )


def _fmt_payload(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def _fmt_tuples(tuples) -> str:
    return " ".join("(" + ",".join(t) + ")" for t in sorted(tuples))


def _fmt_graph(graph) -> str:
    return " ".join(f"{a}->{graph[a]}" for a in sorted(graph))


def dump_world(world: World) -> str:
    """Serialize a world back to the world file format."""
    lines = ["world"]
    lines.append("virtual " + " ".join(ind.name for ind in world.individuals))
    lines.append("potential " + " ".join(sorted(world.potential)))
    numeric = [f"{ind.name}={_fmt_payload(ind.payload)}" for ind in world.individuals if ind.payload is not None]
    if numeric:
        lines.append("numeric " + " ".join(numeric))
    lines.append("events " + " ".join(world.events))
    for ev in world.events:
        lines.append(f"actual {ev} : " + " ".join(sorted(world.actual[ev])))
    for rel in world.relations.values():
        if rel.intensional:
            lines.append(f"relation {rel.name}/{rel.arity} intensional")
            for ev in world.events:
                ts = rel.by_event.get(ev)
                if ts:
                    lines.append(f"  at {ev} : {_fmt_tuples(ts)}")
        else:
            lines.append(f"relation {rel.name}/{rel.arity} extensional : {_fmt_tuples(rel.tuples)}")
    for fn in world.functions.values():
        if fn.constant:
            lines.append(f"function {fn.name} : {_fmt_graph(fn.graph)}")
        else:
            lines.append(f"function {fn.name} intensional")
            for ev in world.events:
                lines.append(f"  at {ev} : {_fmt_graph(fn.by_event[ev])}")
    return "\n".join(line.rstrip() for line in lines) + "\n"


def summary(world: World) -> list[str]:
    out = [f"|V|={len(world.virtual)} |H|={len(world.potential)} |I|={len(world.events)}"]
    for rel in world.relations.values():
        out.append(f"relation {rel.name}/{rel.arity} {rel.kind}")
    for fn in world.functions.values():
        out.append(f"function {fn.name} {'constant' if fn.constant else 'intensional'}")
    return out
