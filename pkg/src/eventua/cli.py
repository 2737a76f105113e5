"""Command-line front end: ``eventua run|repl|check``."""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field

from . import algebra
from .algebra import (
    Evolvent,
    FormulaQuery,
    JoinQuery,
    JunctionQuery,
    RestrictQuery,
    SetOp,
    SetOpQuery,
    Snapshot,
    default_rules,
    eval_theta_case,
    make_evolvent,
    materialize_view,
    row_text,
)
from .domains import TypeDef, classify_concept, type_extent, variable_domain
from .errors import EventuaError, ParseError, UnknownName
from .evaluator import eval_formula, eval_term, format_value, intension
from .syntax import Comparator, Parser
from .typecheck import signature_of, typecheck
from .universe import World, load_world, summary

DEFAULT_LIMIT = 10000

HELP = """\
eval <formula> at <event>
evalterm <term> at <event>
intension <formula>
intensionterm <term>
classify <term>
typeof <formula-or-term>
setop union|intersect|difference {x | F} {x | G} at <event>
join =|!=|<|>|<=|>= {x | F} {y | G} at <event>
junction <rule> {x | F} {y | G} at <event>
restrict <R> where <formula over x, y> at <event>
evolvent <name> : <b> -> <i> , ...
view <query> along <evolvent> at <b> [as <snapshot-name>]
thetacase <cmp> <term> <operand> along <evolvent> at <b>
type <T> = {x | F}
extent <T> at <event>
vardomain <T> over <event>... limit <n>
:world  :help  :quit"""

EMPTY = "(empty)"


def export_snapshot(snapshot: Snapshot, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(snapshot.render())


def _word(p: Parser, what: str) -> str:
    tok = p.peek()
    if tok.kind != "name" or "@" in tok.text:
        p.fail([what])
    return p.next().text


def _keyword(p: Parser, text: str) -> None:
    tok = p.peek()
    if tok.kind == "name" and tok.text == text:
        p.next()
        return
    p.fail([text])


def _split_word(text: str, what: str) -> tuple[str, str]:
    word, _, rest = text.strip().partition(" ")
    if not word:
        raise ParseError(f"missing {what}", expected=[what])
    return word, rest


@dataclass
class Session:
    world: World
    limit: int = DEFAULT_LIMIT
    out_dir: str | None = None
    evolvents: dict[str, Evolvent] = field(default_factory=dict)
    types: dict[str, TypeDef] = field(default_factory=dict)

    def __post_init__(self):
        self.rules = default_rules().freeze()

    # parsing helpers

    def _query(self, keyword: str, text: str):
        """Parse a query body; returns the query and a parser positioned after it."""
        if keyword == "setop":
            word, rest = _split_word(text, "set operation")
            try:
                op = SetOp(word)
            except ValueError:
                raise ParseError(f"unknown set operation {word!r}", expected=[o.value for o in SetOp]) from None
            p = Parser(rest)
            return SetOpQuery(op, p.abstraction(), p.abstraction()), p
        if keyword == "join":
            word, rest = _split_word(text, "comparator")
            theta = Comparator.parse(word)
            p = Parser(rest)
            return JoinQuery(theta, p.abstraction(), p.abstraction()), p
        if keyword == "junction":
            word, rest = _split_word(text, "rule")
            rule = self.rules.get(word).name
            p = Parser(rest)
            return JunctionQuery(rule, p.abstraction(), p.abstraction()), p
        if keyword == "restrict":
            p = Parser(text)
            rel = p.name()
            _keyword(p, "where")
            return RestrictQuery(rel, p.formula()), p
        if keyword == "eval":
            p = Parser(text)
            return FormulaQuery(p.formula()), p
        raise ParseError(
            f"{keyword!r} is not a query", expected=["eval", "join", "junction", "restrict", "setop"]
        )

    def _evolvent(self, name: str) -> Evolvent:
        try:
            return self.evolvents[name]
        except KeyError:
            raise UnknownName(f"unknown evolvent {name}") from None

    def _type(self, name: str) -> TypeDef:
        try:
            return self.types[name]
        except KeyError:
            raise UnknownName(f"unknown type {name}") from None

    def _at_event(self, p: Parser) -> str:
        _keyword(p, "at")
        event = _word(p, "<event>")
        p.expect_end()
        return event

    def _term_or_formula(self, text: str):
        p = Parser(text)
        try:
            node = p.formula()
            p.expect_end()
            return node
        except ParseError as formula_error:
            p = Parser(text)
            try:
                node = p.term()
                p.expect_end()
                return node
            except ParseError:
                raise formula_error from None

    # command execution

    def execute(self, line: str) -> list[str]:
        line = line.strip()
        if not line or line.startswith("#"):
            return []
        keyword, _, rest = line.partition(" ")
        handler = getattr(self, "_cmd_" + keyword, None)
        if handler is None:
            raise ParseError(f"unknown command {keyword!r}", expected=sorted(self.commands()))
        return handler(rest)

    @classmethod
    def commands(cls):
        return [name[len("_cmd_"):] for name in dir(cls) if name.startswith("_cmd_")]

    def _cmd_eval(self, text):
        p = Parser(text)
        formula = p.formula()
        event = self._at_event(p)
        return [format_value(eval_formula(self.world, {}, formula, event))]

    def _cmd_evalterm(self, text):
        p = Parser(text)
        term = p.term()
        event = self._at_event(p)
        return [format_value(eval_term(self.world, {}, term, event))]

    def _cmd_intension(self, text):
        p = Parser(text)
        formula = p.formula()
        p.expect_end()
        concept = intension(self.world, {}, formula)
        return [f"{e}: {format_value(concept[e])}" for e in self.world.events]

    def _cmd_intensionterm(self, text):
        p = Parser(text)
        term = p.term()
        p.expect_end()
        concept = intension(self.world, {}, term)
        return [f"{e}: {format_value(concept[e])}" for e in self.world.events]

    def _cmd_classify(self, text):
        node = self._term_or_formula(text)
        return [classify_concept(self.world, intension(self.world, {}, node)).value]

    def _cmd_typeof(self, text):
        node = self._term_or_formula(text)
        return [str(typecheck(node, signature_of(self.world)))]

    def _rows(self, query, event):
        rows = algebra.eval_query(self.world, query, event, self.rules)
        if not rows:
            return [EMPTY]
        if isinstance(query, SetOpQuery):
            return sorted(r[0] for r in rows)
        return sorted((row_text(r) for r in rows))

    def _cmd_setop(self, text):
        query, p = self._query("setop", text)
        return self._rows(query, self._at_event(p))

    def _cmd_join(self, text):
        query, p = self._query("join", text)
        return self._rows(query, self._at_event(p))

    def _cmd_junction(self, text):
        query, p = self._query("junction", text)
        return self._rows(query, self._at_event(p))

    def _cmd_restrict(self, text):
        query, p = self._query("restrict", text)
        return self._rows(query, self._at_event(p))

    def _cmd_evolvent(self, text):
        p = Parser(text)
        name = p.name()
        p.expect(":")
        pairs = []
        while True:
            b = _word(p, "<view event>")
            p.expect("->")
            i = _word(p, "<event>")
            pairs.append((b, i))
            if not p.accept(","):
                break
        p.expect_end()
        self.evolvents[name] = make_evolvent(self.world, pairs, name)
        return [f"evolvent {name}"]

    def _view_target(self, p: Parser):
        _keyword(p, "along")
        evolvent = self._evolvent(p.name())
        _keyword(p, "at")
        b = _word(p, "<view event>")
        snapshot_name = None
        if p.peek().kind == "name" and p.peek().text == "as":
            p.next()
            snapshot_name = _word(p, "<snapshot name>")
        p.expect_end()
        return evolvent, b, snapshot_name

    def _cmd_view(self, text):
        keyword, rest = _split_word(text, "query")
        query, p = self._query(keyword, rest)
        evolvent, b, snapshot_name = self._view_target(p)
        snapshot = materialize_view(self.world, query, evolvent, b, self.rules)
        if snapshot_name is not None:
            export_snapshot(snapshot, os.path.join(self.out_dir or ".", snapshot_name + ".snap"))
        return snapshot.render().splitlines()

    def _cmd_thetacase(self, text):
        word, rest = _split_word(text, "comparator")
        theta = Comparator.parse(word)
        p = Parser(rest)
        h = p.term()
        operand = p.term()
        evolvent, b, snapshot_name = self._view_target(p)
        if snapshot_name is not None:
            raise ParseError("thetacase does not produce a snapshot")
        return [format_value(eval_theta_case(self.world, theta, h, operand, evolvent, b))]

    def _cmd_type(self, text):
        p = Parser(text)
        name = p.name()
        p.expect("=")
        abstraction = p.abstraction()
        p.expect_end()
        self.types[name] = TypeDef.from_abstraction(name, abstraction)
        return [f"type {name}"]

    def _cmd_extent(self, text):
        p = Parser(text)
        tdef = self._type(p.name())
        event = self._at_event(p)
        extent = sorted(type_extent(self.world, tdef, event))
        return extent or [EMPTY]

    def _cmd_vardomain(self, text):
        p = Parser(text)
        tdef = self._type(p.name())
        _keyword(p, "over")
        events = []
        while not (p.peek().kind == "name" and p.peek().text == "limit"):
            events.append(_word(p, "<event>"))
        if not events:
            p.fail(["<event>"])
        _keyword(p, "limit")
        tok = p.next()
        if not tok.text.isdigit() or int(tok.text) < 1:
            raise ParseError("limit must be a positive integer", pos=tok.pos)
        p.expect_end()
        limit = min(int(tok.text), self.limit)
        lines = [str(c) for c in variable_domain(self.world, tdef, events, limit)]
        return lines or [EMPTY]


def _read(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load(path, err) -> World | None:
    try:
        return load_world(_read(path))
    except (EventuaError, OSError) as exc:
        print(f"error: {path}: {exc}", file=err)
        return None


def run_script(world_path, script_path, out=None, err=None, limit=DEFAULT_LIMIT, out_dir=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    world = _load(world_path, err)
    if world is None:
        return 2
    try:
        script = _read(script_path)
    except OSError as exc:
        print(f"error: {script_path}: {exc}", file=err)
        return 2
    session = Session(world, limit=limit, out_dir=out_dir)
    status = 0
    for lineno, line in enumerate(script.splitlines(), start=1):
        try:
            lines = session.execute(line)
        except (EventuaError, OSError, ValueError) as exc:
            print(f"line {lineno}: error: {exc}", file=err)
            status = 1
            continue
        for text in lines:
            print(text, file=out)
    return status


def repl(world_path, stdin=None, out=None, err=None, limit=DEFAULT_LIMIT, out_dir=None) -> int:
    stdin = stdin or sys.stdin
    out = out or sys.stdout
    err = err or sys.stderr
    world = _load(world_path, err)
    if world is None:
        return 2
    session = Session(world, limit=limit, out_dir=out_dir)
    interactive = stdin.isatty()
    while True:
        if interactive:
            out.write("eventua> ")
            out.flush()
        line = stdin.readline()
        if not line:
            return 0
        line = line.strip()
        if line == ":quit":
            return 0
        if line == ":world":
            lines = summary(world)
        elif line == ":help":
            lines = HELP.splitlines()
        else:
            try:
                lines = session.execute(line)
            except (EventuaError, OSError, ValueError) as exc:
                print(f"error: {exc}", file=err)
                continue
        for text in lines:
            print(text, file=out)


def main(argv=None) -> int:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--limit", type=int, default=DEFAULT_LIMIT, help="global cap on vardomain output")
    common.add_argument("--out", default=".", help="directory for exported snapshots")

    parser = argparse.ArgumentParser(prog="eventua", description="Event-driven intensional query engine")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", parents=[common], help="execute a query script")
    p_run.add_argument("world")
    p_run.add_argument("script")
    p_repl = sub.add_parser("repl", parents=[common], help="interactive session")
    p_repl.add_argument("world")
    p_check = sub.add_parser("check", help="load and validate a world file")
    p_check.add_argument("world")

    args = parser.parse_args(argv)
    if args.command == "check":
        world = _load(args.world, sys.stderr)
        if world is None:
            return 2
        for line in summary(world):
            print(line)
        return 0
    if args.limit < 1:
        parser.error("--limit must be positive")
    if args.command == "run":
        return run_script(args.world, args.script, limit=args.limit, out_dir=args.out)
    return repl(args.world, limit=args.limit, out_dir=args.out)


if __name__ == "__main__":
    sys.exit(main())
