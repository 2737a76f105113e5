"""Acceptance criteria 1-10.

Each ``check_N`` returns ``(ok, detail)``.  Under pytest the results are also
listed in the terminal summary; ``python tests/test_acceptance.py`` prints the
same PASS/FAIL lines directly.
"""

import dataclasses
import pathlib
import random
import subprocess
import sys
import time

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from generators import (  # noqa: E402
    ALL_CMPS,
    AstGen,
    FormulaGen,
    depth_of,
    random_evolvent,
    random_query,
    random_world,
)
from oracle import Oracle  # noqa: E402

from eventua import syntax as s  # noqa: E402
from eventua.algebra import (  # noqa: E402
    APPLICATION,
    ATOMIC,
    CONSTANT_FUNCTION,
    ORDERED_PAIR,
    Evolvent,
    eval_query,
    eval_theta_case,
    identity_evolvent,
    junction,
    operand_shape,
    shift,
    theta_join,
)
from eventua.domains import TypeDef, type_extent, variable_domain  # noqa: E402
from eventua.evaluator import eval_formula, exists_physically  # noqa: E402
from eventua.syntax import Comparator, iff, implies, theta_atom  # noqa: E402
from eventua.universe import FunctionConst  # noqa: E402

DEMO = pathlib.Path(__file__).resolve().parent.parent / "demo"


def outcome(fn, *args):
    try:
        return ("ok", fn(*args))
    except Exception as exc:  # error classes must agree too
        return ("err", type(exc).__name__)


# 1 ---------------------------------------------------------------------------

def check_1():
    rng = random.Random(1001)
    start = time.perf_counter()
    worlds = formulas = mismatches = 0
    for _ in range(500):
        world = random_world(rng)
        gen, oracle = FormulaGen(rng, world), Oracle(world)
        worlds += 1
        for _ in range(20):
            f = gen.formula(4)
            assert depth_of(f) <= 4 and not s.free_vars(f)
            formulas += 1
            for e in world.events:
                if eval_formula(world, {}, f, e) != oracle.sat(f, e):
                    mismatches += 1
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and elapsed < 60
    return ok, f"{worlds} worlds, {formulas} formulas, {mismatches} mismatches, {elapsed:.1f}s"


# 2 and 3 ---------------------------------------------------------------------

def _description_pairs(seed, count):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        world = random_world(rng)
        gen = FormulaGen(rng, world)
        for _ in range(5):
            phi = gen.open_formula(3, "x")
            assert s.free_vars(phi) <= {"x"}
            out.append((world, phi))
    return out[:count]


def axiom_instance(phi):
    x, y = s.Var("x"), s.Var("y")
    return s.ForallH("y", iff(s.Eq(y, s.Iota("x", phi)), s.ForallH("x", iff(phi, s.Eq(x, y)))))


def theorem_instances(phi):
    x, y = s.Var("x"), s.Var("y")
    desc = s.Iota("x", phi)
    first = iff(s.Exist(desc), s.ExistsH("y", s.ForallH("x", iff(phi, s.Eq(x, y)))))
    second = implies(s.Exist(desc), s.substitute(phi, "x", desc))
    return first, second


def check_2():
    pairs = _description_pairs(2002, 1000)
    bad = 0
    for world, phi in pairs:
        f = axiom_instance(phi)
        bad += sum(not eval_formula(world, {}, f, e) for e in world.events)
    return bad == 0, f"{len(pairs)} pairs, {bad} counterexamples"


def check_3():
    pairs = _description_pairs(2002, 1000)
    bad = 0
    for world, phi in pairs:
        for f in theorem_instances(phi):
            bad += sum(not eval_formula(world, {}, f, e) for e in world.events)
    return bad == 0, f"{len(pairs)} pairs, both parts, {bad} counterexamples"


# 4 ---------------------------------------------------------------------------

def check_4():
    rng = random.Random(4004)
    checked = bad = 0
    for _ in range(300):
        world = random_world(rng)
        gen = FormulaGen(rng, world)
        for _ in range(10):
            t = gen.term(3, frozenset())
            for e in world.events:
                checked += 1
                if exists_physically(world, {}, t, e) != eval_formula(world, {}, s.Exist(t), e):
                    bad += 1
    return bad == 0, f"{checked} (term, event) pairs, {bad} mismatches"


# 5 ---------------------------------------------------------------------------

def check_5():
    rng = random.Random(5005)
    pairs = bad = points = 0
    while pairs < 200:
        world = random_world(rng, numeric=rng.random() < 0.5)
        q = random_query(rng, world)
        f = random_evolvent(rng, world, "f")
        g = Evolvent({f"c{k}": rng.choice(f.view_events) for k in range(3)}, "g")
        pairs += 1
        shifted = shift(q, f)
        for b in f.view_events:
            points += 1
            if outcome(eval_query, world, shifted, b) != outcome(eval_query, world, q, f(b)):
                bad += 1
        twice = shift(shifted, g)
        for c in g.view_events:
            points += 1
            if outcome(eval_query, world, twice, c) != outcome(eval_query, world, q, f(g(c))):
                bad += 1
        one = shift(q, identity_evolvent(world))
        for i in world.events:
            points += 1
            if outcome(eval_query, world, one, i) != outcome(eval_query, world, q, i):
                bad += 1
    return bad == 0, f"{pairs} (query, evolvent) pairs, {points} points, {bad} mismatches"


# 6 ---------------------------------------------------------------------------

def numeric_world_with_functions(rng):
    world = random_world(rng, numeric=True, functions=False)
    names = [ind.name for ind in world.individuals]
    fns = {
        "g": FunctionConst("g", {n: rng.choice(names) for n in names}),
        "k": FunctionConst(
            "k", kind="intensional",
            by_event={e: {n: rng.choice(names) for n in names} for e in world.events},
        ),
    }
    return dataclasses.replace(world, functions=fns)


def theta_instance(rng, shape):
    world = numeric_world_with_functions(rng)
    gen = FormulaGen(rng, world, allow_pairs=False)
    c = lambda: s.Const(rng.choice(gen.names))  # noqa: E731
    if shape == ATOMIC:
        operand = c()
    elif shape == CONSTANT_FUNCTION:
        operand = s.App(s.FnRef("g"), c())
    elif shape == APPLICATION:
        operand = s.App(s.FnRef("k"), c())
    else:
        operand = s.Pair(c(), c())
    if shape == ORDERED_PAIR:
        theta = rng.choice([Comparator.EQ, Comparator.NEQ])
        h = s.Pair(c(), c()) if rng.random() < 0.7 else gen.individual_term(2, frozenset())
    else:
        theta = rng.choice(ALL_CMPS)
        h = gen.individual_term(rng.randint(0, 3), frozenset())
    return world, theta, h, operand, random_evolvent(rng, world)


def check_6():
    rng = random.Random(6006)
    counts = {}
    bad = 0
    for shape in (ATOMIC, CONSTANT_FUNCTION, ORDERED_PAIR, APPLICATION):
        counts[shape] = 0
        while counts[shape] < 100:
            world, theta, h, operand, f = theta_instance(rng, shape)
            assert operand_shape(world, operand) == shape
            counts[shape] += 1
            atom = theta_atom(theta, h, operand)
            for b in f.view_events:
                got = outcome(eval_theta_case, world, theta, h, operand, f, b)
                want = outcome(eval_formula, world, {}, atom, f(b))
                if got != want:
                    bad += 1
    detail = ", ".join(f"{k}: {v}" for k, v in counts.items())
    return bad == 0, f"{detail}; {bad} mismatches"


# 7 ---------------------------------------------------------------------------

def check_7():
    rng = random.Random(7007)
    bad = 0
    for n in range(200):
        world = random_world(rng, numeric=True)
        gen = FormulaGen(rng, world)
        theta = ALL_CMPS[n % len(ALL_CMPS)]
        lhs, rhs = gen.abstraction(3, "x"), gen.abstraction(3, "y")
        name = f"theta:{rng.choice([theta.symbol, theta.name])}"
        for e in world.events:
            if junction(world, name, lhs, rhs, e) != theta_join(world, theta, lhs, rhs, e):
                bad += 1
    return bad == 0, f"200 inputs, {bad} mismatches"


# 8 ---------------------------------------------------------------------------

def check_8():
    rng = random.Random(8008)
    done = bad = biggest = 0
    while done < 100:
        world = random_world(rng, max_v=9, max_h=8, max_i=4)
        gen = FormulaGen(rng, world)
        body = gen.open_formula(3, "x")
        if rng.random() < 0.3:
            body = s.Or(body, s.Exist(s.Var("x")))  # whole of H: large domains
        elif "x" not in s.free_vars(body):
            body = s.And(s.Eq(s.Var("x"), s.Var("x")), body)
        tdef = TypeDef("T", "x", body)
        events = rng.sample(world.events, rng.randint(1, len(world.events)))
        expected = 1
        for e in events:
            expected *= len(type_extent(world, tdef, e))
        if expected > 4096:
            continue
        done += 1
        biggest = max(biggest, expected)
        funcs = list(variable_domain(world, tdef, events, 10**6))
        if len(funcs) != expected or len(set(funcs)) != expected:
            bad += 1
    return bad == 0, f"100 types, largest domain {biggest}, {bad} wrong counts"


# 9 ---------------------------------------------------------------------------

def check_9():
    rng = random.Random(9009)
    gen = AstGen(rng)
    bad = 0
    for _ in range(2000):
        node = gen.node(6)
        assert depth_of(node) <= 6
        text = s.print_ast(node)
        parse = s.parse_term if isinstance(node, s.TERM_TYPES) else s.parse_formula
        try:
            if parse(text) != node:
                bad += 1
        except Exception:
            bad += 1
    return bad == 0, f"2000 ASTs, {bad} failures"


# 10 --------------------------------------------------------------------------

def run_demo():
    proc = subprocess.run(
        [sys.executable, "-m", "eventua", "run", "demo.world", "golden.script"],
        cwd=DEMO, capture_output=True,
    )
    return proc.returncode, proc.stdout


def check_10():
    commands = [
        ln for ln in (DEMO / "golden.script").read_text().splitlines()
        if ln.strip() and not ln.lstrip().startswith("#")
    ]
    first, second = run_demo(), run_demo()
    golden = (DEMO / "golden.out").read_bytes()
    ok = len(commands) == 25 and first == second and first[0] == 0 and first[1] == golden
    return ok, f"{len(commands)} commands, identical runs: {first == second}, matches golden: {first[1] == golden}"


# ---------------------------------------------------------------------------

TITLES = {
    1: "semantics oracle agreement",
    2: "description axiom scheme",
    3: "description existence theorem",
    4: "existence expansion",
    5: "evolvent laws",
    6: "comparator cases under an evolvent",
    7: "junction subsumes theta-join",
    8: "variable-domain cardinality",
    9: "parser round trip",
    10: "CLI determinism",
}
CHECKS = {n: globals()[f"check_{n}"] for n in TITLES}


def _run(n, record):
    ok, detail = CHECKS[n]()
    record(n, TITLES[n], ok, detail)
    assert ok, detail


def test_criterion_1(record):
    _run(1, record)


def test_criterion_2(record):
    _run(2, record)


def test_criterion_3(record):
    _run(3, record)


def test_criterion_4(record):
    _run(4, record)


def test_criterion_5(record):
    _run(5, record)


def test_criterion_6(record):
    _run(6, record)


def test_criterion_7(record):
    _run(7, record)


def test_criterion_8(record):
    _run(8, record)


def test_criterion_9(record):
    _run(9, record)


def test_criterion_10(record):
    _run(10, record)


if __name__ == "__main__":
    failed = 0
    for n in TITLES:
        ok, detail = CHECKS[n]()
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'} criterion {n}: {TITLES[n]} ({detail})")
    sys.exit(1 if failed else 0)
