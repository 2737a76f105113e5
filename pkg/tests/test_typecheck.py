import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from generators import FormulaGen, random_world
from eventua.errors import TypeMismatch, UnknownName
from eventua.syntax import App, FnRef, parse_formula as F, parse_term as T
from eventua.typecheck import (
    TWO,
    V,
    Arrow,
    Indexed,
    Prod,
    TVar,
    lift,
    product,
    signature_of,
    solve,
    typecheck,
)


def test_binary_predicate_solves_alpha():
    t, sig = solve(F("R([x,y])"), {"R": Arrow(TVar("alpha"), TWO)})
    assert t == TWO
    assert sig["R"] == Arrow(Prod(V, V), TWO)
    assert str(sig["R"]) == "((V x V) -> 2)"


def test_pair_term():
    assert typecheck(T("[x,y]"), {}) == Prod(V, V)
    assert typecheck(T("[[x,y],#a]"), {}) == Prod(Prod(V, V), V)


def test_arrow_domain_violation():
    with pytest.raises(TypeMismatch):
        typecheck(T("g([x,y])"), {"g": Arrow(V, V)})


def test_application_and_descriptions():
    sig = {"g": Arrow(V, V), "P": Arrow(V, TWO)}
    assert typecheck(T("g(iota x. P(x))"), sig) == V
    assert typecheck(T("rest(g(#a), P(#a))"), sig) == V
    assert typecheck(F("forall x. P(g(x)) & E(x)"), sig) == TWO


def test_function_variable_is_solved():
    t, sig = solve(T("h([#a, #b])"), {"h": TVar("beta")})
    assert isinstance(t, TVar)
    assert isinstance(sig["h"], Arrow) and sig["h"].dom == Prod(V, V)


@pytest.mark.parametrize(
    "node, sig",
    [
        (F("P(#a, #b)"), {"P": Arrow(V, TWO)}),
        (F("[x, y] = x"), {}),
        (F("[x, y] < [x, y]"), {}),
        (F("E([x, y])"), {}),
        (F("P(x)"), {"P": V}),
        (T("g(#a)"), {"g": V}),
    ],
)
def test_mismatches(node, sig):
    with pytest.raises(TypeMismatch):
        typecheck(node, sig)


def test_occurs_check():
    with pytest.raises(TypeMismatch):
        typecheck(App(FnRef("h"), FnRef("h")), {"h": TVar("a")})


def test_unknown_name():
    with pytest.raises(UnknownName):
        typecheck(F("P(x)"), {})


def test_lift():
    assert lift(Arrow(Prod(V, V), TWO)) == Arrow(Prod(Indexed(V), Indexed(V)), Indexed(TWO))
    assert str(lift(Arrow(V, TWO))) == "(V^I -> 2^I)"
    assert product([V]) == V
    assert product([V, V, V]) == Prod(V, Prod(V, V))


def test_signature_of(w0):
    sig = signature_of(w0)
    assert sig["P"] == Arrow(V, TWO)
    assert sig["Q"] == Arrow(Prod(V, V), TWO)
    assert sig["g"] == Arrow(V, V)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_generated_formulas_are_well_typed(seed):
    rng = random.Random(seed)
    w = random_world(rng)
    # pair-free generation keeps every comparison between individuals
    f = FormulaGen(rng, w, allow_pairs=False).formula(4)
    assert typecheck(f, signature_of(w)) == TWO
