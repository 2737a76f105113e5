"""Event-driven intensional query engine over finite worlds."""

from .universe import World, actual_at, dump_world, load_world
from .syntax import parse_formula, parse_term, print_ast
from .evaluator import eval_formula, eval_term, exists_physically, intension

__all__ = [
    "World",
    "actual_at",
    "dump_world",
    "eval_formula",
    "eval_term",
    "exists_physically",
    "intension",
    "load_world",
    "parse_formula",
    "parse_term",
    "print_ast",
]
