from .formula import *  # noqa: F401,F403
from .compile import (Relation, compile_formula, decide_sentence, is_eventually_periodic,
                      relation_addition)
from .bounded import eval_formula_bounded
from .sexpr import parse_formula, to_sexpr
