from .ast import *  # noqa: F401,F403
from .ast import Real, Type, Term, DiffExpr, RealExpr
from .parser import parse_diff, parse_term, parse_type
from .printer import format_real, print_diff, print_real, print_term, print_type
