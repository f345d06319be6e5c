"""A simply-typed lambda calculus over the reals with differential logical relations."""

__version__ = "0.1.0"
