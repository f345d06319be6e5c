"""Exception hierarchy.

``StlrError`` covers user-facing problems (bad input, ill-typed terms, sort
mismatches).  ``InternalError`` marks conditions that only an implementation bug
can produce on well-typed input, such as running out of fuel.
"""


class StlrError(Exception):
    pass


class ParseError(StlrError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message = message
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line else ""
        super().__init__(f"{where}{message}")


class TypeCheckError(StlrError):
    pass


class AmbiguousTypeError(TypeCheckError):
    """A schematic constant appeared where no expected type is available."""


class SortError(StlrError):
    """A difference expression or value does not live in the expected space."""


class RegistryError(StlrError):
    pass


class EvalError(StlrError):
    """Stuck evaluation.  Unreachable for closed well-typed terms."""


class GeneratorExhausted(StlrError):
    """The sampler cannot produce premises of the requested type."""


class InternalError(Exception):
    pass


class FuelExhausted(InternalError):
    def __init__(self, fuel: int):
        self.fuel = fuel
        super().__init__(f"evaluation exceeded fuel budget of {fuel} steps")


class GmdError(StlrError):
    """Mismatched carriers or an oversized construction in the GMD module."""
