"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class EPDError(Exception):
    """Base class for every error raised by this package."""


class UnknownVertexError(EPDError, KeyError):
    def __init__(self, vertex):
        super().__init__(vertex)
        self.vertex = vertex

    def __str__(self):
        return f"unknown vertex {self.vertex!r}"


class InvalidMapError(EPDError):
    """The atom-atom map failed validation; ``report`` lists every violation."""

    def __init__(self, report):
        self.report = report
        super().__init__("invalid atom-atom map:\n" + report.describe())


class UnbalancedError(EPDError):
    def __init__(self, vertex, d_plus, d_minus):
        self.vertex = vertex
        self.d_plus = d_plus
        self.d_minus = d_minus
        super().__init__(
            f"vertex {vertex!r} is unbalanced: d+={d_plus}, d-={d_minus}"
        )


class MalformedWalkError(EPDError):
    pass


class InapplicableEPDError(EPDError):
    def __init__(self, pair, available, required):
        self.pair = pair
        self.available = available
        self.required = required
        super().__init__(
            f"EPD not applicable: pair {pair[0]}-{pair[1]} has multiplicity "
            f"{available} but {required} negative step(s) remove it"
        )


class InternalConsistencyError(EPDError):
    """An invariant that the algorithms guarantee was found broken."""


class RewriteError(EPDError):
    pass


class ParseError(EPDError):
    def __init__(self, line: int, column: int, message: str):
        self.line = line
        self.column = column
        self.message = message
        super().__init__(f"line {line}, column {column}: {message}")
