"""Exceptions shared across the package."""


class CapExceeded(Exception):
    """A construction would pass its size cap; carries the count and the cap."""

    def __init__(self, what: str, count: int, cap: int):
        super().__init__(f"{what}: {count} exceeds cap {cap}")
        self.what = what
        self.count = count
        self.cap = cap


class BudgetExceeded(Exception):
    """A valuation sweep would pass the configured budget."""

    def __init__(self, what: str, needed: int, budget: int):
        super().__init__(f"{what}: {needed} valuations exceed budget {budget}")
        self.what = what
        self.needed = needed
        self.budget = budget


class MalformedTables(Exception):
    """Operation tables or serialized algebra data are structurally broken."""


class NotACongruence(Exception):
    """A partition handed to quotient() is not compatible with the operations."""


class NotPrime(Exception):
    """A filter handed to the congruence constructor is not a prime filter."""


class BadIndex(Exception):
    """A (T, L) join-irreducible index violates its side conditions."""


class ParseError(Exception):
    """Term syntax error; ``pos`` is the 0-based offset in the input."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class UnknownIdentifier(ParseError):
    """An identifier that is not x<digits>."""


class UnboundVariable(Exception):
    """A term was evaluated under a valuation missing one of its variables."""
