"""Exception types raised across the toolkit."""


class MalformedInput(ValueError):
    """A plant, automaton or file does not satisfy its structural invariants."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class InvalidChoice(ValueError):
    """An attack session was handed a move it does not offer."""


class ProtocolError(RuntimeError):
    """An attack session was driven with an event the plant cannot produce."""
