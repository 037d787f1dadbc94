"""Shared exception types."""


class CountbmcError(Exception):
    """Base class for all errors raised by this package on bad input."""


class NetError(CountbmcError):
    """A net, marking, or firing request violates the net structure."""


class ParseError(CountbmcError):
    """Malformed net file or property text.

    `where` carries an element path (PNML) or line/column position (text
    formats); it is folded into the message.
    """

    def __init__(self, message, where=None):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)


class UnsupportedFormatError(ParseError):
    """Recognized but unsupported input (e.g. a colored-net PNML type)."""


class NameResolutionError(CountbmcError):
    """A formula refers to a place or transition the net does not define."""


class BudgetExceededError(CountbmcError):
    """Explicit-state enumeration would exceed the configured budget."""


class SoundnessError(CountbmcError):
    """Internal invariant broken (e.g. a solver model that fires two
    transitions in one step).  Indicates an encoder or solver bug, never
    repaired silently."""
