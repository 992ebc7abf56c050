"""Exception hierarchy shared by all modules."""


class CantorExtError(Exception):
    """Base class for every error raised by cantorext."""


class NotStationary(CantorExtError):
    """The diagram has no repeating tail block."""


class BadCuts(CantorExtError):
    pass


class LevelOutOfRange(CantorExtError):
    pass


class NotProperlyOrdered(CantorExtError):
    pass


class InvalidPath(CantorExtError):
    """Edges do not chain, or a tail cannot continue the given prefix."""


class DepthExhausted(CantorExtError):
    pass


class IsMaximumPath(CantorExtError):
    """Raised by ``successor`` at x^max, which has no successor among paths."""


class IsMinimumPath(CantorExtError):
    """Raised by ``predecessor`` at x^min."""


class NotPrimitive(CantorExtError):
    pass


class UndecidableNonInjective(CantorExtError):
    pass


class UnknownPreset(CantorExtError):
    pass


class IdentityHasNoUniqueFixedPoint(CantorExtError):
    pass


class NotInImage(CantorExtError):
    """A point has no preimage under a map (raised only where a preimage is required)."""


class CannotTelescope(CantorExtError):
    pass


class NoAvoidingPath(CantorExtError):
    pass


class IdSubgraphNotSinglePath(CantorExtError):
    pass


class DimensionUnsupported(CantorExtError):
    pass


class FormatError(CantorExtError):
    """Malformed diagram or IFS input."""
