"""Exception types raised across tapekit."""


class TapekitError(Exception):
    """Base class for all library errors."""


class ArityError(TapekitError, ValueError):
    """An address or tape does not fit the tape space it is used with."""


class ParseError(TapekitError, ValueError):
    """Malformed tape literal, code s-expression, map name or JSON document."""


class DegenerateMeasureError(TapekitError, ValueError):
    """An almost-sure operation was asked to use a measure with a bias of 0 or 1."""


class UnsupportedPushforward(TapekitError):
    """Pushforward along a non-injective address map is not a product measure."""


class EmptyFamily(TapekitError, ValueError):
    pass


class PropositionUndefined(TapekitError, KeyError):
    """A finite test table has no entry for an outcome it was asked about."""


class TransportFault(TapekitError, AssertionError):
    """A transported judgment failed to re-verify.

    The transport theorem says this cannot happen, so it signals a bug in
    the evaluator or the translation, never a problem with user input.
    """
