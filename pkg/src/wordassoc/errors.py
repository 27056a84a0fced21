"""Exception types shared across the package."""


class WordAssocError(Exception):
    """Base class for errors raised by this package."""


class DataFormatError(WordAssocError):
    """A file (corpus, index, pair list, gold set, pi table) is malformed."""


class UnsupportedPairError(WordAssocError):
    """Raised for word pairs the counting model does not define (x == y)."""
