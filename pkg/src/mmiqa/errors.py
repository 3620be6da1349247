"""Exception types raised across the package.

Everything derives from ValueError (or FileNotFoundError for missing
files) so callers that do not care about the distinction can catch the
builtin bases.
"""


class ImageTooSmall(ValueError):
    """Image is below the minimum size required by an operation."""


class EvenStructuringElement(ValueError):
    """Morphological window side must be odd."""


class BadWeights(ValueError):
    """Fusion weights are negative or do not sum to one."""


class BadLevel(ValueError):
    """Distortion level outside the allowed set (or not positive)."""


class EmptyInput(ValueError):
    """An input collection (directory, manifest) contained no usable entries."""


class DegenerateInput(ValueError):
    """Statistical input is constant, too small, or otherwise unusable."""


class SchemaError(ValueError):
    """A CSV input does not match the expected schema."""


class ParseError(ValueError):
    """A config file line could not be parsed."""


class InvalidWeights(ParseError):
    """Config weights fail validation (e.g. do not sum to one)."""


class MissingFile(FileNotFoundError):
    """A file referenced by a manifest does not exist."""


class DecodeError(ValueError):
    """An image file could not be decoded."""


class NoInputs(ValueError):
    """A command received no input files."""
