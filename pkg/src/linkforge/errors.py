"""Exception hierarchy shared across the package."""


class LinkForgeError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(LinkForgeError):
    """Malformed input: bad PD code, bad polynomial text, unrealizable
    closure pattern, or an operation applied outside its domain."""


class ResourceCapError(LinkForgeError):
    """A computation was refused because it would exceed a configured
    resource cap (e.g. the state-sum crossing cap)."""


class NormalizationError(LinkForgeError):
    """An internal consistency check failed, e.g. a bracket polynomial
    whose writhe normalization leaves quarter-integer exponents.  This
    signals a malformed diagram or an orientation bug, not bad user input."""
