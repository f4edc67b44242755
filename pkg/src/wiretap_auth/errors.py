"""Exception types shared across the library."""


class LengthMismatchError(ValueError):
    """Two bit vectors (or a vector and a declared length) disagree in size."""


class DomainError(ValueError):
    """A numeric argument lies outside its legal range."""


class NoPositiveSecrecyError(ValueError):
    """Eavesdropper channel is strictly better than the main channel."""


class NotPowerOfTwoError(ValueError):
    """Block-structured operation got a length that is not a power of two."""


class TooLargeError(ValueError):
    """Exact (enumeration-based) computation requested beyond toy scale."""


class ZeroStateError(ValueError):
    """LFSR initial state is all-zero and would generate a constant stream."""


class MalformedInputError(ValueError):
    """Decoder input is structurally invalid (wrong length)."""


class InsufficientSecureCapacityError(ValueError):
    """Derived secure index set is too small to carry the requested tag."""
