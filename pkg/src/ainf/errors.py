"""Exception types raised by the engine.

Mathematical *failures* (a residual in an identity check, a nonvanishing
obstruction class, an unsolvable linear system) are returned as values.
The classes below are reserved for invalid input and for contract
violations that indicate a bug.
"""


class AInfError(Exception):
    """Base class for all engine errors."""


class SpaceMismatch(AInfError):
    def __init__(self, expected, got, what="map"):
        self.expected = expected
        self.got = got
        super().__init__(
            f"{what}: space mismatch, expected {_name(expected)!r}, got {_name(got)!r}"
        )


def _name(space):
    return getattr(space, "name", space)


class DegreeError(AInfError):
    """An entry or component violates its declared degree."""


class NotAChainComplex(AInfError):
    """d∘d ≠ 0 at construction."""


class HomotopyIdentityFails(AInfError):
    pass


class NonInvertibleLinearPart(AInfError):
    pass


class VertexArityExceedsTruncation(AInfError):
    pass


class DgMorphismCheckFailed(AInfError):
    def __init__(self, message, residuals=()):
        self.residuals = list(residuals)
        super().__init__(message)


class ObstructionUnsolvable(AInfError):
    def __init__(self, arity, message=""):
        self.arity = arity
        super().__init__(message or f"obstruction at arity {arity} does not vanish")


class NotStrictLeftInverse(AInfError):
    pass


class PartialMorphismInvalid(AInfError):
    pass


class KernelSolveFailed(AInfError):
    pass


class NotQuasiIso(AInfError):
    pass


class ParseError(AInfError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
