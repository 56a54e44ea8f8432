"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Malformed game, profile, or parameter."""


class UnsupportedShapeError(ValueError):
    """Operation needs a game shape it was not given (e.g. portraits)."""


class BoundaryError(ValueError):
    """A 1/x quotient was requested at a point too close to the simplex boundary."""


class PreconditionError(ValueError):
    """A documented precondition of an operation does not hold."""
