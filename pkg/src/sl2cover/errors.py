"""Exception types raised across the package."""


class InvalidLift(ValueError):
    """A map fails to be a lift of an orientation-preserving circle homeomorphism."""


class ConvergenceFailure(RuntimeError):
    """A root bracket could not be established while inverting a lift."""


class CocycleNotIntegral(ArithmeticError):
    """The deck-shift cocycle drifted too far from an integer to be rounded safely."""

    def __init__(self, value, tol):
        super().__init__(f"cocycle {value!r} is not within {tol:g} of an integer")
        self.value = value
        self.tol = tol


class PreconditionViolated(ValueError):
    """An operation was called on inputs outside its domain."""


class NotCentral(PreconditionViolated):
    """A subgroup that was required to be central is not."""


class EquivalenceViolation(AssertionError):
    """Conditions that must be logically equivalent evaluated differently."""
