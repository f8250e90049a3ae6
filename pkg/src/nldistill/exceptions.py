"""Exception types shared across the package."""


class NLDistillError(Exception):
    """Base class for all package errors."""


class InvalidBehavior(NLDistillError, ValueError):
    """A table violates the 2-2-2 no-signaling behavior invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        msg = "; ".join(str(v) for v in self.violations) or "invalid behavior"
        super().__init__(msg)


class WeightError(NLDistillError, ValueError):
    pass


class NotInSimplex(NLDistillError, ValueError):
    pass


class UnknownName(NLDistillError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown name"


class SchemaError(NLDistillError, ValueError):
    pass


class DomainError(NLDistillError, ValueError):
    pass


class ShapeError(NLDistillError, ValueError):
    pass


class EmptyList(NLDistillError, ValueError):
    pass


class GridError(NLDistillError, ValueError):
    pass


class DegenerateAngle(DomainError):
    pass
