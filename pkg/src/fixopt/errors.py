"""Exception types shared across the package."""


class DimensionMismatchError(ValueError):
    """Operands live in spaces of different dimension."""


class NonsmoothFunctionError(TypeError):
    """A gradient was requested from a function that has none."""


class ScheduleValidationError(ValueError):
    """A step-size schedule fails the admissibility conditions.

    ``violations`` lists the failed conditions by name.
    """

    def __init__(self, algorithm, violations):
        self.algorithm = algorithm
        self.violations = list(violations)
        super().__init__(
            f"schedule not admissible for the {algorithm} algorithm: "
            + "; ".join(self.violations)
        )
