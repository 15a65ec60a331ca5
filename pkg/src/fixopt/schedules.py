"""Power-law step-size pairs and their admissibility conditions.

A schedule produces two diminishing sequences,

    alpha_n = scale_alpha / (n + 1)**b     (anchor weight)
    inner_n = scale_inner / (n + 1)**a     (gradient or proximal step)

For this family the convergence conditions on (alpha_n, inner_n) reduce to
closed-form exponent tests, which is what :func:`validate` checks:

    gradient algorithm:  0 < a < 1/2  and  a < b < 1 - a
    proximal algorithm:  additionally  a + b < 1

with both scales in (0, 1]. Any validated schedule satisfies the ratio
bound alpha_n/alpha_{n+1}, inner_n/inner_{n+1} <= 2 since
((n+2)/(n+1))**max(a,b) <= 2 for all n >= 0.
"""

from dataclasses import dataclass

__all__ = ["StepSchedule", "validate", "GRADIENT", "PROXIMAL", "ALGORITHMS"]

GRADIENT = "gradient"
PROXIMAL = "proximal"
ALGORITHMS = (GRADIENT, PROXIMAL)


@dataclass(frozen=True)
class StepSchedule:
    a: float
    b: float
    scale_alpha: float = 1e-3
    scale_inner: float = 1e-3

    def value(self, n):
        """(alpha_n, inner_n) at iteration n >= 0."""
        if n < 0:
            raise ValueError(f"iteration index must be nonnegative, got {n}")
        return (
            self.scale_alpha / (n + 1) ** self.b,
            self.scale_inner / (n + 1) ** self.a,
        )

    def alpha(self, n):
        return self.value(n)[0]

    def inner(self, n):
        return self.value(n)[1]


def validate(schedule, algorithm):
    """Violated admissibility conditions for the given algorithm; empty = ok."""
    if algorithm not in ALGORITHMS:
        raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {algorithm!r}")
    a, b = schedule.a, schedule.b
    violations = []
    if not 0 < a < 0.5:
        violations.append("a not in (0, 1/2)")
    if not a < b < 1 - a:
        violations.append("b not in (a, 1 - a)")
    if algorithm == PROXIMAL and not a + b < 1:
        violations.append("a + b not < 1")
    if not 0 < schedule.scale_alpha <= 1:
        violations.append("scale_alpha not in (0, 1]")
    if not 0 < schedule.scale_inner <= 1:
        violations.append("scale_inner not in (0, 1]")
    return violations
