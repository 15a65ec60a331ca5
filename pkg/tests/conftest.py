import numpy as np

from fixopt import Ball, BallProjection, GcfsComposite, HalfAveraged, Identity


def random_ball(rng, d):
    return Ball(rng.uniform(-1.0, 1.0, d), 0.1 + rng.random())


def golden_section_prox(f, z, gamma, tol=1e-8):
    """Coordinatewise golden-section minimization of gamma*f(y) + 0.5||z-y||^2.

    Independent check for the closed-form prox; both objective families are
    separable, so each coordinate is minimized on its own bracket.
    """
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    out = np.empty_like(z)
    for j in range(z.shape[0]):
        def obj(t):
            # separable objective: off-coordinate terms are a constant offset
            y = z.copy()
            y[j] = t
            return gamma * f.value(y) + 0.5 * (z[j] - t) ** 2

        span = 10.0 * (1.0 + gamma) + abs(z[j])
        a, b = z[j] - span, z[j] + span
        c, d = b - invphi * (b - a), a + invphi * (b - a)
        while b - a > tol:
            if obj(c) < obj(d):
                b, d = d, c
                c = b - invphi * (b - a)
            else:
                a, c = c, d
                d = a + invphi * (b - a)
        out[j] = 0.5 * (a + b)
    return out


def random_operator(rng, d, depth=0):
    """Random member of the operator grammar (bounded recursion depth)."""
    kinds = ["identity", "projection", "gcfs"]
    if depth < 2:
        kinds.append("half")
    kind = kinds[rng.integers(len(kinds))]
    if kind == "identity":
        return Identity()
    if kind == "projection":
        return BallProjection(random_ball(rng, d))
    if kind == "gcfs":
        inner = tuple(random_ball(rng, d) for _ in range(int(rng.integers(1, 4))))
        return GcfsComposite(random_ball(rng, d), inner)
    return HalfAveraged(random_operator(rng, d, depth + 1))
