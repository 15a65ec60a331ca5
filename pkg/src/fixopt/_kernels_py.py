"""Pure-numpy implementations of the hot geometric kernels.

`_kernels.pyx` provides compiled versions with identical signatures; the
active implementation is chosen in `_backend`.
"""

import numpy as np


def ball_project(x, center, radius):
    """Nearest point of the closed ball {y : ||y - center|| <= radius}."""
    diff = x - center
    dist = float(np.linalg.norm(diff))
    if dist <= radius:
        return x.copy()
    out = center + (radius / dist) * diff
    # rescale once more so membership holds despite rounding
    overshoot = float(np.linalg.norm(out - center))
    if overshoot > radius:
        out = center + (radius / overshoot) * (out - center)
    return out


def gcfs_apply(x, outer_center, outer_radius, inner_centers, inner_radii):
    """0.5 * (x + P_outer(mean_k P_k(x))) for K inner balls."""
    acc = np.zeros_like(x)
    for k in range(inner_radii.shape[0]):
        acc += ball_project(x, inner_centers[k], inner_radii[k])
    acc /= inner_radii.shape[0]
    return 0.5 * (x + ball_project(acc, outer_center, outer_radius))


def gcfs_residual(x, outer_center, outer_radius, inner_centers, inner_radii):
    """||x - gcfs_apply(x, ...)||."""
    out = gcfs_apply(x, outer_center, outer_radius, inner_centers, inner_radii)
    return float(np.linalg.norm(x - out))
