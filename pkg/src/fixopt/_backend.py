"""Kernel backend selection.

The compiled extension is used when importable; otherwise the numpy
implementation takes over. Set ``FIXOPT_BACKEND=python`` (or ``compiled``)
to pin a choice, or call :func:`use` at runtime (benchmarks do).
"""

import os

from . import _kernels_py

try:
    from . import _kernels as _kernels_compiled
except ImportError:
    _kernels_compiled = None

_IMPLS = {"python": _kernels_py}
if _kernels_compiled is not None:
    _IMPLS["compiled"] = _kernels_compiled


def available():
    """Names of the importable kernel implementations."""
    return tuple(sorted(_IMPLS))


_requested = os.environ.get("FIXOPT_BACKEND")
if _requested is None:
    _active_name = "compiled" if _kernels_compiled is not None else "python"
elif _requested in _IMPLS:
    _active_name = _requested
else:
    raise ImportError(
        f"FIXOPT_BACKEND={_requested!r} is not available; choices: {available()}"
    )

_active = _IMPLS[_active_name]


def use(name):
    """Switch the active kernel implementation."""
    global _active, _active_name
    if name not in _IMPLS:
        raise ValueError(f"unknown backend {name!r}; choices: {available()}")
    _active_name = name
    _active = _IMPLS[name]


def current():
    return _active_name


def ball_project(x, center, radius):
    return _active.ball_project(x, center, radius)


def gcfs_apply(x, outer_center, outer_radius, inner_centers, inner_radii):
    return _active.gcfs_apply(x, outer_center, outer_radius,
                              inner_centers, inner_radii)


def gcfs_residual(x, outer_center, outer_radius, inner_centers, inner_radii):
    return _active.gcfs_residual(x, outer_center, outer_radius,
                                 inner_centers, inner_radii)
