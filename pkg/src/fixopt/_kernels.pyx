# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled geometric kernels; mirrors `_kernels_py` exactly."""

import numpy as np

from libc.math cimport sqrt


cdef void _project(const double[::1] x, const double[::1] c, double r,
                   double[::1] out) noexcept nogil:
    cdef Py_ssize_t d = x.shape[0]
    cdef Py_ssize_t j
    cdef double s = 0.0
    cdef double diff, dist, scale
    for j in range(d):
        diff = x[j] - c[j]
        s += diff * diff
    dist = sqrt(s)
    if dist <= r:
        for j in range(d):
            out[j] = x[j]
        return
    scale = r / dist
    s = 0.0
    for j in range(d):
        out[j] = c[j] + scale * (x[j] - c[j])
        diff = out[j] - c[j]
        s += diff * diff
    # rescale once more so membership holds despite rounding
    dist = sqrt(s)
    if dist > r:
        scale = r / dist
        for j in range(d):
            out[j] = c[j] + scale * (out[j] - c[j])


cdef void _gcfs(const double[::1] x, const double[::1] oc, double orad,
                const double[:, ::1] ic, const double[::1] ir,
                double[::1] mean, double[::1] tmp, double[::1] out) noexcept nogil:
    cdef Py_ssize_t d = x.shape[0]
    cdef Py_ssize_t K = ir.shape[0]
    cdef Py_ssize_t j, k
    for j in range(d):
        mean[j] = 0.0
    for k in range(K):
        _project(x, ic[k], ir[k], tmp)
        for j in range(d):
            mean[j] += tmp[j]
    for j in range(d):
        mean[j] /= K
    _project(mean, oc, orad, out)
    for j in range(d):
        out[j] = 0.5 * (x[j] + out[j])


def ball_project(double[::1] x, double[::1] center, double radius):
    """Nearest point of the closed ball {y : ||y - center|| <= radius}."""
    out_arr = np.empty(x.shape[0])
    cdef double[::1] out = out_arr
    _project(x, center, radius, out)
    return out_arr


def gcfs_apply(double[::1] x, double[::1] outer_center, double outer_radius,
               double[:, ::1] inner_centers, double[::1] inner_radii):
    """0.5 * (x + P_outer(mean_k P_k(x))) for K inner balls."""
    cdef Py_ssize_t d = x.shape[0]
    mean_arr = np.empty(d)
    tmp_arr = np.empty(d)
    out_arr = np.empty(d)
    cdef double[::1] mean = mean_arr
    cdef double[::1] tmp = tmp_arr
    cdef double[::1] out = out_arr
    _gcfs(x, outer_center, outer_radius, inner_centers, inner_radii,
          mean, tmp, out)
    return out_arr


def gcfs_residual(double[::1] x, double[::1] outer_center, double outer_radius,
                  double[:, ::1] inner_centers, double[::1] inner_radii):
    """||x - gcfs_apply(x, ...)||."""
    cdef Py_ssize_t d = x.shape[0]
    mean_arr = np.empty(d)
    tmp_arr = np.empty(d)
    out_arr = np.empty(d)
    cdef double[::1] mean = mean_arr
    cdef double[::1] tmp = tmp_arr
    cdef double[::1] out = out_arr
    cdef double s = 0.0
    cdef double diff
    cdef Py_ssize_t j
    _gcfs(x, outer_center, outer_radius, inner_centers, inner_radii,
          mean, tmp, out)
    for j in range(d):
        diff = x[j] - out[j]
        s += diff * diff
    return sqrt(s)
