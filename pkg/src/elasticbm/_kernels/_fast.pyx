# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``_pyref``; same arithmetic, same order.

Loops run per path with the GIL released so callers can fan blocks out over
threads.  No -ffast-math at build time: bit-compatibility with the numpy
fallback matters more than the last few percent.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, isnan, log, sqrt

cnp.import_array()

cdef double NAN = float("nan")


def bang_bang_chunk(double[::1] y, double[::1] s, double[::1] env,
                    double[::1] kill_level, long long[::1] kill_step,
                    long long step0, double[:, ::1] z, double theta, double dt):
    cdef Py_ssize_t m = z.shape[0], n = z.shape[1]
    cdef Py_ssize_t i, j
    cdef double sq = sqrt(2.0 * dt)
    cdef double yi, si, ei, sg, yn, g
    with nogil:
        for i in range(n):
            yi = y[i]
            si = s[i]
            ei = env[i]
            for j in range(m):
                sg = 1.0 if yi > 0.0 else (-1.0 if yi < 0.0 else 0.0)
                yn = yi + (-theta * sg * dt + sq * z[j, i])
                si = si + sg * (yn - yi)
                yi = yn
                g = fabs(yi) - si
                if g > ei:
                    ei = g
                if kill_step[i] < 0 and ei >= kill_level[i]:
                    kill_step[i] = step0 + j + 1
            y[i] = yi
            s[i] = si
            env[i] = ei


def bang_bang_path(double y0, double[::1] z, double theta, double dt):
    cdef Py_ssize_t n = z.shape[0], j
    cdef double sq = sqrt(2.0 * dt)
    y_path = np.empty(n + 1)
    g_path = np.empty(n + 1)
    cdef double[::1] yp = y_path
    cdef double[::1] gp = g_path
    cdef double y = y0, s = 0.0, sg, yn
    yp[0] = y
    gp[0] = fabs(y) - s
    with nogil:
        for j in range(n):
            sg = 1.0 if y > 0.0 else (-1.0 if y < 0.0 else 0.0)
            yn = y + (-theta * sg * dt + sq * z[j])
            s = s + sg * (yn - y)
            y = yn
            yp[j + 1] = y
            gp[j + 1] = fabs(y) - s
    return y_path, g_path


def bm_max_chunk(double[::1] x, double[::1] m, double[:, ::1] z,
                 double[:, ::1] lu, double mu, double dt, bint bridge):
    cdef Py_ssize_t msteps = z.shape[0], n = z.shape[1]
    cdef Py_ssize_t i, j
    cdef double sq = sqrt(2.0 * dt)
    cdef double xi, mi, xn, ms
    with nogil:
        for i in range(n):
            xi = x[i]
            mi = m[i]
            for j in range(msteps):
                xn = xi + (mu * dt + sq * z[j, i])
                if bridge:
                    ms = 0.5 * (xi + xn + sqrt((xn - xi) * (xn - xi) - 4.0 * dt * lu[j, i]))
                else:
                    ms = xn
                if ms > mi:
                    mi = ms
                xi = xn
            x[i] = xi
            m[i] = mi


def passage_chunk(double[::1] h, double[::1] lpass, long long k0,
                  double[:, ::1] z, double[:, ::1] u,
                  double step, double m_ig, double sh_ig, double t_target):
    cdef Py_ssize_t msteps = z.shape[0], n = z.shape[1]
    cdef Py_ssize_t i, j
    cdef double m = m_ig, sh = sh_ig
    cdef double a = m / (2.0 * sh) if sh > 0.0 else 0.0
    cdef double yv, t1, xx, inc, hi
    with nogil:
        for i in range(n):
            hi = h[i]
            for j in range(msteps):
                yv = z[j, i] * z[j, i]
                if m > 0.0:
                    t1 = m * yv
                    xx = m + a * (t1 - sqrt(4.0 * sh * t1 + t1 * t1))
                    if u[j, i] <= m / (m + xx):
                        inc = xx
                    else:
                        inc = (m * m) / xx
                else:
                    inc = 0.5 * step * step / yv
                hi = hi + inc
                if isnan(lpass[i]) and hi > t_target:
                    lpass[i] = (k0 + j + 1) * step
            h[i] = hi
