# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled numeric kernels.

Mirror of ``cisim._kernels_py``; see that module for the API contract.
Every algorithmic choice (ladder point placement, bracket rules, the
regula falsi update) must match the Python code literally.
"""

import math

import numpy as np

from libc.math cimport erf, exp, floor, log, sqrt, INFINITY

cdef double _SQRT_2PI = sqrt(2.0 * math.pi)
cdef double _LOG_SQRT_2PI = 0.5 * log(2.0 * math.pi)


def backend_name():
    return "c"


def posterior(double x, const double[::1] mus, const double[::1] sds, const double[::1] log_prior):
    cdef Py_ssize_t k, n = mus.shape[0]
    cdef double z, m = -INFINITY, total = 0.0
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    for k in range(n):
        z = (x - mus[k]) / sds[k]
        out[k] = log_prior[k] - 0.5 * z * z - log(sds[k]) - _LOG_SQRT_2PI
        if out[k] > m:
            m = out[k]
    if m == -INFINITY or m != m:
        m = -INFINITY
        for k in range(n):
            if log_prior[k] > m:
                m = log_prior[k]
        for k in range(n):
            out[k] = exp(log_prior[k] - m)
            total += out[k]
    else:
        for k in range(n):
            out[k] = exp(out[k] - m)
            total += out[k]
    for k in range(n):
        out[k] /= total
    return out_arr


def joint_posterior(
    const double[::1] values,
    const double[:, ::1] mus,
    const double[:, ::1] sds,
    const double[::1] log_prior,
):
    cdef Py_ssize_t i, k
    cdef Py_ssize_t rows = values.shape[0], n = mus.shape[1]
    cdef double z, m = -INFINITY, total = 0.0
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    for k in range(n):
        out[k] = log_prior[k]
        for i in range(rows):
            z = (values[i] - mus[i, k]) / sds[i, k]
            out[k] += -0.5 * z * z - log(sds[i, k]) - _LOG_SQRT_2PI
        if out[k] > m:
            m = out[k]
    if m == -INFINITY or m != m:
        m = -INFINITY
        for k in range(n):
            if log_prior[k] > m:
                m = log_prior[k]
        for k in range(n):
            out[k] = exp(log_prior[k] - m)
            total += out[k]
    else:
        for k in range(n):
            out[k] = exp(out[k] - m)
            total += out[k]
    for k in range(n):
        out[k] /= total
    return out_arr


def mixture_cdf(double x, const double[::1] mus, const double[::1] sds, const double[::1] prior):
    cdef Py_ssize_t k, n = prior.shape[0]
    cdef double total = 0.0
    if x == INFINITY:
        return 1.0
    if x == -INFINITY:
        return 0.0
    for k in range(n):
        total += prior[k] * 0.5 * (1.0 + erf((x - mus[k]) / (sds[k] * sqrt(2.0))))
    return total


cdef inline double _density(double x, double mu, double sd) nogil:
    cdef double z = (x - mu) / sd
    return exp(-0.5 * z * z) / (sd * _SQRT_2PI)


cdef double _score_class(
    double x, Py_ssize_t k,
    const double[::1] q, const double[::1] mus, const double[::1] sds, double lam,
) nogil:
    cdef Py_ssize_t l, n = q.shape[0]
    cdef double d, total = 0.0, fk = 0.0
    for l in range(n):
        d = q[l] * _density(x, mus[l], sds[l])
        total += d
        if l == k:
            fk = d
    return fk / lam - total


def score_class(double x, Py_ssize_t k, const double[::1] q, const double[::1] mus,
                const double[::1] sds, double lam):
    return _score_class(x, k, q, mus, sds, lam)


def score_max(double x, const double[::1] q, const double[::1] mus, const double[::1] sds, double lam):
    cdef Py_ssize_t l, n = q.shape[0]
    cdef double d, total = 0.0, best = -INFINITY
    for l in range(n):
        d = q[l] * _density(x, mus[l], sds[l])
        total += d
        if d > best:
            best = d
    return best / lam - total


def class_sign_changes(
    Py_ssize_t k,
    const double[::1] q, const double[::1] mus, const double[::1] sds, double lam,
    double start, double step, double lo, double hi, Py_ssize_t budget,
):
    cdef list brackets = []
    cdef Py_ssize_t used = 0
    cdef bint complete = 1
    used, complete = _scan(brackets, used, k, q, mus, sds, lam, start, hi, step, budget)
    if complete:
        used, complete = _scan(brackets, used, k, q, mus, sds, lam, start, lo, step, budget)
    brackets.sort()
    return brackets, used, bool(complete)


cdef tuple _scan(
    list brackets, Py_ssize_t used, Py_ssize_t k,
    const double[::1] q, const double[::1] mus, const double[::1] sds, double lam,
    double start, double stop, double step, Py_ssize_t budget,
):
    cdef double span = stop - start
    if span < 0:
        span = -span
    cdef Py_ssize_t i, n = <Py_ssize_t>floor(span / step + 1e-9)
    cdef double sign = 1.0 if stop >= start else -1.0
    cdef bint tail = 0
    cdef double last = start + sign * n * step
    if (stop - last if stop >= last else last - stop) > 1e-9 * step:
        tail = 1
    cdef double x, y, prev_x = 0.0
    cdef int s, prev_s = 2
    for i in range(n + 1 + tail):
        if used >= budget:
            return used, False
        x = stop if i == n + 1 else start + sign * i * step
        y = _score_class(x, k, q, mus, sds, lam)
        used += 1
        s = 0 if y == 0.0 else (1 if y > 0.0 else -1)
        if prev_s != 2:
            if s != 0 and prev_s != 0 and s != prev_s:
                if prev_x < x:
                    brackets.append((prev_x, x))
                else:
                    brackets.append((x, prev_x))
            elif s == 0 and prev_s != 0:
                brackets.append((x, x))
            elif s != 0 and prev_s == 0:
                brackets.append((prev_x, prev_x))
        prev_x = x
        prev_s = s
    return used, True


def refine_root(
    Py_ssize_t k,
    const double[::1] q, const double[::1] mus, const double[::1] sds, double lam,
    double a, double b, double tol, Py_ssize_t max_iter=80,
):
    cdef double ya, yb, yc, c, c_prev, denom
    cdef Py_ssize_t i
    if a == b:
        return a
    ya = _score_class(a, k, q, mus, sds, lam)
    yb = _score_class(b, k, q, mus, sds, lam)
    if ya == 0.0:
        return a
    if yb == 0.0:
        return b
    c_prev = a
    c = b
    for i in range(max_iter):
        denom = yb - ya
        if denom == 0.0:
            break
        c = (a * yb - b * ya) / denom
        if (c - c_prev if c >= c_prev else c_prev - c) <= tol:
            break
        yc = _score_class(c, k, q, mus, sds, lam)
        if yc == 0.0:
            break
        if (yc > 0.0) == (ya > 0.0):
            a = c
            ya = yc
        else:
            b = c
            yb = yc
        c_prev = c
    return c


def grid_union_roots(
    double lo, double hi, Py_ssize_t n,
    const double[::1] q, const double[::1] mus, const double[::1] sds, double lam,
):
    xs_arr = np.linspace(lo, hi, n)
    cdef double[::1] xs = xs_arr
    cdef Py_ssize_t i, l, nk = q.shape[0]
    cdef double d, total, best, ya, yb
    ys_arr = np.empty(n)
    cdef double[::1] ys = ys_arr
    for i in range(n):
        total = 0.0
        best = -INFINITY
        for l in range(nk):
            d = q[l] * _density(xs[i], mus[l], sds[l])
            total += d
            if d > best:
                best = d
        ys[i] = best / lam - total
    cdef list roots = []
    for i in range(n - 1):
        ya = ys[i]
        yb = ys[i + 1]
        if ya != 0.0 and yb != 0.0 and (ya > 0.0) != (yb > 0.0):
            roots.append(xs[i] + (xs[i + 1] - xs[i]) * ya / (ya - yb))
        elif yb == 0.0 and ya != 0.0:
            roots.append(xs[i + 1])
        elif ya == 0.0 and yb != 0.0:
            roots.append(xs[i])
    return np.asarray(roots), bool(ys[0] > 0.0), bool(ys[n - 1] > 0.0)
