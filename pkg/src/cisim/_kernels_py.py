"""Pure-Python/numpy implementation of the numeric kernels.

This module and the compiled ``_kernels`` extension expose the same
functions with the same semantics; ``cisim._backend`` picks whichever is
available at import time. Keep the two in lockstep: scalar evaluation
paths mirror the C code literally (same ladders, same bracket rules, same
interpolation formulas) so results agree across backends to floating-point
noise.

All array arguments are 1-d or 2-d float64. Scores are evaluated on raw
(unlogged) densities, which is safe because every caller stays within a
few dozen standard deviations of some class mean; posteriors go through
the log domain with max subtraction so they survive arbitrarily remote
observations.
"""

from __future__ import annotations

import math

import numpy as np

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def backend_name() -> str:
    return "python"


def posterior(x: float, mus: np.ndarray, sds: np.ndarray, log_prior: np.ndarray) -> np.ndarray:
    """Class posterior for one observation, robust in the far tails.

    Falls back to the (normalized) prior when no class yields a usable
    likelihood, e.g. for non-finite observations.
    """
    z = (x - mus) / sds
    log_like = -0.5 * z * z - np.log(sds) - _LOG_SQRT_2PI
    log_post = log_prior + log_like
    m = np.max(log_post)
    if not np.isfinite(m):
        w = np.exp(log_prior - np.max(log_prior))
        return w / w.sum()
    w = np.exp(log_post - m)
    return w / w.sum()


def joint_posterior(
    values: np.ndarray,
    mus: np.ndarray,
    sds: np.ndarray,
    log_prior: np.ndarray,
) -> np.ndarray:
    """Posterior given several conditionally independent observations.

    ``values`` has one entry per contributing sensor; ``mus`` and ``sds``
    are the matching ``(n, n_classes)`` parameter rows.
    """
    z = (values[:, None] - mus) / sds
    log_like = -0.5 * z * z - np.log(sds) - _LOG_SQRT_2PI
    log_post = log_prior + log_like.sum(axis=0)
    m = np.max(log_post)
    if not np.isfinite(m):
        w = np.exp(log_prior - np.max(log_prior))
        return w / w.sum()
    w = np.exp(log_post - m)
    return w / w.sum()


def mixture_cdf(x: float, mus: np.ndarray, sds: np.ndarray, prior: np.ndarray) -> float:
    """CDF of the prior-weighted Gaussian mixture at ``x``."""
    if x == math.inf:
        return 1.0
    if x == -math.inf:
        return 0.0
    total = 0.0
    for k in range(len(prior)):
        z = (x - mus[k]) / (sds[k] * math.sqrt(2.0))
        total += prior[k] * 0.5 * (1.0 + math.erf(z))
    return total


def _density(x: float, mu: float, sd: float) -> float:
    z = (x - mu) / sd
    return math.exp(-0.5 * z * z) / (sd * math.sqrt(2.0 * math.pi))


def score_class(
    x: float,
    k: int,
    q: np.ndarray,
    mus: np.ndarray,
    sds: np.ndarray,
    lam: float,
) -> float:
    """Margin of class ``k`` at peer value ``x``.

    Positive exactly when folding in a peer observation equal to ``x``
    would push the joint posterior of class ``k`` above ``lam``. ``q`` is
    the requester's current posterior over classes.
    """
    total = 0.0
    fk = 0.0
    for l in range(len(q)):
        d = q[l] * _density(x, mus[l], sds[l])
        total += d
        if l == k:
            fk = d
    return fk / lam - total


def score_max(x: float, q: np.ndarray, mus: np.ndarray, sds: np.ndarray, lam: float) -> float:
    """Largest class margin at ``x``; positive iff ``x`` is a success point."""
    total = 0.0
    best = -math.inf
    for l in range(len(q)):
        d = q[l] * _density(x, mus[l], sds[l])
        total += d
        if d > best:
            best = d
    return best / lam - total


def _ladder(start: float, stop: float, step: float):
    """Evaluation points from ``start`` toward ``stop`` in units of ``step``.

    Uses ``start + i * step`` (not accumulation) so both backends land on
    bit-identical points, and always terminates exactly on ``stop``.
    """
    span = abs(stop - start)
    n = int(math.floor(span / step + 1e-9))
    sign = 1.0 if stop >= start else -1.0
    pts = [start + sign * i * step for i in range(n + 1)]
    if abs(pts[-1] - stop) > 1e-9 * step:
        pts.append(stop)
    return pts


def class_sign_changes(
    k: int,
    q: np.ndarray,
    mus: np.ndarray,
    sds: np.ndarray,
    lam: float,
    start: float,
    step: float,
    lo: float,
    hi: float,
    budget: int,
):
    """Walk outward from ``start`` and bracket every sign change of one margin.

    The walk scans up to ``hi`` first, then down to ``lo``, spending at most
    ``budget`` evaluations in total, and keeps going past zero crossings so
    disconnected pieces of the success region are all found. An exact
    floating-point zero is an underflow dead zone, not a crossing: entering
    or leaving one yields a degenerate bracket at the zone edge, and the
    zone interior contributes nothing. Returns ``(brackets, used, complete)``
    where each bracket is ``(a, b)`` with ``a <= b``; ``complete`` is False
    when the budget ran out before the walk covered its range.
    """
    brackets: list[tuple[float, float]] = []
    used = 0
    complete = True

    def scan(points):
        nonlocal used, complete
        prev_x = 0.0
        prev_s = 2  # sentinel: no previous point yet
        for x in points:
            if used >= budget:
                complete = False
                return
            y = score_class(x, k, q, mus, sds, lam)
            used += 1
            s = 0 if y == 0.0 else (1 if y > 0.0 else -1)
            if prev_s != 2:
                if s != 0 and prev_s != 0 and s != prev_s:
                    a, b = (prev_x, x) if prev_x < x else (x, prev_x)
                    brackets.append((a, b))
                elif s == 0 and prev_s != 0:
                    brackets.append((x, x))
                elif s != 0 and prev_s == 0:
                    brackets.append((prev_x, prev_x))
            prev_x, prev_s = x, s

    scan(_ladder(start, hi, step))
    scan(_ladder(start, lo, step))
    brackets.sort()
    return brackets, used, complete


def refine_root(
    k: int,
    q: np.ndarray,
    mus: np.ndarray,
    sds: np.ndarray,
    lam: float,
    a: float,
    b: float,
    tol: float,
    max_iter: int = 80,
) -> float:
    """Regula falsi on one margin inside a sign-change bracket."""
    if a == b:
        return a
    ya = score_class(a, k, q, mus, sds, lam)
    yb = score_class(b, k, q, mus, sds, lam)
    if ya == 0.0:
        return a
    if yb == 0.0:
        return b
    c_prev = a
    c = b
    for _ in range(max_iter):
        denom = yb - ya
        if denom == 0.0:
            break
        c = (a * yb - b * ya) / denom
        if abs(c - c_prev) <= tol:
            break
        yc = score_class(c, k, q, mus, sds, lam)
        if yc == 0.0:
            break
        if (yc > 0.0) == (ya > 0.0):
            a, ya = c, yc
        else:
            b, yb = c, yc
        c_prev = c
    return c


def grid_union_roots(
    lo: float,
    hi: float,
    n: int,
    q: np.ndarray,
    mus: np.ndarray,
    sds: np.ndarray,
    lam: float,
):
    """Dense scan of the best margin over ``n`` points on ``[lo, hi]``.

    Returns ``(roots, pos_lo, pos_hi)``: linearly interpolated crossings of
    ``max_k`` margin, plus the sign at each wall. Because the scanned
    function is the indicator boundary of the whole success region, the
    crossings alternate and fully describe it at grid resolution.
    """
    xs = np.linspace(lo, hi, n)
    dens = np.empty((len(q), n))
    for l in range(len(q)):
        z = (xs - mus[l]) / sds[l]
        dens[l] = q[l] * np.exp(-0.5 * z * z) / (sds[l] * math.sqrt(2.0 * math.pi))
    total = dens.sum(axis=0)
    ys = dens.max(axis=0) / lam - total

    roots: list[float] = []
    for i in range(n - 1):
        ya, yb = ys[i], ys[i + 1]
        if ya != 0.0 and yb != 0.0 and (ya > 0.0) != (yb > 0.0):
            roots.append(float(xs[i] + (xs[i + 1] - xs[i]) * ya / (ya - yb)))
        elif yb == 0.0 and ya != 0.0:
            roots.append(float(xs[i + 1]))
        elif ya == 0.0 and yb != 0.0:
            roots.append(float(xs[i]))
    return np.asarray(roots), bool(ys[0] > 0.0), bool(ys[-1] > 0.0)
