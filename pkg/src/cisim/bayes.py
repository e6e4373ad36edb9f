"""Posterior and mixture computations over a :class:`~cisim.world.WorldModel`.

Everything here is exact Bayes in the log domain. Likelihood sums use max
subtraction before exponentiating, and an observation that yields no usable
likelihood at all (for example a non-finite reading) falls back to the
prior rather than dividing by zero.
"""

from __future__ import annotations

from typing import Iterable, Mapping

import numpy as np

from ._backend import kernels
from .world import ValidationError, WorldModel

_LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)


def log_prior(world: WorldModel) -> np.ndarray:
    """Log class prior; zero-probability classes map to ``-inf``."""
    with np.errstate(divide="ignore"):
        return np.log(world.prior)


def class_likelihood(world: WorldModel, sensor: int, value: float, label: int) -> float:
    """Gaussian density of ``value`` under one (sensor, class) cell."""
    if not 0 <= sensor < world.n_sensors:
        raise IndexError(f"sensor index {sensor} out of range [0, {world.n_sensors})")
    if not 0 <= label < world.n_classes:
        raise IndexError(f"class index {label} out of range [0, {world.n_classes})")
    mu = world.means[sensor, label]
    sd = world.sds[sensor, label]
    z = (float(value) - mu) / sd
    return float(np.exp(-0.5 * z * z) / (sd * np.sqrt(2.0 * np.pi)))


def class_log_likelihood(world: WorldModel, sensor: int, value: float) -> np.ndarray:
    """``log p(value | class k)`` for one sensor, shape ``(n_classes,)``."""
    mus = world.means[sensor]
    sds = world.sds[sensor]
    z = (value - mus) / sds
    return -0.5 * z * z - np.log(sds) - _LOG_SQRT_2PI


def posterior(world: WorldModel, sensor: int, value: float) -> np.ndarray:
    """Class posterior after sensor ``sensor`` observes ``value``."""
    return kernels.posterior(float(value), world.means[sensor], world.sds[sensor], log_prior(world))


def joint_posterior(
    world: WorldModel,
    observations: Mapping[int, float] | Iterable[tuple[int, float]],
) -> np.ndarray:
    """Class posterior after any subset of sensors report their values.

    Observations are conditionally independent given the class, so the
    result does not depend on the order of the pairs. At least one pair
    is required, and no sensor may report twice.
    """
    if isinstance(observations, Mapping):
        pairs = list(observations.items())
    else:
        pairs = list(observations)
    if not pairs:
        raise ValidationError("joint_posterior needs at least one (sensor, value) pair")
    seen = [int(s) for s, _ in pairs]
    if len(set(seen)) != len(seen):
        dupes = sorted({s for s in seen if seen.count(s) > 1})
        raise ValidationError(f"duplicate sensor index in observations: {dupes}")
    idx = np.array([int(s) for s, _ in pairs])
    values = np.array([float(v) for _, v in pairs])
    return kernels.joint_posterior(
        values,
        np.ascontiguousarray(world.means[idx]),
        np.ascontiguousarray(world.sds[idx]),
        log_prior(world),
    )


def marginal_pdf(world: WorldModel, sensor: int, x) -> np.ndarray | float:
    """Prior-mixture density of sensor ``sensor``'s observation at ``x``."""
    x_arr = np.asarray(x, dtype=float)
    mus = world.means[sensor]
    sds = world.sds[sensor]
    z = (x_arr[..., None] - mus) / sds
    dens = np.exp(-0.5 * z * z) / (sds * np.sqrt(2.0 * np.pi))
    out = dens @ world.prior
    return float(out) if np.isscalar(x) else out


def marginal_cdf(world: WorldModel, sensor: int, x: float) -> float:
    """Prior-mixture CDF of sensor ``sensor``'s observation."""
    return kernels.mixture_cdf(float(x), world.means[sensor], world.sds[sensor], world.prior)


def interval_measure(
    world: WorldModel,
    sensor: int,
    intervals: Iterable[tuple[float, float]],
) -> float:
    """Prior-mixture probability mass of a union of disjoint intervals."""
    total = 0.0
    for lo, hi in intervals:
        if hi <= lo:
            continue
        total += marginal_cdf(world, sensor, hi) - marginal_cdf(world, sensor, lo)
    return min(max(total, 0.0), 1.0)
