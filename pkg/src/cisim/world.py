"""Observation and cost models shared by every component.

A world is a set of sensors observing one hidden class. Sensor ``i`` draws
its reading from a Gaussian whose mean and standard deviation depend on the
class: ``S_i | Y=k ~ Normal(means[i, k], sds[i, k])``. The class itself is
drawn from a categorical prior. Nothing in the package assumes equal
spacing or shared widths, but :meth:`WorldModel.indexed` builds the common
benchmark family where class ``k`` sits at ``k * spacing`` with one shared
width for everyone.

Costs are held separately in :class:`CostModel` so the same world can be
priced under different network assumptions. ``link[i, j]`` is what sensor
``i`` pays to fetch sensor ``j``'s reading, ``uplink[i]`` what it pays to
push its own reading to the cloud, and ``target[i]`` an optional charge for
forwarding a finished prediction onward. An infinite link cost marks a peer
as unreachable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ValidationError(ValueError):
    """A model or experiment description failed structural validation."""


def _frozen_array(values, dtype=float) -> np.ndarray:
    out = np.array(values, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class WorldModel:
    """Hidden-class observation model for ``n_sensors`` Gaussian sensors.

    Parameters
    ----------
    prior:
        Class probabilities, shape ``(n_classes,)``. Must be non-negative
        and sum to one.
    means, sds:
        Per-sensor, per-class Gaussian parameters, shape
        ``(n_sensors, n_classes)``. All widths must be strictly positive.
    """

    prior: np.ndarray
    means: np.ndarray
    sds: np.ndarray

    def __post_init__(self):
        prior = _frozen_array(self.prior)
        means = _frozen_array(self.means)
        sds = _frozen_array(self.sds)
        if prior.ndim != 1 or prior.size < 2:
            raise ValidationError("prior must be a 1-d vector over at least two classes")
        if not np.all(np.isfinite(prior)) or np.any(prior < 0):
            raise ValidationError("prior entries must be finite and non-negative")
        if abs(float(prior.sum()) - 1.0) > 1e-9:
            raise ValidationError(f"prior must sum to 1, got {float(prior.sum())!r}")
        if means.ndim != 2 or sds.ndim != 2:
            raise ValidationError("means and sds must be 2-d arrays (sensors x classes)")
        if means.shape != sds.shape:
            raise ValidationError(
                f"means shape {means.shape} does not match sds shape {sds.shape}"
            )
        if means.shape[1] != prior.size:
            raise ValidationError(
                f"means have {means.shape[1]} classes but prior has {prior.size}"
            )
        if means.shape[0] < 1:
            raise ValidationError("world needs at least one sensor")
        if not np.all(np.isfinite(means)):
            raise ValidationError("means must be finite")
        if not np.all(np.isfinite(sds)) or np.any(sds <= 0):
            raise ValidationError("sds must be finite and strictly positive")
        object.__setattr__(self, "prior", prior)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "sds", sds)

    @property
    def n_sensors(self) -> int:
        return self.means.shape[0]

    @property
    def n_classes(self) -> int:
        return self.prior.size

    @classmethod
    def indexed(
        cls,
        classes: int,
        sensors: int,
        spacing: float,
        sd,
        prior=None,
    ) -> "WorldModel":
        """Benchmark family: class ``k`` has mean ``k * spacing`` at every sensor.

        ``sd`` may be a scalar (shared width), a per-sensor vector, or a full
        ``(sensors, classes)`` array. ``prior`` defaults to uniform.
        """
        if classes < 2:
            raise ValidationError("indexed world needs at least two classes")
        if sensors < 1:
            raise ValidationError("indexed world needs at least one sensor")
        means = np.tile(np.arange(classes, dtype=float) * float(spacing), (sensors, 1))
        sd_arr = np.asarray(sd, dtype=float)
        if sd_arr.ndim == 0:
            sds = np.full((sensors, classes), float(sd_arr))
        elif sd_arr.ndim == 1:
            if sd_arr.size != sensors:
                raise ValidationError(
                    f"per-sensor sd vector has {sd_arr.size} entries for {sensors} sensors"
                )
            sds = np.repeat(sd_arr[:, None], classes, axis=1)
        else:
            sds = sd_arr
        if prior is None:
            prior = np.full(classes, 1.0 / classes)
        return cls(prior=prior, means=means, sds=sds)


@dataclass(frozen=True)
class CostModel:
    """Communication prices for one world, in shared energy units.

    ``link`` is an ``(n, n)`` matrix; the diagonal is ignored. ``np.inf``
    marks an unreachable peer. ``uplink`` is per-sensor and must be finite.
    ``target`` is an optional per-sensor forwarding charge, ``None`` when
    predictions stay local.
    """

    link: np.ndarray
    uplink: np.ndarray
    target: np.ndarray | None = None

    def __post_init__(self):
        link = _frozen_array(self.link)
        uplink = _frozen_array(self.uplink)
        if link.ndim != 2 or link.shape[0] != link.shape[1]:
            raise ValidationError("link must be a square matrix")
        n = link.shape[0]
        if uplink.shape != (n,):
            raise ValidationError(
                f"uplink shape {uplink.shape} does not match {n} sensors"
            )
        off_diag = link[~np.eye(n, dtype=bool)]
        if np.any(np.isnan(off_diag)) or np.any(off_diag < 0):
            raise ValidationError("link costs must be non-negative (inf = unreachable)")
        if not np.all(np.isfinite(uplink)) or np.any(uplink < 0):
            raise ValidationError("uplink costs must be finite and non-negative")
        target = self.target
        if target is not None:
            target = _frozen_array(target)
            if target.shape != (n,):
                raise ValidationError(
                    f"target shape {target.shape} does not match {n} sensors"
                )
            if not np.all(np.isfinite(target)) or np.any(target < 0):
                raise ValidationError("target costs must be finite and non-negative")
        object.__setattr__(self, "link", link)
        object.__setattr__(self, "uplink", uplink)
        object.__setattr__(self, "target", target)

    @property
    def n_sensors(self) -> int:
        return self.link.shape[0]

    def target_cost(self, sensor: int) -> float:
        """Forwarding charge for ``sensor``, 0.0 when no target is configured."""
        if self.target is None:
            return 0.0
        return float(self.target[sensor])

    def peers(self, sensor: int) -> list[int]:
        """Indices reachable from ``sensor`` over a finite link, in index order."""
        row = self.link[sensor]
        return [j for j in range(self.n_sensors) if j != sensor and np.isfinite(row[j])]

    @classmethod
    def uniform(
        cls,
        sensors: int,
        link: float,
        uplink: float,
        target: float | None = None,
    ) -> "CostModel":
        """Same prices everywhere: one link cost, one uplink cost."""
        link_m = np.full((sensors, sensors), float(link))
        np.fill_diagonal(link_m, 0.0)
        uplink_v = np.full(sensors, float(uplink))
        target_v = None if target is None else np.full(sensors, float(target))
        return cls(link=link_m, uplink=uplink_v, target=target_v)
