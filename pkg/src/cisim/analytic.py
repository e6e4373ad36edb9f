"""Closed-form single-sensor metrics via an action map over the observation axis.

Instead of sampling rounds, lay a grid over one sensor's observation axis,
run the policy at each cell center, and weight each cell by its exact
prior-mixture probability mass. Because the policy is piecewise constant
in the observation with a handful of switch points, the only error in a
raw grid is at cells straddling a boundary; those boundaries are located
by bisection between adjacent centers that disagree, and the straddling
mass is split exactly. The result is grid-rate-free for the headline
fractions, limited only by boundary features narrower than one cell.

The map yields the probability of each action, the mass-weighted mean
success estimate inside the request region, and the expected round cost
for this sensor. The request term of the expected cost always uses the
true expectation of the realized spend (fetch now, offload only on
failure), whatever decision rule the policy ran, so costs stay comparable
across rules.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from . import bayes
from .policy import Direct, Offload, PolicyConfig, Request, decide
from .world import CostModel, ValidationError, WorldModel

SPAN_SDS = 6.0
DEFAULT_GRID_POINTS = 1000


@dataclass(frozen=True)
class ActionCell:
    """One grid cell: observation range, decided action, exact mass."""

    lo: float
    hi: float
    action: object
    mass: float

    @property
    def kind(self) -> str:
        if isinstance(self.action, Direct):
            return "direct"
        if isinstance(self.action, Request):
            return "request"
        return "offload"


@dataclass(frozen=True)
class ActionMap:
    """Per-cell policy decisions for one sensor, boundary-refined."""

    sensor: int
    lo: float
    hi: float
    cells: tuple[ActionCell, ...]


@dataclass(frozen=True)
class AnalyticReport:
    """Closed-form per-sensor operating point.

    ``p_direct + p_request + p_offload`` equals the grid span's mixture
    mass, i.e. 1 up to the negligible tail beyond six standard deviations.
    ``p_request_success`` is the mass-weighted mean success estimate over
    the request region (0 when requests never fire).
    """

    sensor: int
    p_direct: float
    p_request: float
    p_offload: float
    p_request_success: float
    expected_cost: float


def _kind(action) -> str:
    if isinstance(action, Direct):
        return "direct"
    if isinstance(action, Request):
        return "request"
    return "offload"


def build_action_map(
    world: WorldModel,
    costs: CostModel,
    config: PolicyConfig,
    sensor: int = 0,
    grid_points: int = DEFAULT_GRID_POINTS,
) -> ActionMap:
    """Decide the policy at every cell center and refine action boundaries.

    Adjacent centers that land in different action kinds get the true
    switch point located by bisection; the shared cell edge moves there so
    the two cells' masses are exact. A region narrower than one cell can
    still be missed; raise ``grid_points`` if the world is that spiky.
    """
    if grid_points < 100:
        raise ValidationError(f"action map needs at least 100 grid points, got {grid_points}")
    mus = world.means[sensor]
    sds = world.sds[sensor]
    pad = SPAN_SDS * float(sds.max())
    lo = float(mus.min()) - pad
    hi = float(mus.max()) + pad
    width = (hi - lo) / grid_points
    centers = [lo + (i + 0.5) * width for i in range(grid_points)]
    acts = [decide(world, costs, config, sensor, x) for x in centers]

    edges = [lo + i * width for i in range(grid_points + 1)]
    tol = width * 1e-9
    for i in range(grid_points - 1):
        left_kind = _kind(acts[i])
        if left_kind == _kind(acts[i + 1]):
            continue
        a, b = centers[i], centers[i + 1]
        while b - a > tol:
            m = 0.5 * (a + b)
            if _kind(decide(world, costs, config, sensor, m)) == left_kind:
                a = m
            else:
                b = m
        edges[i + 1] = 0.5 * (a + b)

    cdf = [bayes.marginal_cdf(world, sensor, e) for e in edges]
    cells = tuple(
        ActionCell(
            lo=edges[i],
            hi=edges[i + 1],
            action=acts[i],
            mass=max(cdf[i + 1] - cdf[i], 0.0),
        )
        for i in range(grid_points)
    )
    return ActionMap(sensor=sensor, lo=lo, hi=hi, cells=cells)


def analytic_metrics(
    world: WorldModel,
    costs: CostModel,
    config: PolicyConfig,
    sensor: int = 0,
    grid_points: int = DEFAULT_GRID_POINTS,
) -> AnalyticReport:
    """Exact-mass operating point for one sensor under the policy."""
    if config.request_rule == "as-written":
        warnings.warn(
            "expected_cost prices requests by their realized expectation, "
            "not by the as-written rule's own accounting",
            stacklevel=2,
        )
    amap = build_action_map(world, costs, config, sensor, grid_points)
    p_direct = p_request = p_offload = 0.0
    success_mass = 0.0
    cost = 0.0
    uplink = float(costs.uplink[sensor])
    target = costs.target_cost(sensor)
    for cell in amap.cells:
        act = cell.action
        if isinstance(act, Direct):
            p_direct += cell.mass
        elif isinstance(act, Request):
            p_request += cell.mass
            p = act.success_probability
            success_mass += cell.mass * p
            link = float(costs.link[sensor, act.peer])
            cost += cell.mass * (link + (1.0 - p) * uplink + p * target)
        else:
            p_offload += cell.mass
            cost += cell.mass * uplink
    return AnalyticReport(
        sensor=sensor,
        p_direct=p_direct,
        p_request=p_request,
        p_offload=p_offload,
        p_request_success=(success_mass / p_request) if p_request > 0.0 else 0.0,
        expected_cost=cost,
    )


def direct_band(amap: ActionMap) -> tuple[float, float] | None:
    """Convex hull of the non-direct region, ``None`` if everything is direct.

    For the usual single-band worlds this is the uncertainty window
    between the two direct regions.
    """
    lo = math.inf
    hi = -math.inf
    for cell in amap.cells:
        if cell.kind != "direct":
            lo = min(lo, cell.lo)
            hi = max(hi, cell.hi)
    if lo > hi:
        return None
    return lo, hi
