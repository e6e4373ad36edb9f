"""How much is a peer's unseen observation worth?

Before paying for a peer's reading, a sensor wants the probability that the
reading will actually settle the class, i.e. that the joint posterior will
clear the confidence threshold. Conditioned on nothing but the requester's
own posterior ``q``, the peer's value ``x`` helps exactly when

    max_k  q_k f_k(x) / lam  -  sum_l q_l f_l(x)  >  0

where ``f_k`` is the peer's class-``k`` density. The success region is a
union of intervals on the peer's axis, and its probability is measured
under the peer's prior-mixture marginal. Three estimators recover it:

* ``exact``: closed form for two classes via per-class quadratics.
* ``sample``: dense grid scan with linear interpolation at sign changes.
* ``heuristic``: outward root walk from each class mean with regula falsi
  refinement; budgeted, and the default for many classes.

All three return a :class:`SuccessEstimate` whose intervals may reach
``+-inf``: the scan walls sit eight standard deviations beyond the extreme
class means, and a region still active at a wall is extended to infinity,
where the tail behavior is monotone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import bayes
from ._backend import kernels
from .world import ValidationError, WorldModel

ESTIMATORS = ("exact", "sample", "heuristic")

DEFAULT_GRID_POINTS = 10_000
# walk resolution: eighth of the narrowest class width
STEP_DIVISOR = 8.0
WALL_SDS = 8.0
MIN_WALL_SDS = 6.0


@dataclass(frozen=True)
class SuccessEstimate:
    """Estimated probability that a peer's reading settles the class.

    ``intervals`` is the estimated success region on the peer's axis,
    disjoint and sorted, possibly reaching infinity on either side.
    """

    peer: int
    probability: float
    intervals: tuple[tuple[float, float], ...]
    method: str


class EstimatorFailure(RuntimeError):
    """The heuristic walk ran out of evaluation budget.

    ``intervals`` holds whatever part of the success region was recovered
    before the budget ran out, so callers can degrade deliberately instead
    of trusting a silently truncated estimate.
    """

    def __init__(self, message: str, intervals: tuple[tuple[float, float], ...]):
        super().__init__(message)
        self.intervals = intervals


def merge_intervals(intervals) -> tuple[tuple[float, float], ...]:
    """Sort, drop empties, and fuse overlapping or touching intervals."""
    ivs = sorted((float(lo), float(hi)) for lo, hi in intervals if hi > lo)
    out: list[tuple[float, float]] = []
    for lo, hi in ivs:
        if out and lo <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return tuple(out)


def _check_threshold(threshold: float):
    if not (0.0 < threshold < 1.0):
        raise ValidationError(f"confidence threshold must lie in (0, 1), got {threshold!r}")


def _peer_params(world: WorldModel, peer: int):
    if not (0 <= peer < world.n_sensors):
        raise ValidationError(f"peer index {peer} out of range for {world.n_sensors} sensors")
    return world.means[peer], world.sds[peer]


def _prep_q(world: WorldModel, q) -> np.ndarray:
    q_arr = np.ascontiguousarray(q, dtype=float)
    if q_arr.shape != (world.n_classes,):
        raise ValidationError(
            f"posterior must have shape ({world.n_classes},), got {q_arr.shape}"
        )
    return q_arr


def _default_walls(mus: np.ndarray, sds: np.ndarray) -> tuple[float, float]:
    pad = WALL_SDS * float(sds.max())
    return float(mus.min()) - pad, float(mus.max()) + pad


def _check_walls(lo: float, hi: float, mus: np.ndarray, sds: np.ndarray):
    pad = MIN_WALL_SDS * float(sds.max())
    need_lo = float(mus.min()) - pad
    need_hi = float(mus.max()) + pad
    if lo > need_lo or hi < need_hi:
        raise ValidationError(
            f"scan range [{lo}, {hi}] must cover [{need_lo}, {need_hi}] "
            f"({MIN_WALL_SDS:g} sd beyond the peer's extreme class means)"
        )


def _class_region_binary(q, mus, sds, lam, k) -> list[tuple[float, float]]:
    """Solve ``q_k f_k (1-lam) > lam q_l f_l`` for two classes in closed form.

    Taking logs turns the condition into a quadratic in the peer value;
    the sign of the leading coefficient and the discriminant pick between
    an empty set, a bounded interval, a half line pair, or everything.
    """
    l = 1 - k
    qk, ql = float(q[k]), float(q[l])
    if qk <= 0.0:
        return []
    if ql <= 0.0:
        return [(-math.inf, math.inf)]
    mk, ml = float(mus[k]), float(mus[l])
    sk, sl = float(sds[k]), float(sds[l])
    a = 0.5 / (sl * sl) - 0.5 / (sk * sk)
    b = mk / (sk * sk) - ml / (sl * sl)
    c = (
        (ml * ml) / (2.0 * sl * sl)
        - (mk * mk) / (2.0 * sk * sk)
        + math.log(sl / sk)
        + math.log(qk * (1.0 - lam) / (lam * ql))
    )
    if a == 0.0:
        if b == 0.0:
            return [(-math.inf, math.inf)] if c > 0.0 else []
        x0 = -c / b
        return [(x0, math.inf)] if b > 0.0 else [(-math.inf, x0)]
    disc = b * b - 4.0 * a * c
    if disc <= 0.0:
        return [(-math.inf, math.inf)] if a > 0.0 else []
    sq = math.sqrt(disc)
    r1 = (-b - sq) / (2.0 * a)
    r2 = (-b + sq) / (2.0 * a)
    if r1 > r2:
        r1, r2 = r2, r1
    if a > 0.0:
        return [(-math.inf, r1), (r2, math.inf)]
    return [(r1, r2)]


def success_prob_exact(
    world: WorldModel,
    q,
    peer: int,
    threshold: float,
) -> SuccessEstimate:
    """Closed-form success probability; two-class worlds only."""
    _check_threshold(threshold)
    if world.n_classes != 2:
        raise ValidationError(
            f"exact estimator handles exactly 2 classes, world has {world.n_classes}"
        )
    q_arr = _prep_q(world, q)
    mus, sds = _peer_params(world, peer)
    regions = _class_region_binary(q_arr, mus, sds, threshold, 0)
    regions += _class_region_binary(q_arr, mus, sds, threshold, 1)
    intervals = merge_intervals(regions)
    prob = bayes.interval_measure(world, peer, intervals)
    return SuccessEstimate(peer=peer, probability=prob, intervals=intervals, method="exact")


def _intervals_from_roots(
    roots,
    lo: float,
    hi: float,
    probe,
) -> tuple[tuple[float, float], ...]:
    """Rebuild the positive region of the score from its candidate roots.

    Roots are deduplicated and sorted, the segments between them probed at
    their midpoints, adjacent positive segments merged, and a region still
    positive at a wall extended to infinity.
    """
    tol = 1e-12 * max(1.0, hi - lo)
    pts: list[float] = []
    for r in sorted(float(r) for r in roots):
        if lo < r < hi and (not pts or r - pts[-1] > tol):
            pts.append(r)
    edges = [lo] + pts + [hi]
    segments: list[tuple[float, float]] = []
    for i in range(len(edges) - 1):
        a, b = edges[i], edges[i + 1]
        if b - a <= 0.0:
            continue
        if probe(0.5 * (a + b)) > 0.0:
            segments.append((a, b))
    intervals = list(merge_intervals(segments))
    if intervals and intervals[0][0] <= lo + tol:
        intervals[0] = (-math.inf, intervals[0][1])
    if intervals and intervals[-1][1] >= hi - tol:
        intervals[-1] = (intervals[-1][0], math.inf)
    return tuple(intervals)


def success_prob_sampled(
    world: WorldModel,
    q,
    peer: int,
    threshold: float,
    grid: tuple[float, float] | None = None,
    points: int = DEFAULT_GRID_POINTS,
) -> SuccessEstimate:
    """Grid-scan success probability, any number of classes."""
    _check_threshold(threshold)
    q_arr = _prep_q(world, q)
    mus, sds = _peer_params(world, peer)
    if grid is None:
        lo, hi = _default_walls(mus, sds)
    else:
        lo, hi = float(grid[0]), float(grid[1])
        _check_walls(lo, hi, mus, sds)
    if points < 2:
        raise ValidationError(f"grid needs at least 2 points, got {points}")
    roots, _, _ = kernels.grid_union_roots(lo, hi, int(points), q_arr, mus, sds, threshold)
    probe = lambda x: kernels.score_max(x, q_arr, mus, sds, threshold)
    intervals = _intervals_from_roots(roots, lo, hi, probe)
    prob = bayes.interval_measure(world, peer, intervals)
    return SuccessEstimate(peer=peer, probability=prob, intervals=intervals, method="sample")


def success_prob_heuristic(
    world: WorldModel,
    q,
    peer: int,
    threshold: float,
    step: float | None = None,
    tol: float = 1e-6,
) -> SuccessEstimate:
    """Root-walk success probability.

    From each class mean, walk outward in fixed steps bracketing every sign
    change of that class's margin (continuing through crossings so split
    regions are found), refine each bracket by regula falsi, then rebuild
    the union from the combined roots. The total number of margin
    evaluations is budgeted at ten full scans' worth; exceeding it raises
    :class:`EstimatorFailure` carrying the partial intervals.
    """
    _check_threshold(threshold)
    q_arr = _prep_q(world, q)
    mus, sds = _peer_params(world, peer)
    lo, hi = _default_walls(mus, sds)
    if step is None:
        step = float(sds.min()) / STEP_DIVISOR
    if step <= 0.0:
        raise ValidationError(f"step must be positive, got {step!r}")
    budget = int(10 * world.n_classes * math.ceil((hi - lo) / step))
    probe = lambda x: kernels.score_max(x, q_arr, mus, sds, threshold)
    roots: list[float] = []
    truncated = False
    for k in range(world.n_classes):
        if q_arr[k] <= 0.0:
            continue
        if budget <= 0:
            truncated = True
            break
        start = min(max(float(mus[k]), lo), hi)
        brackets, used, complete = kernels.class_sign_changes(
            k, q_arr, mus, sds, threshold, start, step, lo, hi, budget
        )
        budget -= used
        for a, b in brackets:
            roots.append(kernels.refine_root(k, q_arr, mus, sds, threshold, a, b, tol))
        if not complete:
            truncated = True
            break
    if truncated:
        raise EstimatorFailure(
            f"root walk exhausted its evaluation budget on peer {peer} "
            f"(step={step!r} over [{lo}, {hi}])",
            _intervals_from_roots(roots, lo, hi, probe),
        )
    intervals = _intervals_from_roots(roots, lo, hi, probe)
    prob = bayes.interval_measure(world, peer, intervals)
    return SuccessEstimate(peer=peer, probability=prob, intervals=intervals, method="heuristic")


def resolve_estimator(name: str, n_classes: int) -> str:
    """Map an estimator name (or ``auto``) to a concrete method."""
    if name == "auto":
        return "exact" if n_classes == 2 else "sample"
    if name not in ESTIMATORS:
        raise ValidationError(
            f"unknown estimator {name!r}, expected one of {('auto',) + ESTIMATORS}"
        )
    return name


def success_probability(
    world: WorldModel,
    q,
    peer: int,
    threshold: float,
    estimator: str = "auto",
) -> SuccessEstimate:
    """Dispatch to one of the estimators; ``auto`` prefers exact when legal."""
    method = resolve_estimator(estimator, world.n_classes)
    if method == "exact":
        return success_prob_exact(world, q, peer, threshold)
    if method == "sample":
        return success_prob_sampled(world, q, peer, threshold)
    return success_prob_heuristic(world, q, peer, threshold)


def best_peer(
    world: WorldModel,
    q,
    peers,
    threshold: float,
    estimator: str = "auto",
) -> tuple[int, SuccessEstimate]:
    """Pick the peer whose reading is most likely to settle the class.

    Ties keep the lowest index. ``peers`` must be non-empty.
    """
    best_idx: int | None = None
    best_est: SuccessEstimate | None = None
    for j in peers:
        est = success_probability(world, q, j, threshold, estimator)
        if best_est is None or est.probability > best_est.probability:
            best_idx, best_est = j, est
    if best_idx is None or best_est is None:
        raise ValidationError("best_peer needs at least one candidate peer")
    return best_idx, best_est
