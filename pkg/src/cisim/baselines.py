"""Reference schemes the collective policy is judged against.

* ``cloud``: every sensor uplinks its reading; one joint posterior decides.
  Most accurate, most expensive.
* ``independent``: every sensor answers from its own posterior; plurality
  of the local answers decides. Free, least accurate.
* ``global optimal``: a hindsight scheme that sees all realized readings
  and picks the cheapest valid plan, where confident sensors must answer
  directly, unconfident sensors either pair with a provider whose reading
  verifiably settles them or offload, and providers answer nothing
  themselves. Its cost lower-bounds any causal policy on the same round.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import bayes
from .world import CostModel, ValidationError, WorldModel


class SolverLimitError(RuntimeError):
    """The exact assignment search was asked to exceed its size limit."""


GLOBAL_SOLVER_MAX_SENSORS = 16


def cloud_round(
    world: WorldModel,
    costs: CostModel,
    values: np.ndarray,
) -> tuple[int, float, float]:
    """All readings uplinked, one joint decision.

    Returns ``(label, confidence, cost)``; cost is the full uplink bill.
    """
    post = bayes.joint_posterior(world, list(enumerate(values)))
    label = int(np.argmax(post))
    return label, float(post[label]), float(costs.uplink.sum())


def independent_round(
    world: WorldModel,
    values: np.ndarray,
    rng: np.random.Generator,
) -> tuple[int, np.ndarray]:
    """Plurality over per-sensor local answers; ties broken uniformly.

    Returns ``(label, votes)`` where ``votes[i]`` is sensor ``i``'s local
    answer. Communication cost is zero by construction.
    """
    votes = np.empty(world.n_sensors, dtype=int)
    for i in range(world.n_sensors):
        votes[i] = int(np.argmax(bayes.posterior(world, i, float(values[i]))))
    return plurality(votes, world.n_classes, rng), votes


def plurality(votes, n_classes: int, rng: np.random.Generator) -> int:
    """Most common vote; among tied counts, one is drawn uniformly."""
    counts = np.bincount(np.asarray(votes, dtype=int), minlength=n_classes)
    top = counts.max()
    tied = np.flatnonzero(counts == top)
    if len(tied) == 1:
        return int(tied[0])
    return int(tied[rng.integers(0, len(tied))])


@dataclass(frozen=True)
class GlobalAssignment:
    """Cheapest valid hindsight plan for one round.

    ``pairs`` are ``(requester, provider)`` in requester order, ``directs``
    the sensors answering alone, ``offloads`` the sensors sent to the
    cloud. ``cost`` is the realized communication bill.
    """

    pairs: tuple[tuple[int, int], ...]
    directs: tuple[int, ...]
    offloads: tuple[int, ...]
    cost: float


def global_optimal_round(
    world: WorldModel,
    costs: CostModel,
    threshold: float,
    values: np.ndarray,
    max_sensors: int = GLOBAL_SOLVER_MAX_SENSORS,
) -> GlobalAssignment:
    """Exact minimum-cost assignment for one realized round.

    A sensor whose own posterior clears ``threshold`` answers directly.
    Each remaining sensor either offloads (paying its uplink) or is paired
    as the requester with any other sensor as provider, admissible only if
    the realized joint posterior of the two readings clears ``threshold``;
    the pair pays the requester's link cost to the provider. Each sensor
    joins at most one pair. Search is exact (branch and bound over pairings
    in index order) and therefore capped at ``max_sensors``.

    Ties are broken toward fewer pairs, then lexicographically smallest
    pair list, making the result deterministic.
    """
    n = world.n_sensors
    if n > max_sensors:
        raise SolverLimitError(
            f"exact assignment search is capped at {max_sensors} sensors, world has {n}; "
            "use the per-sensor policy for larger worlds"
        )
    if not 1.0 / world.n_classes < threshold < 1.0:
        raise ValidationError(
            f"threshold {threshold!r} must lie in (1/{world.n_classes}, 1)"
        )

    confident = np.zeros(n, dtype=bool)
    for i in range(n):
        post = bayes.posterior(world, i, float(values[i]))
        confident[i] = float(post.max()) > threshold

    # admissible[i][j]: i as requester, j as provider settles i
    admissible = np.zeros((n, n), dtype=bool)
    for i in range(n):
        if confident[i]:
            continue
        for j in range(n):
            if j == i or not np.isfinite(costs.link[i, j]):
                continue
            post = bayes.joint_posterior(
                world, [(i, float(values[i])), (j, float(values[j]))]
            )
            admissible[i, j] = float(post.max()) > threshold

    unconfident = [i for i in range(n) if not confident[i]]

    # per-sensor cost floor for pruning: an unconfident sensor either
    # offloads, or sits in a pair whose link bill is at least the cheapest
    # admissible link touching it; half the bill per unconfident member is
    # a valid share since a pair has at most two of them
    floors = np.zeros(n)
    for i in unconfident:
        options = [float(costs.uplink[i])]
        for j in range(n):
            if admissible[i, j]:
                options.append(float(costs.link[i, j]) / 2.0)
            if not confident[j] and admissible[j, i]:
                options.append(float(costs.link[j, i]) / 2.0)
        floors[i] = min(options)

    best: dict = {"key": None, "plan": None}

    def finish(partial_cost: float, pairs: list[tuple[int, int]], offloads: list[int]):
        key = (partial_cost, len(pairs), tuple(sorted(pairs)))
        if best["key"] is None or key < best["key"]:
            best["key"] = key
            best["plan"] = (tuple(pairs), tuple(offloads))

    used = np.zeros(n, dtype=bool)
    order = unconfident

    def bound_rest(pos: int) -> float:
        total = 0.0
        for i in order[pos:]:
            if not used[i]:
                total += floors[i]
        return total

    def search(pos: int, cost_so_far: float, pairs: list, offloads: list):
        if best["key"] is not None and cost_so_far + bound_rest(pos) > best["key"][0]:
            return
        while pos < len(order) and used[order[pos]]:
            pos += 1
        if pos == len(order):
            finish(cost_so_far, pairs, offloads)
            return
        i = order[pos]
        used[i] = True
        # offload branch
        offloads.append(i)
        search(pos + 1, cost_so_far + float(costs.uplink[i]), pairs, offloads)
        offloads.pop()
        # pair branches: i as requester, then i as provider for a later peer
        for j in range(n):
            if used[j] or j == i:
                continue
            if admissible[i, j]:
                used[j] = True
                pairs.append((i, j))
                search(pos + 1, cost_so_far + float(costs.link[i, j]), pairs, offloads)
                pairs.pop()
                used[j] = False
            if not confident[j] and admissible[j, i]:
                used[j] = True
                pairs.append((j, i))
                search(pos + 1, cost_so_far + float(costs.link[j, i]), pairs, offloads)
                pairs.pop()
                used[j] = False
        used[i] = False

    search(0, 0.0, [], [])

    pairs, offloads = best["plan"]
    paired = {s for p in pairs for s in p}
    directs = tuple(i for i in range(n) if confident[i] and i not in paired)
    return GlobalAssignment(
        pairs=pairs,
        directs=directs,
        offloads=offloads,
        cost=float(best["key"][0]),
    )
