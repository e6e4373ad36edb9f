"""Monte Carlo driver: many rounds of the collective policy plus baselines.

One round draws a hidden class from the prior, gives every sensor its
reading, and lets each sensor act under the policy. Votes are then
collected: every direct answer is a vote, every settled request is a vote
(the joint answer), and the cloud casts one vote from the joint posterior
over everything that was offloaded, including the readings of sensors whose
requests failed. Plurality with a uniform tie break picks the round's
prediction. The same readings are also scored under the cloud-everything
and independent baselines so the three schemes are compared on identical
data.

Randomness is reproducible and parallel-safe: every random draw comes from
a generator seeded by ``(seed, trial, component)``, so any trial of any
component can be replayed in isolation and no stream depends on execution
order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import bayes
from .baselines import cloud_round, global_optimal_round, independent_round, plurality
from .policy import Direct, Offload, PolicyConfig, Request, decide, evaluate_request
from .world import CostModel, ValidationError, WorldModel

# seed-stream components, one per independent consumer of randomness
WORLD_STREAM = 0
FRAMEWORK_TIE_STREAM = 1
INDEPENDENT_TIE_STREAM = 2
GLOBAL_TIE_STREAM = 3


def stream_rng(seed: int, trial: int, component: int) -> np.random.Generator:
    """Generator for one ``(seed, trial, component)`` cell of the design."""
    return np.random.default_rng([seed, trial, component])


def sample_round(world: WorldModel, rng: np.random.Generator) -> tuple[int, np.ndarray]:
    """Draw the hidden class from the prior, then every sensor's reading."""
    u = rng.random()
    cum = np.cumsum(world.prior)
    y = int(np.searchsorted(cum, u, side="right"))
    y = min(y, world.n_classes - 1)
    noise = rng.standard_normal(world.n_sensors)
    return y, world.means[:, y] + world.sds[:, y] * noise


@dataclass(frozen=True)
class RoundOutcome:
    """Everything one policy round produced, for inspection and tests."""

    true_class: int
    prediction: int
    correct: bool
    cost: float
    actions: tuple
    n_direct: int
    n_requests: int
    n_request_success: int
    n_offload_actions: int
    n_pooled: int  # readings that reached the cloud, failed requests included


def run_framework_round(
    world: WorldModel,
    costs: CostModel,
    config: PolicyConfig,
    true_class: int,
    values: np.ndarray,
    tie_rng: np.random.Generator,
) -> RoundOutcome:
    """Play one realized round under the per-sensor policy."""
    actions = tuple(
        decide(world, costs, config, i, float(values[i])) for i in range(world.n_sensors)
    )
    votes: list[int] = []
    pool: list[tuple[int, float]] = []
    cost = 0.0
    n_direct = n_requests = n_success = n_offload = 0
    for i, act in enumerate(actions):
        if isinstance(act, Direct):
            n_direct += 1
            votes.append(act.label)
        elif isinstance(act, Request):
            n_requests += 1
            cost += float(costs.link[i, act.peer])
            settled = evaluate_request(
                world, config.confidence, i, act.peer,
                float(values[i]), float(values[act.peer]),
            )
            if settled is not None:
                n_success += 1
                votes.append(settled[0])
            else:
                cost += float(costs.uplink[i])
                pool.append((i, float(values[i])))
        else:
            n_offload += 1
            cost += float(costs.uplink[i])
            pool.append((i, float(values[i])))
    if pool:
        post = bayes.joint_posterior(world, pool)
        votes.append(int(np.argmax(post)))
    prediction = plurality(votes, world.n_classes, tie_rng)
    return RoundOutcome(
        true_class=true_class,
        prediction=prediction,
        correct=prediction == true_class,
        cost=cost,
        actions=actions,
        n_direct=n_direct,
        n_requests=n_requests,
        n_request_success=n_success,
        n_offload_actions=n_offload,
        n_pooled=len(pool),
    )


@dataclass(frozen=True)
class SimulationReport:
    """Aggregates over all trials, baselines included."""

    trials: int
    seed: int
    accuracy: float
    avg_direct: float
    avg_requests: float
    avg_successful_requests: float
    avg_offload_actions: float
    avg_cost: float
    cloud_accuracy: float
    cloud_avg_cost: float
    independent_accuracy: float


def run_trials(
    world: WorldModel,
    costs: CostModel,
    config: PolicyConfig,
    trials: int,
    seed: int,
) -> SimulationReport:
    """Run ``trials`` rounds of the policy and both baselines on shared draws."""
    if trials < 1:
        raise ValidationError(f"trials must be positive, got {trials}")
    if seed < 0:
        raise ValidationError(f"seed must be non-negative, got {seed}")
    correct = direct = requests = success = offload = 0
    cost = 0.0
    cloud_correct = 0
    cloud_cost = 0.0
    ind_correct = 0
    for t in range(trials):
        y, values = sample_round(world, stream_rng(seed, t, WORLD_STREAM))
        fw = run_framework_round(
            world, costs, config, y, values,
            stream_rng(seed, t, FRAMEWORK_TIE_STREAM),
        )
        correct += fw.correct
        direct += fw.n_direct
        requests += fw.n_requests
        success += fw.n_request_success
        offload += fw.n_offload_actions
        cost += fw.cost
        cl_label, _, cl_cost = cloud_round(world, costs, values)
        cloud_correct += cl_label == y
        cloud_cost += cl_cost
        ind_label, _ = independent_round(
            world, values, stream_rng(seed, t, INDEPENDENT_TIE_STREAM)
        )
        ind_correct += ind_label == y
    return SimulationReport(
        trials=trials,
        seed=seed,
        accuracy=correct / trials,
        avg_direct=direct / trials,
        avg_requests=requests / trials,
        avg_successful_requests=success / trials,
        avg_offload_actions=offload / trials,
        avg_cost=cost / trials,
        cloud_accuracy=cloud_correct / trials,
        cloud_avg_cost=cloud_cost / trials,
        independent_accuracy=ind_correct / trials,
    )


@dataclass(frozen=True)
class GlobalReport:
    """Aggregates for the hindsight-optimal assignment over many rounds."""

    trials: int
    seed: int
    accuracy: float
    avg_direct: float
    avg_pairs: float
    avg_offloads: float
    avg_cost: float
    cloud_accuracy: float
    cloud_avg_cost: float


def run_global_trials(
    world: WorldModel,
    costs: CostModel,
    threshold: float,
    trials: int,
    seed: int,
    max_sensors: int | None = None,
) -> GlobalReport:
    """Score the hindsight-optimal assignment on the same draw streams.

    Votes mirror the policy's: directs vote locally, each pair votes its
    joint answer, offloaded readings get one cloud vote.
    """
    if trials < 1:
        raise ValidationError(f"trials must be positive, got {trials}")
    if seed < 0:
        raise ValidationError(f"seed must be non-negative, got {seed}")
    kwargs = {} if max_sensors is None else {"max_sensors": max_sensors}
    correct = 0
    cost = 0.0
    n_direct = n_pairs = n_off = 0
    cloud_correct = 0
    cloud_cost = 0.0
    for t in range(trials):
        y, values = sample_round(world, stream_rng(seed, t, WORLD_STREAM))
        plan = global_optimal_round(world, costs, threshold, values, **kwargs)
        votes = []
        for i in plan.directs:
            votes.append(int(np.argmax(bayes.posterior(world, i, float(values[i])))))
        for i, j in plan.pairs:
            post = bayes.joint_posterior(world, [(i, float(values[i])), (j, float(values[j]))])
            votes.append(int(np.argmax(post)))
        if plan.offloads:
            post = bayes.joint_posterior(world, [(i, float(values[i])) for i in plan.offloads])
            votes.append(int(np.argmax(post)))
        label = plurality(votes, world.n_classes, stream_rng(seed, t, GLOBAL_TIE_STREAM))
        correct += label == y
        cost += plan.cost
        n_direct += len(plan.directs)
        n_pairs += len(plan.pairs)
        n_off += len(plan.offloads)
        cl_label, _, cl_cost = cloud_round(world, costs, values)
        cloud_correct += cl_label == y
        cloud_cost += cl_cost
    return GlobalReport(
        trials=trials,
        seed=seed,
        accuracy=correct / trials,
        avg_direct=n_direct / trials,
        avg_pairs=n_pairs / trials,
        avg_offloads=n_off / trials,
        avg_cost=cost / trials,
        cloud_accuracy=cloud_correct / trials,
        cloud_avg_cost=cloud_cost / trials,
    )
