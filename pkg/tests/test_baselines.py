"""Cloud, independent, and hindsight-optimal reference schemes."""

from __future__ import annotations

import numpy as np
import pytest

from cisim import (
    CostModel,
    PolicyConfig,
    Request,
    SolverLimitError,
    ValidationError,
    WorldModel,
    bayes,
    cloud_round,
    global_optimal_round,
    independent_round,
    run_framework_round,
    sample_round,
)
from cisim.baselines import GLOBAL_SOLVER_MAX_SENSORS, plurality
from cisim.simulate import WORLD_STREAM, stream_rng

from .oracle_utils import cheapest_plan_cost, enumerate_plans


class TestPlurality:
    def test_unanimous(self):
        rng = np.random.default_rng(0)
        assert plurality([1, 1, 1], 2, rng) == 1

    def test_strict_majority_ignores_the_rng(self):
        for seed in range(20):
            rng = np.random.default_rng(seed)
            assert plurality([0, 0, 1], 2, rng) == 0
            assert plurality([2, 1, 2, 0, 2], 3, rng) == 2

    def test_single_vote(self):
        assert plurality([3], 5, np.random.default_rng(1)) == 3

    def test_tie_break_stays_inside_the_tied_set(self):
        for seed in range(50):
            rng = np.random.default_rng(seed)
            assert plurality([2, 2, 1, 1, 0], 3, rng) in (1, 2)

    def test_tie_break_is_roughly_uniform(self):
        hits = np.zeros(2, dtype=int)
        for seed in range(400):
            hits[plurality([0, 1], 2, np.random.default_rng(seed))] += 1
        # binomial(400, 1/2): 3 sigma is 30
        assert abs(hits[0] - 200) < 50

    def test_absent_classes_never_win(self):
        for seed in range(20):
            rng = np.random.default_rng(seed)
            assert plurality([4, 4], 6, rng) == 4


class TestCloudRound:
    def test_matches_the_joint_posterior(self, binary_world, uniform_costs):
        values = np.array([1.0, 2.9])
        label, confidence, cost = cloud_round(binary_world, uniform_costs, values)
        post = bayes.joint_posterior(binary_world, list(enumerate(values)))
        assert label == int(np.argmax(post))
        assert confidence == pytest.approx(float(post.max()))
        assert cost == 8.0

    def test_cost_sums_heterogeneous_uplinks(self, binary_world):
        costs = CostModel(link=np.ones((2, 2)), uplink=np.array([2.0, 7.0]))
        _, _, cost = cloud_round(binary_world, costs, np.array([0.5, 0.5]))
        assert cost == 9.0


class TestIndependentRound:
    def test_votes_are_the_local_answers(self, binary_world):
        values = np.array([3.5, -1.5])
        label, votes = independent_round(binary_world, values, np.random.default_rng(3))
        assert votes.tolist() == [1, 0]
        assert label in (0, 1)

    def test_majority_needs_no_tie_break(self):
        world = WorldModel.indexed(2, 3, spacing=2.0, sd=1.5)
        values = np.array([3.5, 3.5, -1.5])
        for seed in range(10):
            label, votes = independent_round(world, values, np.random.default_rng(seed))
            assert votes.tolist() == [1, 1, 0]
            assert label == 1


def _random_costs(n: int, rng: np.random.Generator) -> CostModel:
    link = rng.uniform(0.5, 6.0, size=(n, n))
    link[rng.random((n, n)) < 0.15] = np.inf
    uplink = rng.uniform(1.0, 5.0, size=n)
    return CostModel(link=link, uplink=uplink)


class TestGlobalOptimal:
    def test_all_confident_costs_nothing(self, binary_world, uniform_costs):
        plan = global_optimal_round(binary_world, uniform_costs, 0.75, np.array([3.5, -1.5]))
        assert plan.directs == (0, 1)
        assert plan.pairs == ()
        assert plan.offloads == ()
        assert plan.cost == 0.0

    def test_cheap_settling_pair_beats_the_uplink(self, binary_world, uniform_costs):
        # sensor 0 is on the fence, sensor 1's reading settles it for 1 unit
        plan = global_optimal_round(binary_world, uniform_costs, 0.75, np.array([1.0, 2.9]))
        assert plan.pairs == ((0, 1),)
        assert plan.offloads == ()
        assert plan.directs == ()
        assert plan.cost == 1.0

    def test_unsettleable_round_offloads_everyone(self, binary_world, uniform_costs):
        plan = global_optimal_round(binary_world, uniform_costs, 0.75, np.array([1.0, 1.0]))
        assert plan.pairs == ()
        assert plan.offloads == (0, 1)
        assert plan.cost == 8.0

    def test_two_unconfident_sensors_can_settle_each_other(
        self, binary_world, uniform_costs
    ):
        plan = global_optimal_round(binary_world, uniform_costs, 0.75, np.array([1.8, 1.8]))
        assert plan.pairs == ((0, 1),)
        assert plan.offloads == ()
        assert plan.cost == 1.0

    def test_cost_tie_prefers_fewer_pairs(self, binary_world):
        costs = CostModel.uniform(2, link=4.0, uplink=4.0)
        plan = global_optimal_round(binary_world, costs, 0.75, np.array([1.0, 2.9]))
        assert plan.pairs == ()
        assert plan.offloads == (0,)
        assert plan.directs == (1,)
        assert plan.cost == 4.0

    def test_deterministic_plan(self, binary_world, uniform_costs):
        values = np.array([1.2, 1.9])
        a = global_optimal_round(binary_world, uniform_costs, 0.75, values)
        b = global_optimal_round(binary_world, uniform_costs, 0.75, values)
        assert a == b

    @pytest.mark.parametrize("sensors", [2, 3, 4, 5])
    def test_matches_exhaustive_enumeration(self, sensors):
        world = WorldModel.indexed(2, sensors, spacing=2.0, sd=1.5)
        rng = np.random.default_rng(100 + sensors)
        for trial in range(6):
            costs = _random_costs(sensors, rng)
            _, values = sample_round(world, stream_rng(11, trial, WORLD_STREAM))
            plan = global_optimal_round(world, costs, 0.75, values)
            assert plan.cost == pytest.approx(
                cheapest_plan_cost(world, costs, 0.75, values), abs=1e-12
            )

    def test_matches_enumeration_with_three_classes(self):
        world = WorldModel.indexed(3, 4, spacing=1.5, sd=1.2)
        rng = np.random.default_rng(9)
        for trial in range(6):
            costs = _random_costs(4, rng)
            _, values = sample_round(world, stream_rng(13, trial, WORLD_STREAM))
            plan = global_optimal_round(world, costs, 0.6, values)
            assert plan.cost == pytest.approx(
                cheapest_plan_cost(world, costs, 0.6, values), abs=1e-12
            )

    def test_plan_validity_invariants(self):
        world = WorldModel.indexed(2, 5, spacing=2.0, sd=1.5)
        rng = np.random.default_rng(77)
        threshold = 0.75
        for trial in range(12):
            costs = _random_costs(5, rng)
            _, values = sample_round(world, stream_rng(21, trial, WORLD_STREAM))
            plan = global_optimal_round(world, costs, threshold, values)
            members = list(plan.directs) + list(plan.offloads)
            for i, j in plan.pairs:
                members += [i, j]
            assert sorted(members) == list(range(5))
            for i in plan.directs:
                post = bayes.posterior(world, i, float(values[i]))
                assert float(post.max()) > threshold
            for i in plan.offloads:
                post = bayes.posterior(world, i, float(values[i]))
                assert float(post.max()) <= threshold
            bill = 0.0
            for i, j in plan.pairs:
                req = bayes.posterior(world, i, float(values[i]))
                assert float(req.max()) <= threshold
                joint = bayes.joint_posterior(
                    world, [(i, float(values[i])), (j, float(values[j]))]
                )
                assert float(joint.max()) > threshold
                assert np.isfinite(costs.link[i, j])
                bill += float(costs.link[i, j])
            bill += sum(float(costs.uplink[i]) for i in plan.offloads)
            assert plan.cost == pytest.approx(bill, abs=1e-12)

    def test_never_beats_free_and_never_loses_to_the_cloud(self):
        world = WorldModel.indexed(2, 4, spacing=2.0, sd=1.5)
        rng = np.random.default_rng(5)
        for trial in range(15):
            costs = _random_costs(4, rng)
            _, values = sample_round(world, stream_rng(31, trial, WORLD_STREAM))
            plan = global_optimal_round(world, costs, 0.75, values)
            assert 0.0 <= plan.cost <= float(costs.uplink.sum()) + 1e-12

    def test_lower_bounds_the_policy_on_comparable_rounds(self, binary_world):
        # a policy round maps onto a valid hindsight plan when no provider
        # is shared and no provider is itself a requester; there the exact
        # solver can never be beaten
        world = WorldModel.indexed(2, 3, spacing=2.0, sd=1.5)
        costs = CostModel.uniform(3, link=1.0, uplink=4.0)
        config = PolicyConfig(confidence=0.75, request_rule="assume-success")
        comparable = 0
        for trial in range(80):
            y, values = sample_round(world, stream_rng(41, trial, WORLD_STREAM))
            fw = run_framework_round(
                world, costs, config, y, values, stream_rng(41, trial, 1)
            )
            requesters = [
                i for i, act in enumerate(fw.actions) if isinstance(act, Request)
            ]
            providers = [fw.actions[i].peer for i in requesters]
            if len(set(providers)) != len(providers):
                continue
            if set(providers) & set(requesters):
                continue
            comparable += 1
            plan = global_optimal_round(world, costs, 0.75, values)
            assert plan.cost <= fw.cost + 1e-12
        assert comparable >= 20

    def test_size_cap(self, uniform_costs):
        world = WorldModel.indexed(2, 17, spacing=2.0, sd=1.5)
        costs = CostModel.uniform(17, link=1.0, uplink=4.0)
        with pytest.raises(SolverLimitError, match="capped at 16"):
            global_optimal_round(world, costs, 0.75, np.zeros(17))
        assert GLOBAL_SOLVER_MAX_SENSORS == 16

    def test_size_cap_is_adjustable(self):
        world = WorldModel.indexed(2, 4, spacing=2.0, sd=1.5)
        costs = CostModel.uniform(4, link=1.0, uplink=4.0)
        with pytest.raises(SolverLimitError, match="capped at 3"):
            global_optimal_round(world, costs, 0.75, np.zeros(4), max_sensors=3)

    def test_threshold_must_be_meaningful(self, binary_world, uniform_costs):
        for bad in (0.5, 0.3, 1.0, 1.2):
            with pytest.raises(ValidationError, match="must lie in"):
                global_optimal_round(binary_world, uniform_costs, bad, np.zeros(2))
