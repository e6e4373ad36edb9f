"""Peer-value estimators against frozen references and each other.

Reference probabilities and interval endpoints were computed once from
the closed-form threshold geometry of the equal-sd binary world (where
the requester's log odds shift the single-sensor confidence thresholds)
and frozen here.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from cisim import ValidationError, WorldModel, bayes, valuation

MIDPOINT_PHAT = 0.505537018
MIDPOINT_CUTS = (-0.235938825, 2.235938825)
OFFCENTER_PHAT = 0.525801842


@pytest.fixture
def q_mid(binary_world):
    return bayes.posterior(binary_world, 0, 1.0)


@pytest.fixture
def flat_peer_world():
    """Peer 1's reading has the same distribution under either class."""
    return WorldModel(
        prior=[0.5, 0.5],
        means=[[0.0, 2.0], [1.0, 1.0]],
        sds=[[1.5, 1.5], [1.5, 1.5]],
    )


def interval_probes(intervals, span=12.0):
    """A point inside each interval, clipping infinite ends."""
    pts = []
    for lo, hi in intervals:
        a = lo if math.isfinite(lo) else hi - span
        b = hi if math.isfinite(hi) else lo + span
        pts.append(0.5 * (a + b))
    return pts


class TestExactBinary:
    def test_midpoint_requester_frozen_value(self, binary_world, q_mid):
        est = valuation.success_prob_exact(binary_world, q_mid, 1, 0.75)
        assert est.method == "exact"
        assert est.peer == 1
        assert est.probability == pytest.approx(MIDPOINT_PHAT, abs=1e-8)
        (lo_hi), (hi_lo) = est.intervals
        assert lo_hi[0] == -math.inf and hi_lo[1] == math.inf
        assert lo_hi[1] == pytest.approx(MIDPOINT_CUTS[0], abs=1e-8)
        assert hi_lo[0] == pytest.approx(MIDPOINT_CUTS[1], abs=1e-8)

    def test_off_centre_requester_frozen_value(self, binary_world):
        q = bayes.posterior(binary_world, 0, 1.6)
        est = valuation.success_prob_exact(binary_world, q, 1, 0.75)
        assert est.probability == pytest.approx(OFFCENTER_PHAT, abs=1e-8)

    def test_probability_is_the_measure_of_the_intervals(self, binary_world, q_mid):
        est = valuation.success_prob_exact(binary_world, q_mid, 1, 0.75)
        assert est.probability == pytest.approx(
            bayes.interval_measure(binary_world, 1, est.intervals), abs=1e-12
        )

    def test_interval_membership_matches_the_joint_check(self, binary_world, q_mid):
        est = valuation.success_prob_exact(binary_world, q_mid, 1, 0.75)
        for x in interval_probes(est.intervals):
            joint = bayes.joint_posterior(binary_world, [(0, 1.0), (1, x)])
            assert float(joint.max()) > 0.75
        # between the two tails nothing succeeds
        for x in (-0.1, 1.0, 2.1):
            joint = bayes.joint_posterior(binary_world, [(0, 1.0), (1, x)])
            assert float(joint.max()) <= 0.75

    def test_rejects_many_class_worlds(self):
        w = WorldModel.indexed(3, 2, 2.0, 1.5)
        q = bayes.posterior(w, 0, 1.0)
        with pytest.raises(ValidationError, match="2 classes"):
            valuation.success_prob_exact(w, q, 1, 0.75)

    def test_unattainable_confidence_vanishes(self, binary_world, q_mid):
        est = valuation.success_prob_exact(binary_world, q_mid, 1, 0.9999)
        assert est.probability < 0.01

    def test_threshold_monotonicity(self, binary_world, q_mid):
        ladder = [
            valuation.success_prob_exact(binary_world, q_mid, 1, lam).probability
            for lam in (0.55, 0.65, 0.75, 0.85, 0.95)
        ]
        for a, b in zip(ladder, ladder[1:]):
            assert b <= a + 1e-12

    def test_wide_separation_saturates(self):
        w = WorldModel.indexed(2, 2, 7.0, 1.5)
        q = bayes.posterior(w, 0, 3.5)
        est = valuation.success_prob_exact(w, q, 1, 0.55)
        assert est.probability > 0.99

    def test_flat_peer_cannot_help_an_unconfident_requester(self, flat_peer_world):
        q = bayes.posterior(flat_peer_world, 0, 1.0)
        est = valuation.success_prob_exact(flat_peer_world, q, 1, 0.75)
        assert est.probability == 0.0
        assert est.intervals == ()

    def test_flat_peer_never_hurts_a_confident_requester(self, flat_peer_world):
        q = bayes.posterior(flat_peer_world, 0, 3.2)
        assert float(q.max()) > 0.75
        est = valuation.success_prob_exact(flat_peer_world, q, 1, 0.75)
        assert est.probability == 1.0
        assert est.intervals == ((-math.inf, math.inf),)

    def test_equal_variance_regions_are_half_lines(self, binary_world, q_mid):
        regions = valuation._class_region_binary(
            q_mid, binary_world.means[1], binary_world.sds[1], 0.75, 1
        )
        assert len(regions) == 1
        lo, hi = regions[0]
        assert hi == math.inf and math.isfinite(lo)

    def test_threshold_domain_is_checked(self, binary_world, q_mid):
        for bad in (0.0, 1.0, -0.2, 1.7):
            with pytest.raises(ValidationError, match="threshold"):
                valuation.success_prob_exact(binary_world, q_mid, 1, bad)

    def test_posterior_shape_is_checked(self, binary_world):
        with pytest.raises(ValidationError, match="shape"):
            valuation.success_prob_exact(binary_world, [0.2, 0.3, 0.5], 1, 0.75)

    def test_peer_index_is_checked(self, binary_world, q_mid):
        with pytest.raises(ValidationError, match="peer index"):
            valuation.success_prob_exact(binary_world, q_mid, 7, 0.75)


class TestEstimatorAgreement:
    def test_binary_world_triple_agreement(self, binary_world):
        for s in (0.4, 1.0, 1.6):
            q = bayes.posterior(binary_world, 0, s)
            exact = valuation.success_prob_exact(binary_world, q, 1, 0.75)
            sampled = valuation.success_prob_sampled(binary_world, q, 1, 0.75)
            walked = valuation.success_prob_heuristic(binary_world, q, 1, 0.75)
            assert sampled.method == "sample" and walked.method == "heuristic"
            assert sampled.probability == pytest.approx(exact.probability, abs=2e-6)
            assert walked.probability == pytest.approx(exact.probability, abs=2e-6)

    def test_many_class_world_pairwise_agreement(self):
        w = WorldModel.indexed(4, 2, 2.0, 1.5)
        for s in (0.8, 2.7, 4.4):
            q = bayes.posterior(w, 0, s)
            sampled = valuation.success_prob_sampled(w, q, 1, 0.6)
            walked = valuation.success_prob_heuristic(w, q, 1, 0.6)
            assert walked.probability == pytest.approx(sampled.probability, abs=1e-6)

    def test_sampled_rejects_a_narrow_scan_range(self, binary_world, q_mid):
        with pytest.raises(ValidationError, match="must cover"):
            valuation.success_prob_sampled(binary_world, q_mid, 1, 0.75, grid=(-3.0, 3.0))

    def test_sampled_accepts_a_generous_scan_range(self, binary_world, q_mid):
        est = valuation.success_prob_sampled(
            binary_world, q_mid, 1, 0.75, grid=(-20.0, 22.0), points=40_000
        )
        assert est.probability == pytest.approx(MIDPOINT_PHAT, abs=2e-6)

    def test_heuristic_rejects_a_bad_step(self, binary_world, q_mid):
        with pytest.raises(ValidationError, match="step"):
            valuation.success_prob_heuristic(binary_world, q_mid, 1, 0.75, step=0.0)


class TestDispatch:
    def test_auto_prefers_exact_for_two_classes(self):
        assert valuation.resolve_estimator("auto", 2) == "exact"
        assert valuation.resolve_estimator("auto", 5) == "sample"

    def test_unknown_names_are_rejected(self):
        with pytest.raises(ValidationError, match="estimator"):
            valuation.resolve_estimator("quadrature", 2)

    def test_dispatcher_tags_match(self, binary_world, q_mid):
        assert valuation.success_probability(binary_world, q_mid, 1, 0.75).method == "exact"
        assert (
            valuation.success_probability(binary_world, q_mid, 1, 0.75, "heuristic").method
            == "heuristic"
        )

    def test_best_peer_prefers_the_most_promising(self):
        # peer 2 is flat for class separation, peer 1 is informative
        w = WorldModel(
            prior=[0.5, 0.5],
            means=[[0.0, 2.0], [0.0, 2.0], [1.0, 1.0]],
            sds=[[1.5, 1.5], [1.5, 1.5], [1.5, 1.5]],
        )
        q = bayes.posterior(w, 0, 1.0)
        peer, est = valuation.best_peer(w, q, [1, 2], 0.75)
        assert peer == 1
        assert est.peer == 1
        assert est.probability > 0.5

    def test_best_peer_breaks_ties_toward_the_lowest_index(self, q_mid):
        w = WorldModel.indexed(2, 3, 2.0, 1.5)
        q = bayes.posterior(w, 0, 1.0)
        peer, _ = valuation.best_peer(w, q, [2, 1], 0.75)
        assert peer == 2  # identical peers: first offered wins
        peer, _ = valuation.best_peer(w, q, [1, 2], 0.75)
        assert peer == 1

    def test_best_peer_requires_candidates(self, binary_world, q_mid):
        with pytest.raises(ValidationError, match="at least one"):
            valuation.best_peer(binary_world, q_mid, [], 0.75)


class TestFailurePath:
    def test_budget_exhaustion_raises_with_partial_intervals(
        self, binary_world, q_mid, monkeypatch
    ):
        def starved(k, q, mus, sds, lam, start, step, lo, hi, budget):
            return [], 3, False

        monkeypatch.setattr(valuation.kernels, "class_sign_changes", starved)
        with pytest.raises(valuation.EstimatorFailure) as err:
            valuation.success_prob_heuristic(binary_world, q_mid, 1, 0.75)
        assert err.value.intervals == ()

    def test_merge_intervals_fuses_overlaps(self):
        merged = valuation.merge_intervals([(3.0, 4.0), (0.0, 1.0), (0.5, 2.0), (4.0, 4.0)])
        assert merged == ((0.0, 2.0), (3.0, 4.0))
