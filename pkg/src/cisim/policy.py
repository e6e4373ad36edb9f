"""Per-sensor decision policy: answer locally, ask a peer, or offload.

Each sensor observes one value and walks three stages:

1. If its own posterior already clears the confidence threshold, it
   answers directly and pays nothing.
2. Otherwise it prices a request to its most promising reachable peer.
   Whether the request is worth firing depends on the configured rule,
   compared against the cost of simply offloading:

   * ``corrected-expected-cost``: fire when
     ``link + (1 - p) * uplink + p * target <= uplink``, i.e. when the
     true expected spend of trying the peer first (fetch now, offload
     only on failure) beats offloading outright.
   * ``as-written``: fire when
     ``(uplink + target) * p + (link + uplink) * (1 - p) <= uplink``.
     The failure branch here double-counts the fetch as if the offload
     still had to carry it, so for any positive link cost the rule only
     breaks even at ``p = 1``; it is kept selectable for comparison.
   * ``assume-success``: fire when the peer could possibly help
     (``p > 0``) and the success-branch spend alone is no worse than
     offloading (``link + target <= uplink``). This optimistic rule is
     what the reference operating points in the acceptance suite embody.

3. If no request fires, the sensor offloads its reading to the cloud.

``decide`` only uses information available on-device: the sensor's own
posterior and the success estimate. Realized success is settled later by
``evaluate_request`` once the peer's value is actually fetched.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import bayes, valuation
from .world import CostModel, ValidationError, WorldModel

REQUEST_RULES = ("corrected-expected-cost", "as-written", "assume-success")

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Direct:
    """Answer locally with ``label``; ``confidence`` is the posterior max."""

    label: int
    confidence: float


@dataclass(frozen=True)
class Request:
    """Fetch ``peer``'s reading; ``estimate`` is the pre-fetch valuation."""

    peer: int
    estimate: valuation.SuccessEstimate

    @property
    def success_probability(self) -> float:
        return self.estimate.probability


@dataclass(frozen=True)
class Offload:
    """Push the sensor's own reading to the cloud."""


Action = Union[Direct, Request, Offload]


@dataclass(frozen=True)
class PolicyConfig:
    """Tunable knobs of the per-sensor policy.

    ``confidence`` is the early-exit threshold on the posterior maximum,
    strictly between 0 and 1; it must also exceed ``1 / n_classes`` for
    the world it is used with (below that every sensor answers directly),
    which is checked against the actual class count when the policy runs.
    ``request_rule`` and ``estimator`` select among the documented
    variants; ``estimator='auto'`` uses the closed form for two-class
    worlds and the grid scan otherwise.
    """

    confidence: float
    request_rule: str = "corrected-expected-cost"
    estimator: str = "auto"

    def __post_init__(self):
        if not (0.0 < self.confidence < 1.0):
            raise ValidationError(
                f"confidence must lie in (0, 1), got {self.confidence!r}"
            )
        if self.request_rule not in REQUEST_RULES:
            raise ValidationError(
                f"unknown request rule {self.request_rule!r}, expected one of {REQUEST_RULES}"
            )
        # surface estimator typos at config time, not mid-simulation
        valuation.resolve_estimator(self.estimator, 2)

    def check_threshold(self, n_classes: int) -> None:
        """Reject thresholds at or below the uniform posterior ``1/K``."""
        if self.confidence * n_classes <= 1.0:
            raise ValidationError(
                f"confidence {self.confidence!r} must exceed 1/{n_classes} "
                "for this world; at or below it the threshold is always met"
            )


def expected_request_cost(
    p_success: float,
    link: float,
    uplink: float,
    target: float = 0.0,
    rule: str = "corrected-expected-cost",
) -> float:
    """Anticipated spend of firing a request, under the given rule's model.

    Only ``corrected-expected-cost`` is the true expectation of the
    realized spend; the other two rules are decision heuristics and price
    the request the way they reason about it.
    """
    if rule == "corrected-expected-cost":
        return link + (1.0 - p_success) * uplink + p_success * target
    if rule == "as-written":
        return (uplink + target) * p_success + (link + uplink) * (1.0 - p_success)
    if rule == "assume-success":
        return link + target
    raise ValidationError(f"unknown request rule {rule!r}, expected one of {REQUEST_RULES}")


def request_fires(
    p_success: float,
    link: float,
    uplink: float,
    target: float = 0.0,
    rule: str = "corrected-expected-cost",
) -> bool:
    """Is a request at this success probability worth firing over offloading?"""
    if rule == "assume-success" and p_success <= 0.0:
        return False
    return expected_request_cost(p_success, link, uplink, target, rule) <= uplink


def decide(
    world: WorldModel,
    costs: CostModel,
    config: PolicyConfig,
    sensor: int,
    value: float,
) -> Action:
    """Run the three-stage policy for one sensor and one observation.

    An estimator failure while pricing peers is logged and treated as a
    success probability of zero, so the sensor offloads instead of the
    round aborting.
    """
    config.check_threshold(world.n_classes)
    post = bayes.posterior(world, sensor, value)
    label = int(np.argmax(post))
    top = float(post[label])
    if top > config.confidence:
        return Direct(label=label, confidence=top)
    peers = costs.peers(sensor)
    if peers:
        try:
            peer, est = valuation.best_peer(
                world, post, peers, config.confidence, config.estimator
            )
        except valuation.EstimatorFailure as err:
            log.warning("sensor %d: peer valuation failed (%s); offloading", sensor, err)
        else:
            if request_fires(
                est.probability,
                float(costs.link[sensor, peer]),
                float(costs.uplink[sensor]),
                costs.target_cost(sensor),
                config.request_rule,
            ):
                return Request(peer=peer, estimate=est)
    return Offload()


def evaluate_request(
    world: WorldModel,
    threshold: float,
    requester: int,
    peer: int,
    requester_value: float,
    peer_value: float,
) -> Optional[tuple[int, float]]:
    """Settle a fired request once the peer's reading is in hand.

    Returns ``(label, confidence)`` from the joint posterior over both
    readings when it clears the threshold, and ``None`` when the fetched
    value turned out not to help (the requester must offload after all).
    """
    post = bayes.joint_posterior(world, [(requester, requester_value), (peer, peer_value)])
    label = int(np.argmax(post))
    top = float(post[label])
    if top > threshold:
        return label, top
    return None
