"""Inhibition generator: pulse-width-modulated lateral inhibition schedules.

When the selected neuron fires, the generator resets it and then, one scan
step at a time, sends each following neuron (in scan order) a discharge
pulse whose width shrinks with scan distance. A neuron that has already
been inhibited by someone else since its last spike only resets itself.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ALL = "all"


@dataclass(frozen=True)
class InhibitionPolicy:
    """Width schedule for lateral pulses, in inhibition-generator ticks.

    The lateral width at scan distance k >= 1 is
    ``max(min_width, base_width - (k - 1) * decrement)`` plus a uniform
    integer jitter in ``[-jitter, +jitter]``, clamped to one scan step.
    """

    base_width_ticks: int = 8
    decrement_ticks: int = 1
    min_width_ticks: int = 1
    jitter_ticks: int = 1
    fanout: int | str = ALL
    enabled: bool = True

    def __post_init__(self):
        if not 0 <= self.min_width_ticks <= self.base_width_ticks:
            raise ValueError("need 0 <= min_width_ticks <= base_width_ticks")
        if self.decrement_ticks < 0:
            raise ValueError("decrement_ticks must be >= 0")
        if self.jitter_ticks < 0:
            raise ValueError("jitter_ticks must be >= 0")
        if self.fanout != ALL and (isinstance(self.fanout, bool)
                                   or not isinstance(self.fanout, int) or self.fanout < 0):
            raise ValueError(f"fanout must be 'all' or a non-negative int, got {self.fanout!r}")

    def validate_for(self, gen_ticks_per_step: int) -> None:
        if self.base_width_ticks > gen_ticks_per_step:
            raise ValueError(
                f"base_width_ticks {self.base_width_ticks} exceeds {gen_ticks_per_step} ticks per step")

    def n_lateral(self, n_neurons: int) -> int:
        if self.fanout == ALL:
            return n_neurons - 1
        return min(self.fanout, n_neurons - 1)


@dataclass(frozen=True)
class PulseEvent:
    target_id: int
    delivery_step: int
    width_ticks: int
    origin_id: int
    is_self_reset: bool


def pulse_width(policy: InhibitionPolicy, distance_k: int, rng: np.random.Generator,
                gen_ticks_per_step: int = 10) -> int:
    """Width in ticks for the pulse sent ``distance_k`` scan positions after the firer.

    Distance 0 is the firer itself and gets the full step (the self-reset).
    """
    if distance_k < 0:
        raise ValueError(f"distance_k must be >= 0, got {distance_k}")
    if distance_k == 0:
        return gen_ticks_per_step
    width = max(policy.min_width_ticks,
                policy.base_width_ticks - (distance_k - 1) * policy.decrement_ticks)
    if policy.jitter_ticks:
        width += int(rng.integers(-policy.jitter_ticks, policy.jitter_ticks + 1))
    return min(max(width, 0), gen_ticks_per_step)


def self_reset(firer_id: int, step: int, gen_ticks_per_step: int = 10) -> PulseEvent:
    return PulseEvent(firer_id, step, gen_ticks_per_step, firer_id, True)


def build_schedule(policy: InhibitionPolicy, firer_id: int, step: int, n_neurons: int,
                   rng: np.random.Generator, gen_ticks_per_step: int = 10) -> list[PulseEvent]:
    if not 0 <= firer_id < n_neurons:
        raise ValueError(f"firer_id {firer_id} outside [0, {n_neurons})")
    events = [self_reset(firer_id, step, gen_ticks_per_step)]
    if not policy.enabled:
        return events
    for k in range(1, policy.n_lateral(n_neurons) + 1):
        width = pulse_width(policy, k, rng, gen_ticks_per_step)
        events.append(PulseEvent((firer_id + k) % n_neurons, step + k, width, firer_id, False))
    return events


def handle_fire(firer_inhibited_flag: bool, policy: InhibitionPolicy, firer_id: int, step: int,
                n_neurons: int, rng: np.random.Generator,
                gen_ticks_per_step: int = 10) -> list[PulseEvent]:
    """Decide between broadcasting a full schedule and a bare self-reset.

    The caller is responsible for clearing the firer's inhibited flag afterwards.
    """
    if firer_inhibited_flag:
        if not 0 <= firer_id < n_neurons:
            raise ValueError(f"firer_id {firer_id} outside [0, {n_neurons})")
        return [self_reset(firer_id, step, gen_ticks_per_step)]
    return build_schedule(policy, firer_id, step, n_neurons, rng, gen_ticks_per_step)
