"""Behavioral integrate-and-fire neuron.

Membrane voltage is kept in threshold units: the comparator trips at
exactly 1.0 and every circuit constant (membrane capacitance, threshold
voltage) is folded into a single ``charge_gain`` that converts coulombs
of input charge into threshold units.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

THRESHOLD = 1.0


@dataclass(frozen=True)
class NeuronParams:
    """Shared electrical parameters of every neuron in the array.

    Attributes:
        charge_gain: threshold units per coulomb, i.e. 1 / (C_mem * V_th).
        i_exc_max: clamp on the effective charging current (A). ``inf`` disables it.
        i_inh: discharge current while an inhibition pulse is active (A).
        leak_tau: membrane decay constant (s). ``inf`` disables leakage.
        v_max: saturation ceiling of the membrane, threshold units.
        tick_seconds: duration of one inhibition-generator clock tick (s).
    """

    charge_gain: float
    i_exc_max: float = math.inf
    i_inh: float = 4e-6
    leak_tau: float = math.inf
    v_max: float = 2.0
    tick_seconds: float = 3e-9

    def __post_init__(self):
        if not self.charge_gain > 0:
            raise ValueError(f"charge_gain must be > 0, got {self.charge_gain}")
        if not self.i_exc_max > 0:
            raise ValueError(f"i_exc_max must be > 0, got {self.i_exc_max}")
        if not self.i_inh > 0:
            raise ValueError(f"i_inh must be > 0, got {self.i_inh}")
        if not self.leak_tau > 0:
            raise ValueError(f"leak_tau must be > 0, got {self.leak_tau}")
        if not self.v_max >= THRESHOLD:
            raise ValueError(f"v_max must be >= 1.0, got {self.v_max}")
        if not self.tick_seconds > 0:
            raise ValueError(f"tick_seconds must be > 0, got {self.tick_seconds}")

    def decay(self, dt: float) -> float:
        """Multiplicative leak factor over ``dt`` seconds."""
        if math.isinf(self.leak_tau):
            return 1.0
        return math.exp(-dt / self.leak_tau)

    def drop_per_tick(self, g_inh: float = 1.0) -> float:
        """Membrane drop caused by one tick of inhibition on a neuron with gain ``g_inh``."""
        return self.charge_gain * g_inh * self.i_inh * self.tick_seconds


@dataclass(frozen=True)
class NeuronState:
    v: float = 0.0
    g_exc: float = 1.0
    g_inh: float = 1.0
    inhibited_flag: bool = False

    def __post_init__(self):
        if not (self.g_exc > 0 and self.g_inh > 0):
            raise ValueError("mismatch factors must be positive")


def integrate(state: NeuronState, params: NeuronParams, i_in: float, dt: float) -> NeuronState:
    """Leaky-integrate ``i_in`` amperes for ``dt`` seconds.

    The effective current ``g_exc * i_in`` is clamped at ``i_exc_max`` and the
    result saturates at ``v_max``.
    """
    if i_in < 0:
        raise ValueError(f"input current must be non-negative, got {i_in}")
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    current = min(state.g_exc * i_in, params.i_exc_max)
    v = state.v * params.decay(dt) + params.charge_gain * current * dt
    return replace(state, v=min(params.v_max, v))


def discharge(v: float, g_inh: float, params: NeuronParams, width_ticks: int) -> float:
    # Shared with the vectorized engine so both paths round identically.
    drop = params.charge_gain * g_inh * params.i_inh * width_ticks * params.tick_seconds
    return max(0.0, v - drop)


def apply_pulse(state: NeuronState, params: NeuronParams, width_ticks: int,
                is_self_reset: bool) -> NeuronState:
    """Deliver one inhibition pulse of ``width_ticks`` generator ticks.

    A self-reset pulse sets the membrane to exactly zero; a lateral pulse
    discharges at ``g_inh * i_inh`` for its width, floored at ground.
    """
    if width_ticks < 0:
        raise ValueError(f"width_ticks must be >= 0, got {width_ticks}")
    if is_self_reset:
        return replace(state, v=0.0)
    return replace(state, v=discharge(state.v, state.g_inh, params, width_ticks))


def at_threshold(state: NeuronState) -> bool:
    return state.v >= THRESHOLD
