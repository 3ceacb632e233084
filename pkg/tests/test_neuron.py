import math

import pytest

from neuroadc.neuron import (NeuronParams, NeuronState, apply_pulse, at_threshold, discharge,
                             integrate)

DT = 30e-9


def params(**kw):
    base = dict(charge_gain=1e13, i_exc_max=800e-9, i_inh=4e-6, leak_tau=math.inf, v_max=2.0,
                tick_seconds=3e-9)
    base.update(kw)
    return NeuronParams(**base)


def test_zero_input_without_leak_holds():
    assert integrate(NeuronState(v=0.3), params(), 0.0, DT).v == 0.3


def test_rise_is_gain_times_charge():
    # 1e13 * 2e-9 A * 1e-7 s = 0.002
    p = params(charge_gain=1e13, i_exc_max=math.inf)
    out = integrate(NeuronState(), p, 2e-9, 1e-7)
    assert out.v == pytest.approx(0.002, rel=1e-12)


def test_input_clamp_matches_clamp_current():
    p = params()
    assert integrate(NeuronState(), p, 1e-6, DT).v == integrate(NeuronState(), p, 800e-9, DT).v


def test_clamp_applies_after_mismatch_gain():
    p = params()
    hot = NeuronState(g_exc=2.0)
    assert integrate(hot, p, 500e-9, DT).v == integrate(NeuronState(), p, 800e-9, DT).v


def test_saturation():
    assert integrate(NeuronState(v=1.99), params(), 800e-9, 1e-3).v == 2.0


def test_leak_decays():
    p = params(leak_tau=1e-6)
    out = integrate(NeuronState(v=1.0), p, 0.0, 1e-6)
    assert out.v == pytest.approx(math.exp(-1))


@pytest.mark.parametrize("bad", [dict(i_in=-1e-9, dt=DT), dict(i_in=0.0, dt=0.0)])
def test_integrate_rejects(bad):
    with pytest.raises(ValueError):
        integrate(NeuronState(), params(), bad["i_in"], bad["dt"])


def test_zero_width_lateral_pulse_is_noop():
    assert apply_pulse(NeuronState(v=0.7), params(), 0, False).v == 0.7


@pytest.mark.parametrize("v", [0.0, 0.4, 1.0, 1.9])
def test_self_reset_goes_to_zero(v):
    assert apply_pulse(NeuronState(v=v), params(), 10, True).v == 0.0


def test_lateral_pulse_arithmetic():
    # drop per tick 0.05: 1e13 * 4e-6 * tick -> tick = 1.25e-9
    p = params(tick_seconds=1.25e-9)
    assert p.drop_per_tick() == pytest.approx(0.05)
    assert apply_pulse(NeuronState(v=0.5), p, 4, False).v == pytest.approx(0.3)


def test_lateral_pulse_floors_at_ground():
    p = params(tick_seconds=1.25e-9)  # 0.05 per tick
    assert apply_pulse(NeuronState(v=0.1), p, 6, False).v == 0.0


def test_inhibitory_mismatch_scales_drop():
    p = params(tick_seconds=1.25e-9)
    assert discharge(0.5, 2.0, p, 2) == pytest.approx(0.3)


def test_negative_width_rejected():
    with pytest.raises(ValueError):
        apply_pulse(NeuronState(), params(), -1, False)


@pytest.mark.parametrize("v,fires", [(1.0, True), (0.999, False), (1.7, True)])
def test_threshold_inclusive(v, fires):
    assert at_threshold(NeuronState(v=v)) is fires


@pytest.mark.parametrize("field,value", [
    ("charge_gain", 0.0), ("i_exc_max", 0.0), ("i_inh", -1.0), ("leak_tau", 0.0), ("v_max", 0.5),
    ("tick_seconds", 0.0),
])
def test_params_validation(field, value):
    with pytest.raises(ValueError):
        params(**{field: value})
