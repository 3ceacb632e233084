import math

import pytest

from neuroadc.engine import NO_MISMATCH, SimConfig
from neuroadc.inhibition import InhibitionPolicy
from neuroadc.neuron import NeuronParams
from neuroadc.scan import ScanConfig
from neuroadc.stimulus import Constant


def small_config(rows=1, cols=10, amps=50e-9, gain=1e13, steps=500, seed=0,
                 policy=None, i_exc_max=800e-9, i_inh=4e-6, mismatch=NO_MISMATCH, waveform=None,
                 record_membrane=False, leak_tau=math.inf):
    scan = ScanConfig(rows, cols, 30e-9, 10)
    neuron = NeuronParams(gain, i_exc_max, i_inh, leak_tau, 2.0, scan.tick_seconds)
    return SimConfig(scan, neuron, policy or InhibitionPolicy(), waveform or Constant(amps),
                     mismatch, steps, seed, record_membrane)


@pytest.fixture
def make_config():
    return small_config


# one line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
