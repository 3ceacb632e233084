"""Behavioral simulator of a neuromorphic ADC: a scanned integrate-and-fire
array with pulse-width-modulated lateral inhibition, plus reconstruction."""

from .config import ExperimentConfig, parse_config, render
from .engine import MismatchSpec, SimConfig, SimTrace, SpikeEvent, calibrate_charge_gain, run
from .inhibition import InhibitionPolicy, PulseEvent
from .neuron import NeuronParams, NeuronState
from .recon import ReconConfig, monte_carlo, reconstruct
from .scan import ScanConfig, ScanCursor

__all__ = [
    "ExperimentConfig", "InhibitionPolicy", "MismatchSpec", "NeuronParams", "NeuronState",
    "PulseEvent", "ReconConfig", "ScanConfig", "ScanCursor", "SimConfig", "SimTrace",
    "SpikeEvent", "calibrate_charge_gain", "monte_carlo", "parse_config", "reconstruct",
    "render", "run",
]
