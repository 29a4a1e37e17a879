"""Video object tracking by Bayesian model averaging of colour and texture models."""

from .core import FUSION_MODES, Frame, Region, StateVector, TrackerConfig, clamp_region, load_config, region_from_state
from .fusion import ParticleEnsemble, StepOutput, Tracker, step, track
from .observation import Template, build_template
from .synth import Scenario, generate, scenario_preset

__all__ = [
    "FUSION_MODES",
    "Frame",
    "ParticleEnsemble",
    "Region",
    "Scenario",
    "StateVector",
    "StepOutput",
    "Template",
    "Tracker",
    "TrackerConfig",
    "build_template",
    "clamp_region",
    "generate",
    "load_config",
    "region_from_state",
    "scenario_preset",
    "step",
    "track",
]

__version__ = "0.1.0"
