"""Scenario schema, bundled case study, reports, and the command line."""

from .schema import (
    FidelityConfig,
    OperationsConfig,
    PrefixedConfig,
    ScenarioFile,
    load_scenario,
    save_scenario,
)
from .lunar import bundled_lunar_scenario

__all__ = [
    "FidelityConfig",
    "OperationsConfig",
    "PrefixedConfig",
    "ScenarioFile",
    "bundled_lunar_scenario",
    "load_scenario",
    "save_scenario",
]
