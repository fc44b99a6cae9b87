"""Digital-twin security workbench for a PLC-controlled bottle filling plant.

The package simulates the plant physics and its tag-based industrial
protocol, executes a catalog of 23 process-aware attack scenarios,
generates a labeled process dataset and trains/evaluates a stacked
ensemble intrusion detection system that classifies samples online.
"""

__version__ = "0.1.0"

from icstwin.plant import PlantConfig, ProcessState, ValveCommand, control_decision, step

__all__ = [
    "PlantConfig",
    "ProcessState",
    "ValveCommand",
    "control_decision",
    "step",
    "__version__",
]
