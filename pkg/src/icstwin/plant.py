"""Discrete-time physics of the filling process and the PLC1 control law.

The plant is a liquid tank draining through a motor valve into a bottle.
Outflow follows a Torricelli-style law (FLOW_COEFF * sqrt(tank_level)),
the tank refills at a constant rate up to its capacity, and a full bottle
is swapped for an empty one the instant it crosses the full threshold.
All state transitions are pure functions of (state, command, config) so a
trajectory is bit-reproducible from its inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np


class Sensor(Enum):
    """The three process sensors. Tank is wired to PLC1, flow to PLC2, bottle to PLC3."""

    TANK_LEVEL = "tank_level"
    PIPE_FLOW = "pipe_flow"
    BOTTLE_LEVEL = "bottle_level"


@dataclass(frozen=True)
class ProcessState:
    """Ground-truth physical state at one simulation instant.

    Invariants: 0 <= tank_level <= TANK_CAP, 0 <= bottle_level <= BOTTLE_CAP,
    pipe_flow == 0 whenever the valve is closed.
    """

    sim_time: float = 0.0
    tank_level: float = 100.0
    pipe_flow: float = 0.0
    bottle_level: float = 0.0
    valve_open: bool = False
    bottles_filled: int = 0


@dataclass(frozen=True)
class ValveCommand:
    """Actuator command issued by PLC1 (or forged by an attacker)."""

    open: bool


@dataclass(frozen=True)
class PlantConfig:
    """Plant constants, integration step and per-sensor measurement noise.

    Defaults keep the closed-loop equilibrium tank level
    (REFILL_RATE / FLOW_COEFF)^2 = 2.56 above ``tank_min`` so the valve does
    not chatter on the tank-protection threshold during normal operation.
    """

    tank_cap: float = 100.0
    bottle_cap: float = 10.0
    tank_min: float = 1.5
    refill_rate: float = 0.8
    flow_coeff: float = 0.5
    bottle_full_thresh: float = 9.5
    dt: float = 0.1
    sigma_tank: float = 0.05
    sigma_flow: float = 0.05
    sigma_bottle: float = 0.05
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise ValueError("dt must be > 0")
        if not (0 < self.tank_min < self.tank_cap):
            raise ValueError("require 0 < tank_min < tank_cap")
        if not (0 < self.bottle_full_thresh <= self.bottle_cap):
            raise ValueError("require 0 < bottle_full_thresh <= bottle_cap")
        for name in ("refill_rate", "flow_coeff", "sigma_tank", "sigma_flow", "sigma_bottle"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    @property
    def max_flow(self) -> float:
        return self.flow_coeff * math.sqrt(self.tank_cap)

    @property
    def equilibrium_tank_level(self) -> float:
        """Level where refill balances outflow with the valve open."""
        return min((self.refill_rate / self.flow_coeff) ** 2, self.tank_cap)

    def sensor_range(self, sensor: Sensor) -> tuple[float, float]:
        """Physical operating range of a sensor's measurement."""
        if sensor is Sensor.TANK_LEVEL:
            return (0.0, self.tank_cap)
        if sensor is Sensor.PIPE_FLOW:
            return (0.0, self.max_flow)
        return (0.0, self.bottle_cap)

    def initial_state(self) -> ProcessState:
        """The plant at its operating point: filling runs, tank at equilibrium."""
        return ProcessState(sim_time=0.0, tank_level=self.equilibrium_tank_level)


def step(state: ProcessState, cmd: ValveCommand, cfg: PlantConfig) -> ProcessState:
    """Advance the plant by one dt.

    Outflow is clamped so the tank never goes negative; refill is clamped at
    the tank cap. Tank outflow and bottle inflow are the same flow * dt
    quantity, so volume is conserved tick by tick (up to the bottle swap).
    """
    dt = cfg.dt
    if cmd.open and state.tank_level > 0.0:
        flow = cfg.flow_coeff * math.sqrt(state.tank_level)
        flow = min(flow, state.tank_level / dt)
    else:
        flow = 0.0

    moved = flow * dt
    tank = state.tank_level - moved
    if tank < cfg.tank_cap:
        tank = min(tank + cfg.refill_rate * dt, cfg.tank_cap)

    bottle = min(state.bottle_level + moved, cfg.bottle_cap)
    filled = state.bottles_filled
    if bottle >= cfg.bottle_full_thresh:
        bottle = 0.0
        filled += 1

    return replace(
        state,
        sim_time=state.sim_time + dt,
        tank_level=tank,
        pipe_flow=flow,
        bottle_level=bottle,
        valve_open=cmd.open,
        bottles_filled=filled,
    )


def control_decision(tank: float, flow: float, bottle: float, cfg: PlantConfig) -> ValveCommand:
    """PLC1's valve decision from the three measurements it currently holds.

    Opens while the bottle is below the full threshold and the tank is above
    the protection minimum. The flow reading is a plausibility input only.
    Any NaN input fails safe to closed.
    """
    if math.isnan(tank) or math.isnan(flow) or math.isnan(bottle):
        return ValveCommand(open=False)
    return ValveCommand(open=bool(bottle < cfg.bottle_full_thresh and tank > cfg.tank_min))


def read_sensor(state: ProcessState, sensor: Sensor, cfg: PlantConfig, rng: np.random.Generator) -> float:
    """Measure one sensor: true value plus Gaussian noise, clamped to its range."""
    true = {
        Sensor.TANK_LEVEL: state.tank_level,
        Sensor.PIPE_FLOW: state.pipe_flow,
        Sensor.BOTTLE_LEVEL: state.bottle_level,
    }[sensor]
    sigma = {
        Sensor.TANK_LEVEL: cfg.sigma_tank,
        Sensor.PIPE_FLOW: cfg.sigma_flow,
        Sensor.BOTTLE_LEVEL: cfg.sigma_bottle,
    }[sensor]
    value = true if sigma == 0.0 else true + sigma * rng.standard_normal()
    lo, hi = cfg.sensor_range(sensor)
    return float(min(max(value, lo), hi))
