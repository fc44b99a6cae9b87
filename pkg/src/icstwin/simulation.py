"""Co-simulation driver: plant, PLC nodes, polling, campaign and sampling.

One virtual clock advances everything in dt ticks. Every 0.5 s cadence
instant PLC1 polls PLC2/PLC3 over the tag protocol, a labeled sample of
PLC1's held values is recorded, and only then does the control scan run,
so the logged motor state is the one that produced the logged flow.
Attack windows engage and tear down on the same clock.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from icstwin import attacks
from icstwin.attacks import ActiveAttack, AttackWindow, Campaign, install, scenario_by_id
from icstwin.dataset import CADENCE_S, CATEGORY_LABEL, ClassLabel, Dataset, LabeledSample
from icstwin.network import VirtualNetwork
from icstwin.plant import PlantConfig, ProcessState, Sensor, ValveCommand, control_decision, read_sensor, step
from icstwin.protocol import FrameKind, Node, TagFrame, TagId


def _r6(x: float) -> float:
    return round(x, 6)


@dataclass
class Plc1View:
    """What PLC1 currently holds: polled tag values, their ages and the actuator."""

    flow_level: float = 0.0
    bottle_level: float = 0.0
    last_flow_tick: int = 0
    last_bottle_tick: int = 0
    tank_meas: float = 0.0
    actuator_open: bool = False


@dataclass
class SimResult:
    dataset: Dataset
    states: list[ProcessState]
    trace: list[dict]
    campaign: Campaign | None
    wall_seconds: float = 0.0


class SimulationDriver:
    """Single-threaded simulation owning plant state, network and campaign."""

    def __init__(
        self,
        cfg: PlantConfig | None = None,
        campaign: Campaign | None = None,
        seed: int = 0,
        collect_trace: bool = False,
        collect_states: bool = False,
    ) -> None:
        self.cfg = cfg or PlantConfig()
        self.campaign = campaign
        self.rng = np.random.default_rng(seed)
        self.net = VirtualNetwork(trace=collect_trace)
        for node in Node:
            self.net.register(node)
        self.collect_states = collect_states

        self.state = self.cfg.initial_state()
        self.plc1 = Plc1View()
        self.plc2_flow = 0.0
        self.plc3_bottle = 0.0
        self._seq: dict[Node, int] = {node: 0 for node in Node}
        self.cadence_ticks = int(round(CADENCE_S / self.cfg.dt))
        if abs(self.cadence_ticks * self.cfg.dt - CADENCE_S) > 1e-9:
            raise ValueError("dt must divide the 0.5 s sampling cadence")

        self._windows: list[tuple[AttackWindow, int, int]] = []
        if campaign is not None:
            for w in campaign.windows:
                start_tick = int(round(w.start / self.cfg.dt))
                end_tick = int(round(w.end / self.cfg.dt))
                self._windows.append((w, start_tick, end_tick))
        self._active: dict[int, ActiveAttack] = {}
        self._tick = 0
        self._refresh_remote_sensors()

    # -- protocol plumbing ----------------------------------------------------

    def next_seq(self, node: Node) -> int:
        seq = self._seq[node]
        self._seq[node] = (seq + 1) & 0xFFFFFFFF
        return seq

    def process_node_inboxes(self) -> None:
        """Run node logic until every inbox is empty (responses ride the same instant)."""
        for _ in range(8):
            pending = False
            for node in (Node.PLC2, Node.PLC3, Node.PLC1, Node.HMI, Node.ATTACKER):
                frames = self.net.drain(node)
                if frames:
                    pending = True
                for frame in frames:
                    self._handle_frame(node, frame)
            if not pending:
                return

    def _handle_frame(self, node: Node, frame: TagFrame) -> None:
        now = self.net.now
        if node in (Node.PLC2, Node.PLC3):
            if frame.kind is FrameKind.READ_REQUEST:
                value = self.plc2_flow if node is Node.PLC2 else self.plc3_bottle
                response = TagFrame(
                    seq=self.next_seq(node), src=node, dst=frame.src,
                    kind=FrameKind.READ_RESPONSE, tag=frame.tag, value=value, ts=now,
                )
                self.net.send(response)
        elif node is Node.PLC1:
            if frame.kind is FrameKind.READ_RESPONSE:
                tick = self._tick
                if frame.tag is TagId.FLOW_LEVEL:
                    self.plc1.flow_level = frame.value
                    self.plc1.last_flow_tick = tick
                elif frame.tag is TagId.BOTTLE_LEVEL:
                    self.plc1.bottle_level = frame.value
                    self.plc1.last_bottle_tick = tick
            elif frame.kind is FrameKind.WRITE_REQUEST and frame.tag is TagId.MOTOR_STATE:
                # No authentication: any WriteRequest claiming any source is applied.
                self.plc1.actuator_open = frame.value >= 0.5
                ack = TagFrame(seq=self.next_seq(Node.PLC1), src=Node.PLC1, dst=frame.src, kind=FrameKind.WRITE_ACK, tag=frame.tag, ts=now)
                self.net.send(ack)
        # HMI and ATTACKER sinks: acks and responses are consumed silently.

    def _poll(self) -> None:
        now = self.net.now
        for dst, tag in ((Node.PLC2, TagId.FLOW_LEVEL), (Node.PLC3, TagId.BOTTLE_LEVEL)):
            request = TagFrame(seq=self.next_seq(Node.PLC1), src=Node.PLC1, dst=dst, kind=FrameKind.READ_REQUEST, tag=tag, ts=now)
            self.net.send(request)
        self.process_node_inboxes()

    def _refresh_remote_sensors(self) -> None:
        self.plc2_flow = read_sensor(self.state, Sensor.PIPE_FLOW, self.cfg, self.rng)
        self.plc3_bottle = read_sensor(self.state, Sensor.BOTTLE_LEVEL, self.cfg, self.rng)

    # -- campaign -------------------------------------------------------------

    def _campaign_update(self, tick: int) -> None:
        for idx in list(self._active):
            window, _, end_tick = self._windows[idx]
            if tick >= end_tick:
                self._active.pop(idx).teardown(self.net)
        for idx, (window, start_tick, end_tick) in enumerate(self._windows):
            if idx not in self._active and start_tick <= tick < end_tick:
                scenario = scenario_by_id(window.scenario_id)
                mod_rng = np.random.default_rng([self.campaign.seed, idx])
                ranges = {
                    TagId.FLOW_LEVEL: self.cfg.sensor_range(Sensor.PIPE_FLOW),
                    TagId.BOTTLE_LEVEL: self.cfg.sensor_range(Sensor.BOTTLE_LEVEL),
                }
                self._active[idx] = install(scenario, self.net, window, mod_rng, ranges)

    def _teardown_all(self) -> None:
        for attack in self._active.values():
            attack.teardown(self.net)
        self._active.clear()

    def _label_for_tick(self, tick: int) -> ClassLabel:
        for window, start_tick, end_tick in self._windows:
            if start_tick <= tick < end_tick:
                return CATEGORY_LABEL[scenario_by_id(window.scenario_id).category]
        return ClassLabel.Normal

    # -- main loop ------------------------------------------------------------

    def iter_samples(self, duration: float | None = None, collect: SimResult | None = None) -> Iterator[LabeledSample]:
        """Drive the simulation, yielding one labeled sample per cadence instant."""
        if duration is None:
            if self.campaign is None:
                raise ValueError("duration required without a campaign")
            duration = self.campaign.total_duration
        n_ticks = int(round(duration / self.cfg.dt))
        dt = self.cfg.dt

        for tick in range(n_ticks + 1):
            self._tick = tick
            self.net.now = tick * dt
            self._campaign_update(tick)
            for attack in self._active.values():
                attack.on_tick(tick * dt, self)

            if tick % self.cadence_ticks == 0:
                self._poll()
                self.plc1.tank_meas = read_sensor(self.state, Sensor.TANK_LEVEL, self.cfg, self.rng)
                yield LabeledSample(
                    ts=_r6(tick * dt),
                    tank_level=_r6(self.plc1.tank_meas),
                    flow_level=_r6(self.plc1.flow_level),
                    bottle_level=_r6(self.plc1.bottle_level),
                    motor_state=int(self.plc1.actuator_open),
                    fl_age=_r6((tick - self.plc1.last_flow_tick) * dt),
                    bll_age=_r6((tick - self.plc1.last_bottle_tick) * dt),
                    label=self._label_for_tick(tick),
                )
                if tick < n_ticks:
                    cmd = control_decision(self.plc1.tank_meas, self.plc1.flow_level, self.plc1.bottle_level, self.cfg)
                    self.plc1.actuator_open = cmd.open

            if tick == n_ticks:
                break
            self.state = step(self.state, ValveCommand(open=self.plc1.actuator_open), self.cfg)
            self._refresh_remote_sensors()
            if collect is not None and self.collect_states:
                collect.states.append(self.state)

        self._teardown_all()

    def run(self, duration: float | None = None) -> SimResult:
        """Run to completion, collecting the dataset (and states/trace if enabled)."""
        result = SimResult(dataset=Dataset([]), states=[], trace=[], campaign=self.campaign)
        started = time.perf_counter()
        samples = list(self.iter_samples(duration, collect=result))
        result.wall_seconds = time.perf_counter() - started
        result.dataset = Dataset(samples)
        result.trace = self.net.trace
        return result


def generate_dataset(
    cfg: PlantConfig | None = None,
    campaign: Campaign | None = None,
    plant_seed: int = 0,
    campaign_seed: int = 0,
    collect_trace: bool = False,
) -> SimResult:
    """Produce the default labeled dataset: scheduled campaign plus sampling."""
    cfg = cfg or PlantConfig()
    if campaign is None:
        campaign = attacks.schedule_campaign(seed=campaign_seed)
    driver = SimulationDriver(cfg, campaign=campaign, seed=plant_seed, collect_trace=collect_trace)
    return driver.run()
