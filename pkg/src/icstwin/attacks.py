"""Catalog of the 23 process-aware attack scenarios and the campaign scheduler.

Four families: command injection (forged actuator writes), network DoS
(selective packet drops and a flood that saturates PLC1), naive measurement
modification (replace a sensor value with a constant or a uniform random
draw) and calculated measurement modification (scale the value by (1 +- f)
with f in (0, 1], small enough to stay stealthy).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import TYPE_CHECKING, Iterable

import numpy as np

from icstwin.network import Drop, Pass, VirtualNetwork
from icstwin.protocol import FrameKind, Node, TagFrame, TagId

if TYPE_CHECKING:  # pragma: no cover
    from icstwin.simulation import SimulationDriver


class AttackCategory(Enum):
    COMMAND_INJECTION = "CI"
    NETWORK_DOS = "NDoS"
    NAIVE_MODIFICATION = "NMM"
    CALCULATED_MODIFICATION = "CMM"


class Target(Enum):
    """Attackable process points: FL on PLC2, BLL on PLC3, MS on PLC1."""

    FL = "FL"
    BLL = "BLL"
    MS = "MS"


TARGET_TAG = {Target.FL: TagId.FLOW_LEVEL, Target.BLL: TagId.BOTTLE_LEVEL, Target.MS: TagId.MOTOR_STATE}
TARGET_SOURCE = {Target.FL: Node.PLC2, Target.BLL: Node.PLC3}


class Mode(Enum):
    TOGGLE_ACTUATOR = "ToggleActuator"
    DROP_PACKETS = "DropPackets"
    SYN_FLOOD = "SynFlood"
    SET_CONSTANT = "SetConstant"
    SET_UNIFORM_RANDOM = "SetUniformRandom"
    SCALE_UP_FIXED = "ScaleUpFixed"
    SCALE_DOWN_FIXED = "ScaleDownFixed"
    SCALE_UP_RANDOM = "ScaleUpRandom"
    SCALE_DOWN_RANDOM = "ScaleDownRandom"


MODIFICATION_MODES = frozenset(
    {Mode.SET_CONSTANT, Mode.SET_UNIFORM_RANDOM, Mode.SCALE_UP_FIXED, Mode.SCALE_DOWN_FIXED, Mode.SCALE_UP_RANDOM, Mode.SCALE_DOWN_RANDOM}
)


class WrongCategory(ValueError):
    pass


class UnknownScenario(KeyError):
    pass


@dataclass(frozen=True)
class AttackScenario:
    """One parameterized attack from the catalog (ids 1..23)."""

    id: int
    category: AttackCategory
    targets: frozenset[Target]
    mode: Mode
    params: dict = field(default_factory=dict, hash=False)

    def __post_init__(self) -> None:
        if not self.targets:
            raise ValueError("target set must be non-empty")
        if Target.MS in self.targets and self.category is not AttackCategory.COMMAND_INJECTION:
            raise ValueError("MS is only a command-injection target")

    @property
    def target_label(self) -> str:
        order = [Target.FL, Target.BLL, Target.MS]
        return "+".join(t.value for t in order if t in self.targets)


DEFAULT_TOGGLE_PERIOD = 0.5
DEFAULT_FIXED_FACTOR = 0.2
DEFAULT_MAX_FACTOR = 0.3


def catalog() -> list[AttackScenario]:
    """The full id-ordered scenario catalog: 1 CI, 4 NDoS, 6 NMM, 12 CMM."""
    scenarios: list[AttackScenario] = []
    next_id = 1

    def add(category: AttackCategory, targets: Iterable[Target], mode: Mode, params: dict) -> None:
        nonlocal next_id
        scenarios.append(AttackScenario(id=next_id, category=category, targets=frozenset(targets), mode=mode, params=params))
        next_id += 1

    add(AttackCategory.COMMAND_INJECTION, [Target.MS], Mode.TOGGLE_ACTUATOR, {"toggle_period": DEFAULT_TOGGLE_PERIOD})

    for targets in ([Target.FL], [Target.BLL], [Target.FL, Target.BLL]):
        add(AttackCategory.NETWORK_DOS, targets, Mode.DROP_PACKETS, {})
    add(AttackCategory.NETWORK_DOS, [Target.FL, Target.BLL], Mode.SYN_FLOOD, {})

    for mode in (Mode.SET_CONSTANT, Mode.SET_UNIFORM_RANDOM):
        for targets in ([Target.FL], [Target.BLL], [Target.FL, Target.BLL]):
            params = {} if mode is Mode.SET_UNIFORM_RANDOM else {"constant_value": None}
            add(AttackCategory.NAIVE_MODIFICATION, targets, mode, params)

    for mode in (Mode.SCALE_UP_FIXED, Mode.SCALE_DOWN_FIXED, Mode.SCALE_UP_RANDOM, Mode.SCALE_DOWN_RANDOM):
        fixed = mode in (Mode.SCALE_UP_FIXED, Mode.SCALE_DOWN_FIXED)
        params = {"scaling_factor": DEFAULT_FIXED_FACTOR} if fixed else {"max_factor": DEFAULT_MAX_FACTOR}
        for targets in ([Target.FL], [Target.BLL], [Target.FL, Target.BLL]):
            add(AttackCategory.CALCULATED_MODIFICATION, targets, mode, dict(params))

    assert len(scenarios) == 23
    return scenarios


def scenario_by_id(scenario_id: int) -> AttackScenario:
    for s in catalog():
        if s.id == scenario_id:
            return s
    raise UnknownScenario(scenario_id)


def apply_modification(
    true_value: float,
    scenario: AttackScenario,
    rng: np.random.Generator,
    value_range: tuple[float, float] = (0.0, 10.0),
) -> float:
    """Compute the falsified measurement for an NMM/CMM scenario.

    Scaling modes return (1 +- f) * value; random scaling draws f fresh from
    (0, max_factor] per call. The result is clamped to the sensor's
    representable range.
    """
    if scenario.category not in (AttackCategory.NAIVE_MODIFICATION, AttackCategory.CALCULATED_MODIFICATION):
        raise WrongCategory(f"scenario {scenario.id} ({scenario.category.value}) does not modify measurements")

    lo, hi = value_range
    mode = scenario.mode
    if mode is Mode.SET_CONSTANT:
        constant = scenario.params.get("constant_value")
        out = 0.5 * (lo + hi) if constant is None else constant
    elif mode is Mode.SET_UNIFORM_RANDOM:
        out = rng.uniform(lo, hi)
    else:
        if mode in (Mode.SCALE_UP_FIXED, Mode.SCALE_DOWN_FIXED):
            f = scenario.params["scaling_factor"]
        else:
            # 1 - U[0, 1) lands in (0, max_factor]
            f = scenario.params["max_factor"] * (1.0 - rng.random())
        sign = 1.0 if mode in (Mode.SCALE_UP_FIXED, Mode.SCALE_UP_RANDOM) else -1.0
        out = (1.0 + sign * f) * true_value
    return float(min(max(out, lo), hi))


def forge_write(tag: TagId, value: float, victim: Node, seq: int = 0, ts: float = 0.0) -> TagFrame:
    """Build a WriteRequest with the source spoofed as the HMI.

    The victim accepts it like any operator command because the protocol
    carries no authentication.
    """
    return TagFrame(seq=seq, src=Node.HMI, dst=victim, kind=FrameKind.WRITE_REQUEST, tag=tag, value=value, ts=ts)


# --- campaign ----------------------------------------------------------------

DEFAULT_DURATIONS = {
    AttackCategory.COMMAND_INJECTION: 18.0,
    AttackCategory.NETWORK_DOS: 11.0,
    AttackCategory.NAIVE_MODIFICATION: 19.0,
    AttackCategory.CALCULATED_MODIFICATION: 18.0,
}
DEFAULT_RECOVERY_GAP = 40.0


@dataclass(frozen=True)
class AttackWindow:
    scenario_id: int
    start: float
    end: float

    def __post_init__(self) -> None:
        if not self.end > self.start:
            raise ValueError("window end must be after start")


@dataclass(frozen=True)
class Campaign:
    """Seeded timeline of attack windows separated by recovery gaps."""

    windows: tuple[AttackWindow, ...]
    recovery_gap: float
    seed: int

    def __post_init__(self) -> None:
        prev_end = None
        for w in self.windows:
            if prev_end is not None and w.start - prev_end < self.recovery_gap - 1e-9:
                raise ValueError("windows not separated by the recovery gap")
            prev_end = w.end

    @property
    def total_duration(self) -> float:
        if not self.windows:
            return self.recovery_gap
        return self.windows[-1].end + self.recovery_gap

    def to_json(self) -> str:
        payload = {
            "seed": self.seed,
            "recovery_gap": self.recovery_gap,
            "windows": [{"id": w.scenario_id, "start": w.start, "end": w.end} for w in self.windows],
        }
        return json.dumps(payload, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "Campaign":
        payload = json.loads(text)
        windows = tuple(AttackWindow(scenario_id=w["id"], start=w["start"], end=w["end"]) for w in payload["windows"])
        return cls(windows=windows, recovery_gap=payload["recovery_gap"], seed=payload["seed"])

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "Campaign":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def schedule_campaign(
    scenarios: list[AttackScenario] | None = None,
    durations: dict[AttackCategory, float] | None = None,
    recovery_gap: float = DEFAULT_RECOVERY_GAP,
    seed: int = 0,
) -> Campaign:
    """Schedule every scenario once, in seeded-shuffled order.

    A leading attack-free warmup of one recovery gap precedes the first
    window and one trailing gap follows the last, so the Normal class gets
    (n_windows + 1) * recovery_gap seconds in total.
    """
    scenarios = catalog() if scenarios is None else scenarios
    durations = dict(DEFAULT_DURATIONS if durations is None else durations)
    for category, duration in durations.items():
        if duration <= 0:
            raise ValueError(f"duration for {category.value} must be > 0")
    if recovery_gap < 0:
        raise ValueError("recovery_gap must be >= 0")

    rng = np.random.default_rng(seed)
    order = list(scenarios)
    rng.shuffle(order)

    windows = []
    start = recovery_gap
    for scenario in order:
        end = start + durations[scenario.category]
        windows.append(AttackWindow(scenario_id=scenario.id, start=start, end=end))
        start = end + recovery_gap
    return Campaign(windows=tuple(windows), recovery_gap=recovery_gap, seed=seed)


# --- attack installation -----------------------------------------------------


class ActiveAttack:
    """Handle for an installed attack; tears everything down at window end."""

    def __init__(self, scenario: AttackScenario, window: AttackWindow) -> None:
        self.scenario = scenario
        self.window = window
        self._cleanups: list = []

    def on_tick(self, t: float, driver: "SimulationDriver") -> None:
        """Hook for time-driven attacks (command injection)."""

    def teardown(self, net: VirtualNetwork) -> None:
        for fn in self._cleanups:
            fn()
        self._cleanups.clear()


class _ToggleAttack(ActiveAttack):
    """Forge an HMI MOTOR_STATE write toggling the actuator every period.

    Writes are offset 0.1 s into each period so the forged state, not the
    victim's own control scan, holds the actuator for most of each cycle.
    """

    FIRST_OFFSET = 0.1

    def __init__(self, scenario: AttackScenario, window: AttackWindow) -> None:
        super().__init__(scenario, window)
        self.period = scenario.params.get("toggle_period", DEFAULT_TOGGLE_PERIOD)
        self.next_fire = window.start + self.FIRST_OFFSET
        self.writes_sent = 0

    def on_tick(self, t: float, driver: "SimulationDriver") -> None:
        while self.next_fire <= t + 1e-9 and self.next_fire < self.window.end:
            current = driver.plc1.actuator_open
            frame = forge_write(
                TagId.MOTOR_STATE,
                0.0 if current else 1.0,
                Node.PLC1,
                seq=driver.next_seq(Node.ATTACKER),
                ts=t,
            )
            driver.net.send(frame)
            driver.process_node_inboxes()
            self.writes_sent += 1
            self.next_fire += self.period


def install(scenario: AttackScenario, net: VirtualNetwork, window: AttackWindow, rng: np.random.Generator, value_ranges: dict[TagId, tuple[float, float]] | None = None) -> ActiveAttack:
    """Wire a scenario into the network for one window and return its handle.

    Drop/alter interceptors go on the PLC2->PLC1 and/or PLC3->PLC1 links per
    target; the flood saturates PLC1 until the window ends; command
    injection returns a timer-driven handle.
    """
    ranges = value_ranges or {TagId.FLOW_LEVEL: (0.0, 5.0), TagId.BOTTLE_LEVEL: (0.0, 10.0)}
    attack = ActiveAttack(scenario, window)

    if scenario.mode is Mode.TOGGLE_ACTUATOR:
        return _ToggleAttack(scenario, window)

    if scenario.mode is Mode.SYN_FLOOD:
        net.saturate(Node.PLC1, window.end)
        attack._cleanups.append(lambda: net.clear_saturation(Node.PLC1))
        return attack

    if scenario.mode is Mode.DROP_PACKETS:
        for target in sorted(scenario.targets, key=lambda t: t.value):
            tag = TARGET_TAG[target]

            def drop_hook(frame: TagFrame, _tag=tag):
                if frame.kind is FrameKind.READ_RESPONSE and frame.tag is _tag:
                    return Drop()
                return Pass(frame)

            handle = net.register_interceptor(TARGET_SOURCE[target], Node.PLC1, drop_hook)
            attack._cleanups.append(handle.remove)
        return attack

    if scenario.mode in MODIFICATION_MODES:
        for target in sorted(scenario.targets, key=lambda t: t.value):
            tag = TARGET_TAG[target]

            def alter_hook(frame: TagFrame, _tag=tag):
                if frame.kind is FrameKind.READ_RESPONSE and frame.tag is _tag:
                    forged = apply_modification(frame.value, scenario, rng, ranges[_tag])
                    return Pass(replace(frame, value=forged))
                return Pass(frame)

            handle = net.register_interceptor(TARGET_SOURCE[target], Node.PLC1, alter_hook)
            attack._cleanups.append(handle.remove)
        return attack

    raise UnknownScenario(scenario.id)  # pragma: no cover
