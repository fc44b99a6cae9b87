"""Run configuration: one JSON file, validated strictly, CLI-flag overrides.

Sections: plant (physics constants), campaign (durations/gap/seed or an
external timeline file), dataset (feature toggles and split), ml (model
kinds, stacking and seeds), output. Unknown keys anywhere are rejected
with their full path so typos cannot silently fall back to defaults.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from icstwin.attacks import DEFAULT_DURATIONS, DEFAULT_RECOVERY_GAP, AttackCategory
from icstwin.ml.base import KINDS
from icstwin.plant import PlantConfig


class ConfigError(ValueError):
    pass


@dataclass
class CampaignSection:
    seed: int = 0
    recovery_gap: float = DEFAULT_RECOVERY_GAP
    durations: dict[str, float] = field(
        default_factory=lambda: {cat.value: dur for cat, dur in DEFAULT_DURATIONS.items()}
    )
    file: str | None = None


@dataclass
class DatasetSection:
    seed: int = 0
    train_frac: float = 0.70
    split_seed: int = 0
    include_staleness: bool = True
    include_motor: bool = True


@dataclass
class MlSection:
    seed: int = 0
    kinds: list[str] = field(default_factory=lambda: list(KINDS))
    include_stacked: bool = True
    folds: int = 5


@dataclass
class RunConfig:
    plant: PlantConfig = field(default_factory=PlantConfig)
    campaign: CampaignSection = field(default_factory=CampaignSection)
    dataset: DatasetSection = field(default_factory=DatasetSection)
    ml: MlSection = field(default_factory=MlSection)
    out_dir: str = "out"
    duration: float = 120.0  # attack-free simulate default, seconds

    def to_payload(self) -> dict:
        return {
            "plant": asdict(self.plant),
            "campaign": asdict(self.campaign),
            "dataset": asdict(self.dataset),
            "ml": asdict(self.ml),
            "out_dir": self.out_dir,
            "duration": self.duration,
        }

    def durations_by_category(self) -> dict[AttackCategory, float]:
        return {AttackCategory(name): value for name, value in self.campaign.durations.items()}


def _apply_section(instance, payload: dict, path: str):
    valid = {f for f in instance.__dataclass_fields__}
    for key, value in payload.items():
        if key not in valid:
            raise ConfigError(f"{path}.{key}: unknown key")
        setattr(instance, key, value)
    return instance


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> RunConfig:
    """Build a RunConfig from defaults, then a JSON file, then CLI overrides."""
    payload: dict = {}
    if path is not None:
        try:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None

    cfg = RunConfig()
    known = {"plant", "campaign", "dataset", "ml", "out_dir", "duration"}
    for key in payload:
        if key not in known:
            raise ConfigError(f"{key}: unknown key")

    if "plant" in payload:
        plant_fields = {f for f in PlantConfig.__dataclass_fields__}
        unknown = set(payload["plant"]) - plant_fields
        if unknown:
            raise ConfigError(f"plant.{sorted(unknown)[0]}: unknown key")
        try:
            cfg.plant = PlantConfig(**payload["plant"])
        except ValueError as exc:
            raise ConfigError(f"plant: {exc}") from None
    if "campaign" in payload:
        _apply_section(cfg.campaign, payload["campaign"], "campaign")
    if "dataset" in payload:
        _apply_section(cfg.dataset, payload["dataset"], "dataset")
    if "ml" in payload:
        _apply_section(cfg.ml, payload["ml"], "ml")
    cfg.out_dir = payload.get("out_dir", cfg.out_dir)
    cfg.duration = payload.get("duration", cfg.duration)

    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key == "seed":
            # one global seed fans out to every RNG consumer
            cfg.plant = PlantConfig(**{**asdict(cfg.plant), "rng_seed": value})
            cfg.campaign.seed = value + 1000
            cfg.dataset.split_seed = value + 2000
            cfg.ml.seed = value + 3000
        elif key == "out":
            cfg.out_dir = value
        elif key == "duration":
            cfg.duration = value
        elif key == "no_staleness":
            cfg.dataset.include_staleness = not value
        elif key == "campaign_file":
            cfg.campaign.file = value
        elif key == "plant":
            cfg.plant = _override_plant(cfg.plant, value)
        else:  # pragma: no cover - CLI wiring error
            raise ConfigError(f"unknown override: {key}")

    _validate(cfg)
    return cfg


def _override_plant(plant: PlantConfig, assignments: list[str]) -> PlantConfig:
    """Apply KEY=VALUE plant-constant overrides from the command line."""
    payload = asdict(plant)
    for item in assignments:
        key, sep, raw = item.partition("=")
        if not sep:
            raise ConfigError(f"plant override {item!r}: expected KEY=VALUE")
        if key not in payload:
            raise ConfigError(f"plant.{key}: unknown key")
        payload[key] = int(raw) if key == "rng_seed" else float(raw)
    try:
        return PlantConfig(**payload)
    except ValueError as exc:
        raise ConfigError(f"plant: {exc}") from None


def _validate(cfg: RunConfig) -> None:
    if not (0.0 < cfg.dataset.train_frac < 1.0):
        raise ConfigError("dataset.train_frac: must be in (0, 1)")
    if cfg.ml.folds < 2:
        raise ConfigError("ml.folds: must be >= 2")
    for kind in cfg.ml.kinds:
        if kind not in KINDS:
            raise ConfigError(f"ml.kinds: unknown classifier kind {kind!r}")
    for name in cfg.campaign.durations:
        try:
            AttackCategory(name)
        except ValueError:
            raise ConfigError(f"campaign.durations.{name}: unknown attack category") from None
        if cfg.campaign.durations[name] <= 0:
            raise ConfigError(f"campaign.durations.{name}: must be > 0")
    if cfg.campaign.recovery_gap < 0:
        raise ConfigError("campaign.recovery_gap: must be >= 0")
    if cfg.duration <= 0:
        raise ConfigError("duration: must be > 0")
