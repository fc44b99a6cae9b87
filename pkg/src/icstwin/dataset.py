"""Labeled process dataset: sampling schema, CSV export and the 70/30 split.

Every 0.5 s PLC1's view of the process (its held tag values plus per-tag
staleness ages) is snapshotted and labeled from the campaign timeline.
Classes keep their natural imbalance end to end; nothing resamples or
reweights.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path

import numpy as np

from icstwin.attacks import AttackCategory, Campaign, scenario_by_id

SCHEMA_VERSION = 1
CADENCE_S = 0.5

CSV_HEADER = ["ts", "tank_level", "flow_level", "bottle_level", "motor_state", "fl_age", "bll_age", "label"]


class ClassLabel(IntEnum):
    """Fixed index order used by every confusion matrix and probability vector."""

    Normal = 0
    CMM = 1
    CI = 2
    NMM = 3
    NDoS = 4


CATEGORY_LABEL = {
    AttackCategory.COMMAND_INJECTION: ClassLabel.CI,
    AttackCategory.NETWORK_DOS: ClassLabel.NDoS,
    AttackCategory.NAIVE_MODIFICATION: ClassLabel.NMM,
    AttackCategory.CALCULATED_MODIFICATION: ClassLabel.CMM,
}

LABEL_NAMES = [label.name for label in ClassLabel]


@dataclass(frozen=True)
class LabeledSample:
    """PLC1's view of the process at one sampling instant plus its true class."""

    ts: float
    tank_level: float
    flow_level: float
    bottle_level: float
    motor_state: int
    fl_age: float
    bll_age: float
    label: ClassLabel

    def __post_init__(self) -> None:
        if self.fl_age < 0 or self.bll_age < 0:
            raise ValueError("staleness ages must be >= 0")
        if self.motor_state not in (0, 1):
            raise ValueError("motor_state must be 0 or 1")


def label_at(campaign: Campaign, t: float) -> ClassLabel:
    """Ground-truth class at sim time t: windows are start-inclusive, end-exclusive."""
    for w in campaign.windows:
        if w.start <= t < w.end:
            return CATEGORY_LABEL[scenario_by_id(w.scenario_id).category]
    return ClassLabel.Normal


class Dataset:
    """Ordered cadence-spaced samples plus schema version."""

    def __init__(self, samples: list[LabeledSample], schema_version: int = SCHEMA_VERSION):
        for a, b in zip(samples, samples[1:]):
            if not b.ts > a.ts:
                raise ValueError("sample timestamps must be strictly increasing")
            if abs((b.ts - a.ts) - CADENCE_S) > 1e-6:
                raise ValueError("samples must be spaced by the 0.5 s cadence")
        self.samples = list(samples)
        self.schema_version = schema_version

    def __len__(self) -> int:
        return len(self.samples)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Dataset) and self.samples == other.samples and self.schema_version == other.schema_version

    def label_counts(self) -> dict[str, int]:
        counts = {name: 0 for name in LABEL_NAMES}
        for s in self.samples:
            counts[s.label.name] += 1
        return counts

    def feature_matrix(self, include_staleness: bool = True, include_motor: bool = True) -> tuple[np.ndarray, np.ndarray]:
        """(X, y) in the fixed schema order, excluding ts and label."""
        rows = []
        for s in self.samples:
            row = [s.tank_level, s.flow_level, s.bottle_level]
            if include_motor:
                row.append(float(s.motor_state))
            if include_staleness:
                row.extend([s.fl_age, s.bll_age])
            rows.append(row)
        X = np.asarray(rows, dtype=np.float64)
        y = np.asarray([int(s.label) for s in self.samples], dtype=np.int64)
        return X, y


def _format_row(sample: LabeledSample, include_staleness: bool, include_motor: bool) -> list[str]:
    row = [f"{sample.ts:.6f}", f"{sample.tank_level:.6f}", f"{sample.flow_level:.6f}", f"{sample.bottle_level:.6f}"]
    if include_motor:
        row.append(str(sample.motor_state))
    if include_staleness:
        row.extend([f"{sample.fl_age:.6f}", f"{sample.bll_age:.6f}"])
    row.append(sample.label.name)
    return row


def csv_header(include_staleness: bool = True, include_motor: bool = True) -> list[str]:
    header = ["ts", "tank_level", "flow_level", "bottle_level"]
    if include_motor:
        header.append("motor_state")
    if include_staleness:
        header.extend(["fl_age", "bll_age"])
    header.append("label")
    return header


def samples_to_csv_text(samples: list[LabeledSample], include_staleness: bool = True, include_motor: bool = True) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(csv_header(include_staleness, include_motor))
    for s in samples:
        writer.writerow(_format_row(s, include_staleness, include_motor))
    return buf.getvalue()


def dataset_to_csv_text(dataset: Dataset, include_staleness: bool = True, include_motor: bool = True) -> str:
    return samples_to_csv_text(dataset.samples, include_staleness, include_motor)


def export_samples_csv(samples: list[LabeledSample], path: str | Path, include_staleness: bool = True, include_motor: bool = True) -> None:
    """Write any sample list (e.g. a split half) as UTF-8 CSV, LF endings."""
    path = Path(path)
    try:
        path.write_text(samples_to_csv_text(samples, include_staleness, include_motor), encoding="utf-8", newline="")
    except OSError as exc:
        raise OSError(f"failed to write dataset to {path}: {exc}") from exc


def export_csv(dataset: Dataset, path: str | Path, include_staleness: bool = True, include_motor: bool = True) -> None:
    """Write the dataset as UTF-8 CSV with LF endings and 6-decimal floats."""
    export_samples_csv(dataset.samples, path, include_staleness, include_motor)


def import_samples_csv(path: str | Path) -> list[LabeledSample]:
    """Read samples from a full-schema CSV; no cadence requirement (split halves)."""
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header in {path}: {header}")
        return [
            LabeledSample(
                ts=float(row[0]),
                tank_level=float(row[1]),
                flow_level=float(row[2]),
                bottle_level=float(row[3]),
                motor_state=int(row[4]),
                fl_age=float(row[5]),
                bll_age=float(row[6]),
                label=ClassLabel[row[7]],
            )
            for row in reader
        ]


def import_csv(path: str | Path) -> Dataset:
    """Read a cadence-complete dataset written by :func:`export_csv`."""
    return Dataset(import_samples_csv(path))


def write_metadata(dataset: Dataset, path: str | Path, seeds: dict[str, int], config_payload: dict) -> dict:
    """Write the sidecar JSON: seeds, config hash, dataset hash and label counts."""
    csv_text = dataset_to_csv_text(dataset)
    meta = {
        "schema_version": dataset.schema_version,
        "cadence_s": CADENCE_S,
        "seeds": seeds,
        "config_sha256": hashlib.sha256(json.dumps(config_payload, sort_keys=True).encode()).hexdigest(),
        "dataset_sha256": hashlib.sha256(csv_text.encode()).hexdigest(),
        "counts": dataset.label_counts(),
    }
    Path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return meta


class SplitError(ValueError):
    pass


def split(dataset: Dataset, train_frac: float = 0.70, seed: int = 0) -> tuple[list[LabeledSample], list[LabeledSample]]:
    """Stratified train/test split: seeded shuffle within each class.

    Per class the train share is round(train_frac * n); union is the whole
    dataset and the intersection empty, so class counts are preserved.
    """
    if not (0.0 < train_frac < 1.0):
        raise SplitError("train_frac must be in (0, 1)")
    by_class: dict[ClassLabel, list[int]] = {}
    for i, s in enumerate(dataset.samples):
        by_class.setdefault(s.label, []).append(i)

    rng = np.random.default_rng(seed)
    train_idx: list[int] = []
    test_idx: list[int] = []
    for label in sorted(by_class, key=int):
        idx = np.asarray(by_class[label])
        if len(idx) < 2:
            raise SplitError(f"class {label.name} has {len(idx)} sample(s); cannot stratify")
        perm = rng.permutation(len(idx))
        n_train = int(round(train_frac * len(idx)))
        n_train = min(max(n_train, 1), len(idx) - 1)
        train_idx.extend(idx[perm[:n_train]].tolist())
        test_idx.extend(idx[perm[n_train:]].tolist())

    train_idx.sort()
    test_idx.sort()
    train = [dataset.samples[i] for i in train_idx]
    test = [dataset.samples[i] for i in test_idx]
    return train, test


def features_from_samples(samples: list[LabeledSample], include_staleness: bool = True, include_motor: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """(X, y) for an arbitrary sample list (no cadence requirement)."""
    rows = []
    for s in samples:
        row = [s.tank_level, s.flow_level, s.bottle_level]
        if include_motor:
            row.append(float(s.motor_state))
        if include_staleness:
            row.extend([s.fl_age, s.bll_age])
        rows.append(row)
    X = np.asarray(rows, dtype=np.float64).reshape(len(samples), -1)
    y = np.asarray([int(s.label) for s in samples], dtype=np.int64)
    return X, y
