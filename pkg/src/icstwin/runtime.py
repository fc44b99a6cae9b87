"""Online classification runtime: stream samples through a trained model.

Each incoming sample is classified and emitted as an event carrying the
wall-clock latency from ingest to prediction. The runtime can run inline
(deterministic, used by tests and replay) or with a producer thread
feeding a bounded-growth queue (live mode); samples are never dropped and
events always leave in sample order.
"""

from __future__ import annotations

import json
import queue
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Iterator

import numpy as np

from icstwin.dataset import LABEL_NAMES, ClassLabel, LabeledSample, features_from_samples


@dataclass(frozen=True)
class ClassifiedEvent:
    """One classified sample: sim timestamp, verdict, and measured latency."""

    ts: float
    pred_ts: float
    label: ClassLabel
    proba: tuple[float, ...]
    latency_s: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "ts": self.ts,
                "pred_ts": self.pred_ts,
                "label": self.label.name,
                "proba": [round(p, 6) for p in self.proba],
                "latency_s": self.latency_s,
            }
        )


@dataclass
class StreamSummary:
    count: int
    mean_latency_s: float
    max_latency_s: float
    histogram: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "mean_latency_s": self.mean_latency_s,
            "max_latency_s": self.max_latency_s,
            "histogram": self.histogram,
        }


def summarize(events: list[ClassifiedEvent]) -> StreamSummary:
    histogram = {name: 0 for name in LABEL_NAMES}
    for event in events:
        histogram[event.label.name] += 1
    latencies = [e.latency_s for e in events]
    return StreamSummary(
        count=len(events),
        mean_latency_s=float(np.mean(latencies)) if latencies else 0.0,
        max_latency_s=float(max(latencies)) if latencies else 0.0,
        histogram=histogram,
    )


def _classify(model, sample: LabeledSample, include_staleness: bool, include_motor: bool, ingest_wall: float) -> ClassifiedEvent:
    X, _ = features_from_samples([sample], include_staleness, include_motor)
    proba = np.asarray(model.predict_proba(X[0]), dtype=np.float64)
    pred_wall = time.perf_counter()
    return ClassifiedEvent(
        ts=sample.ts,
        pred_ts=pred_wall,
        label=ClassLabel(int(np.argmax(proba))),
        proba=tuple(float(p) for p in proba),
        latency_s=pred_wall - ingest_wall,
    )


def run_online(
    model,
    source: Iterable[LabeledSample],
    sink: Callable[[ClassifiedEvent], None] | None = None,
    threaded: bool = False,
    include_staleness: bool = True,
    include_motor: bool = True,
) -> list[ClassifiedEvent]:
    """Classify every sample from the source, in order, never dropping any.

    Inline mode classifies each sample as it is pulled; threaded mode runs
    the source in a producer thread while this thread consumes the queue,
    so a bursty source backs up in the queue instead of stalling.
    """
    events: list[ClassifiedEvent] = []

    def emit(event: ClassifiedEvent) -> None:
        events.append(event)
        if sink is not None:
            sink(event)

    if not threaded:
        for sample in source:
            emit(_classify(model, sample, include_staleness, include_motor, time.perf_counter()))
        return events

    q: "queue.Queue[tuple[LabeledSample, float] | None]" = queue.Queue()

    def produce() -> None:
        try:
            for sample in source:
                q.put((sample, time.perf_counter()))
        finally:
            q.put(None)

    producer = threading.Thread(target=produce, daemon=True)
    producer.start()
    while True:
        item = q.get()
        if item is None:
            break
        sample, ingest_wall = item
        emit(_classify(model, sample, include_staleness, include_motor, ingest_wall))
    producer.join()
    return events


def write_events_jsonl(events: list[ClassifiedEvent], path: str | Path) -> None:
    Path(path).write_text("".join(e.to_json() + "\n" for e in events), encoding="utf-8")


def iter_paced(samples: Iterable[LabeledSample], cadence_s: float = 0.5, pace: float = 0.0) -> Iterator[LabeledSample]:
    """Yield samples, sleeping cadence/pace between them (pace 0 = flat out)."""
    for sample in samples:
        if pace > 0:
            time.sleep(cadence_s / pace)
        yield sample
