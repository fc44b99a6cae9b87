"""Online classification runtime: ordering, latency accounting, summaries."""

import json

import numpy as np

from icstwin.dataset import ClassLabel, LabeledSample
from icstwin.runtime import run_online, summarize, write_events_jsonl


class ConstantModel:
    """Predicts a fixed class; stands in for a trained bundle."""

    def __init__(self, label=0, n_classes=5):
        self.label = label
        self.n_classes = n_classes

    def predict_proba(self, x):
        p = np.full(self.n_classes, 0.0)
        p[self.label] = 1.0
        return p


def make_samples(n=20):
    return [
        LabeledSample(ts=0.5 * i, tank_level=2.5, flow_level=0.8, bottle_level=1.0, motor_state=1, fl_age=0.0, bll_age=0.0, label=ClassLabel.Normal)
        for i in range(n)
    ]


class TestRunOnline:
    def test_event_order_matches_sample_order_inline(self):
        events = run_online(ConstantModel(), make_samples(30))
        assert [e.ts for e in events] == [0.5 * i for i in range(30)]

    def test_event_order_matches_sample_order_threaded(self):
        events = run_online(ConstantModel(), make_samples(50), threaded=True)
        assert [e.ts for e in events] == [0.5 * i for i in range(50)]

    def test_no_samples_dropped_with_slow_consumer(self):
        class SlowModel(ConstantModel):
            def predict_proba(self, x):
                import time

                time.sleep(0.001)
                return super().predict_proba(x)

        events = run_online(SlowModel(), make_samples(40), threaded=True)
        assert len(events) == 40

    def test_latency_non_negative_and_recorded(self):
        events = run_online(ConstantModel(), make_samples(10))
        assert all(e.latency_s >= 0.0 for e in events)
        assert all(e.pred_ts > 0.0 for e in events)

    def test_sink_receives_every_event(self):
        seen = []
        run_online(ConstantModel(), make_samples(12), sink=seen.append)
        assert len(seen) == 12

    def test_proba_recorded_sums_to_one(self):
        events = run_online(ConstantModel(label=3), make_samples(5))
        for e in events:
            assert abs(sum(e.proba) - 1.0) < 1e-9
            assert e.label is ClassLabel.NMM


class TestSummary:
    def test_histogram_and_latency_stats(self):
        events = run_online(ConstantModel(label=4), make_samples(8))
        summary = summarize(events)
        assert summary.count == 8
        assert summary.histogram["NDoS"] == 8
        assert summary.histogram["Normal"] == 0
        assert summary.max_latency_s >= summary.mean_latency_s > 0.0

    def test_empty_stream_summary(self):
        summary = summarize([])
        assert summary.count == 0
        assert summary.mean_latency_s == 0.0

    def test_events_jsonl_schema(self, tmp_path):
        events = run_online(ConstantModel(), make_samples(3))
        path = tmp_path / "events.jsonl"
        write_events_jsonl(events, path)
        lines = path.read_text().splitlines()
        assert len(lines) == 3
        record = json.loads(lines[0])
        assert set(record) == {"ts", "pred_ts", "label", "proba", "latency_s"}
        assert len(record["proba"]) == 5


class TestOnlineOfflineEquivalence:
    def test_replay_reproduces_batch_predictions(self):
        from icstwin.dataset import features_from_samples
        from icstwin.ml import train

        rng = np.random.default_rng(0)
        samples = []
        for i in range(120):
            label = ClassLabel(int(rng.integers(0, 5)))
            samples.append(
                LabeledSample(
                    ts=0.5 * i,
                    tank_level=float(rng.uniform(0, 10)),
                    flow_level=float(rng.uniform(0, 2)),
                    bottle_level=float(rng.uniform(0, 9)),
                    motor_state=int(rng.integers(0, 2)),
                    fl_age=float(rng.integers(0, 4)) * 0.5,
                    bll_age=float(rng.integers(0, 4)) * 0.5,
                    label=label,
                )
            )
        X, y = features_from_samples(samples)
        model = train("DT", X, y, seed=0)
        batch_pred = np.asarray(model.predict(X))
        events = run_online(model, samples)
        stream_pred = np.asarray([int(e.label) for e in events])
        assert (batch_pred == stream_pred).all()
