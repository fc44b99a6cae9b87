"""Evaluation pipeline: feature wiring, suite training, metrics rows."""

import numpy as np

from icstwin.dataset import ClassLabel, LabeledSample
from icstwin.evaluation import STACKED_NAME, feature_layout, kind_hyperparams, train_eval_suite


def synthetic_samples(n_per=30, seed=0):
    """Crudely separable five-class sample set in the real schema."""
    rng = np.random.default_rng(seed)
    samples = []
    ts = 0.0
    for label in ClassLabel:
        for _ in range(n_per):
            base = dict(tank_level=2.5, flow_level=0.8, bottle_level=float(rng.uniform(0, 9)), motor_state=1, fl_age=0.0, bll_age=0.0)
            if label is ClassLabel.CMM:
                base["flow_level"] = 1.6
            elif label is ClassLabel.CI:
                base["motor_state"] = 0
                base["flow_level"] = 0.0
            elif label is ClassLabel.NMM:
                base["flow_level"] = 4.0
            elif label is ClassLabel.NDoS:
                base["fl_age"] = float(rng.integers(1, 10)) * 0.5
            samples.append(LabeledSample(ts=ts, label=label, **base))
            ts += 0.5
    rng.shuffle(samples)
    return [LabeledSample(**{**s.__dict__, "ts": 0.5 * i}) for i, s in enumerate(samples)]


class TestFeatureWiring:
    def test_layout_orders(self):
        assert feature_layout() == ["tank_level", "flow_level", "bottle_level", "motor_state", "fl_age", "bll_age"]
        assert feature_layout(include_staleness=False) == ["tank_level", "flow_level", "bottle_level", "motor_state"]
        assert feature_layout(include_motor=False) == ["tank_level", "flow_level", "bottle_level", "fl_age", "bll_age"]

    def test_indicator_columns_point_at_ages(self):
        hp = kind_hyperparams("KNN")
        assert hp["indicator_columns"] == [4, 5]
        hp_no_motor = kind_hyperparams("DT", include_motor=False)
        assert hp_no_motor["indicator_columns"] == [3, 4]
        assert kind_hyperparams("GB", include_staleness=False) == {}


class TestSuite:
    def test_suite_trains_and_reports(self):
        samples = synthetic_samples()
        train_half = samples[: len(samples) // 2]
        test_half = samples[len(samples) // 2 :]
        suite = train_eval_suite(train_half, test_half, kinds=("DT", "NB"), include_stacked=True, seed=0, folds=2)
        assert set(suite) == {"DT", "NB", STACKED_NAME}
        for name, ev in suite.items():
            row = ev.metrics_row()
            assert row["model"] == name
            assert 0.0 <= row["accuracy"] <= 1.0
            assert set(row["per_class"]) == {"Normal", "CMM", "CI", "NMM", "NDoS"}

    def test_suite_without_stacked(self):
        samples = synthetic_samples(n_per=20)
        half = len(samples) // 2
        suite = train_eval_suite(samples[:half], samples[half:], kinds=("DT",), include_stacked=False, seed=0)
        assert set(suite) == {"DT"}
