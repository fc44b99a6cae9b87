"""Report emission: figures render to SVG, delimited outputs carry the data."""

import numpy as np
import pytest

from icstwin.ml.metrics import ConfusionMatrix
from icstwin.plant import PlantConfig, ProcessState
from icstwin.report import (
    confusion_csv_text,
    metrics_table_text,
    save_confusion_csv,
    save_confusion_svg,
    save_frame_trace_jsonl,
    save_label_pie_svg,
    save_state_trace_csv,
)


def sample_cm() -> ConfusionMatrix:
    counts = np.diag([40, 10, 5, 8, 6])
    counts[1, 0] = 4
    return ConfusionMatrix(counts)


class TestConfusionOutputs:
    def test_csv_rows_are_normalized(self, tmp_path):
        path = tmp_path / "cm.csv"
        save_confusion_csv(sample_cm(), path)
        lines = path.read_text().splitlines()
        assert lines[0] == "true\\pred,Normal,CMM,CI,NMM,NDoS"
        cmm_row = [float(v) for v in lines[2].split(",")[1:]]
        assert abs(sum(cmm_row) - 1.0) < 1e-5  # 6-decimal cells
        assert cmm_row[0] == pytest.approx(4 / 14, abs=1e-6)

    def test_csv_text_deterministic(self):
        assert confusion_csv_text(sample_cm()) == confusion_csv_text(sample_cm())

    def test_svg_heatmap_renders(self, tmp_path):
        path = tmp_path / "cm.svg"
        save_confusion_svg(sample_cm(), path, title="GB (row-normalized)")
        text = path.read_text()
        assert text.lstrip().startswith("<?xml")
        assert "svg" in text


class TestOtherOutputs:
    def test_metrics_table_text(self):
        rows = [
            {"model": "GB", "accuracy": 0.92, "macro_precision": 0.9, "macro_recall": 0.85, "macro_f1": 0.87},
            {"model": "stacked", "accuracy": 0.93, "macro_precision": 0.91, "macro_recall": 0.86, "macro_f1": 0.88},
        ]
        text = metrics_table_text(rows)
        assert "GB" in text and "stacked" in text
        assert "0.880" in text

    def test_pie_svg_renders(self, tmp_path):
        path = tmp_path / "pie.svg"
        save_label_pie_svg({"Normal": 70, "CMM": 10, "CI": 0, "NMM": 5, "NDoS": 3}, path, title="classified traffic")
        assert path.read_text().lstrip().startswith("<?xml")

    def test_state_trace_csv(self, tmp_path):
        cfg = PlantConfig()
        states = [ProcessState(sim_time=0.1 * i, tank_level=cfg.tank_cap - i) for i in range(3)]
        path = tmp_path / "trace.csv"
        save_state_trace_csv(states, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "ts,tank_level,pipe_flow,bottle_level,valve_open,bottles_filled"
        assert len(lines) == 4

    def test_frame_trace_jsonl(self, tmp_path):
        import json

        path = tmp_path / "frames.jsonl"
        save_frame_trace_jsonl([{"ts": 0.0, "src": "PLC2", "dst": "PLC1", "kind": "READ_RESPONSE", "tag": "FLOW_LEVEL", "value": 1.0, "dropped": False, "altered": False}], path)
        record = json.loads(path.read_text().splitlines()[0])
        assert set(record) == {"ts", "src", "dst", "kind", "tag", "value", "dropped", "altered"}
