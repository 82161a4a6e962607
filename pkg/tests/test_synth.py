import numpy as np
import pytest

from jointrank import io
from jointrank.errors import InvalidInput
from jointrank.synth import SyntheticSpec, generate_synthetic


class TestSpecValidation:
    def test_small_case_count_rejected(self):
        with pytest.raises(InvalidInput):
            SyntheticSpec(case_count=50)

    def test_bad_fraction_rejected(self):
        with pytest.raises(InvalidInput):
            SyntheticSpec(anomaly_fraction=0.5)

    def test_anomaly_count_floor(self):
        assert SyntheticSpec(case_count=1000, anomaly_fraction=0.02).anomaly_count == 20
        assert SyntheticSpec(case_count=150, anomaly_fraction=0.017).anomaly_count == 2


class TestGeneration:
    def test_no_anomalies_all_background(self, tmp_path):
        spec = SyntheticSpec(case_count=100, event_code_count=20,
                             anomaly_fraction=0.0, seed=0, days=7)
        _, _, labels_path = generate_synthetic(spec, tmp_path)
        labels = io.parse_labels_csv(labels_path)
        assert len(labels) == 100
        assert all(v == 0 for v in labels.values())

    def test_exact_label_count(self, tmp_path):
        spec = SyntheticSpec(case_count=1000, event_code_count=30,
                             anomaly_fraction=0.02, seed=1, days=7)
        _, _, labels_path = generate_synthetic(spec, tmp_path)
        labels = io.parse_labels_csv(labels_path)
        assert sum(labels.values()) == 20

    def test_byte_identical_rerun(self, tmp_path):
        spec = SyntheticSpec(case_count=150, event_code_count=25, seed=9, days=7)
        paths_a = generate_synthetic(spec, tmp_path / "a")
        paths_b = generate_synthetic(spec, tmp_path / "b")
        for pa, pb in zip(paths_a, paths_b):
            assert pa.read_bytes() == pb.read_bytes()

    def test_outputs_parse_cleanly(self, tmp_path):
        spec = SyntheticSpec(case_count=120, event_code_count=15, seed=3, days=7)
        ev_path, cons_path, _ = generate_synthetic(spec, tmp_path)
        events = io.load_events_frame(ev_path)
        cons = io.load_consumption_frame(cons_path)
        assert events["case_id"].nunique() <= 120
        assert len(cons) == 120 * 7
        bins = cons.iloc[:, 2:].to_numpy()
        assert np.all(bins >= 0)

    def test_events_only_mode_keeps_consumption_background(self, tmp_path):
        kwargs = dict(case_count=200, event_code_count=20, anomaly_fraction=0.05,
                      seed=4, days=7)
        _, cons_both, labels_path = generate_synthetic(
            SyntheticSpec(anomaly_mode="events", **kwargs), tmp_path / "events_only")
        _, cons_none, _ = generate_synthetic(
            SyntheticSpec(anomaly_fraction=0.0, seed=4, case_count=200,
                          event_code_count=20, days=7), tmp_path / "none")
        labels = io.parse_labels_csv(labels_path)
        # Anomalies shifted only in events: consumption totals stay in the
        # background range rather than 3x above it.
        df = io.load_consumption_frame(cons_both)
        totals = df.iloc[:, 2:].sum(axis=1).groupby(df["case_id"]).mean()
        anom_ids = [c for c, l in labels.items() if l]
        background_max = totals[[c for c, l in labels.items() if not l]].max()
        assert totals[anom_ids].max() <= background_max * 1.5
