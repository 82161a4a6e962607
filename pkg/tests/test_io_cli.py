import json

import numpy as np
import pytest

from jointrank import io
from jointrank.cli import main
from jointrank.errors import FormatError, InvalidValue, ParseError

EVENT_HEADER = "case_id,timestamp,code\n"
CONS_HEADER = "case_id,date," + ",".join(f"b{j:02d}" for j in range(1, 49)) + "\n"


def cons_row(case="m1", date="2024-01-01", value="1.0", n=48):
    return f"{case},{date}," + ",".join([value] * n) + "\n"


class TestParseEvents:
    def test_header_only(self, tmp_path):
        path = tmp_path / "e.csv"
        path.write_text(EVENT_HEADER)
        assert io.parse_events_csv(path) == []

    def test_three_rows_in_order(self, tmp_path):
        path = tmp_path / "e.csv"
        path.write_text(EVENT_HEADER
                        + "m1,2024-01-01T00:00:00Z,A\n"
                        + "m2,2024-01-02T12:30:00Z,B\n"
                        + "m1,2024-01-03T23:59:59Z,A\n")
        records = io.parse_events_csv(path)
        assert [r.case_id for r in records] == ["m1", "m2", "m1"]
        assert records[1].code == "B"

    def test_bad_timestamp_line_number(self, tmp_path):
        path = tmp_path / "e.csv"
        path.write_text(EVENT_HEADER
                        + "m1,2024-01-01T00:00:00Z,A\n"
                        + "m2,not-a-date,B\n")
        with pytest.raises(ParseError) as exc:
            io.parse_events_csv(path)
        assert exc.value.line == 3

    def test_missing_header(self, tmp_path):
        path = tmp_path / "e.csv"
        path.write_text("m1,2024-01-01T00:00:00Z,A\n")
        with pytest.raises(FormatError):
            io.parse_events_csv(path)


class TestParseConsumption:
    def test_header_only(self, tmp_path):
        path = tmp_path / "c.csv"
        path.write_text(CONS_HEADER)
        assert io.parse_consumption_csv(path) == []

    def test_round_trip(self, tmp_path):
        path = tmp_path / "c.csv"
        path.write_text(CONS_HEADER + cons_row(value="0.25"))
        records = io.parse_consumption_csv(path)
        assert len(records) == 1
        assert records[0].daily_total == pytest.approx(12.0)

    def test_wrong_column_count(self, tmp_path):
        path = tmp_path / "c.csv"
        header = "case_id,date," + ",".join(f"b{j:02d}" for j in range(1, 48)) + "\n"
        path.write_text(header + cons_row(n=47))
        with pytest.raises(FormatError):
            io.parse_consumption_csv(path)

    def test_negative_bin(self, tmp_path):
        path = tmp_path / "c.csv"
        path.write_text(CONS_HEADER + cons_row() + cons_row(case="m2", value="-1.0"))
        with pytest.raises(InvalidValue) as exc:
            io.parse_consumption_csv(path)
        assert exc.value.line == 3

    def test_bad_date(self, tmp_path):
        path = tmp_path / "c.csv"
        path.write_text(CONS_HEADER + cons_row(date="01/02/2024"))
        with pytest.raises(ParseError) as exc:
            io.parse_consumption_csv(path)
        assert exc.value.line == 2


class TestFrameEquivalence:
    def test_events_frame_matches_records(self, tmp_path):
        from jointrank.coding import DateWindow, code_events
        from jointrank.pipeline import _code_events_frame
        import datetime as dt

        path = tmp_path / "e.csv"
        path.write_text(EVENT_HEADER
                        + "m2,2024-01-01T00:00:00Z,B\n"
                        + "m1,2024-01-02T12:00:00Z,A\n"
                        + "m1,2024-01-02T13:00:00Z,A\n"
                        + "m1,2024-06-01T00:00:00Z,C\n")
        window = DateWindow(dt.date(2024, 1, 1), dt.date(2024, 1, 31))
        coded, _ = code_events(io.parse_events_csv(path), window)
        fast = _code_events_frame(io.load_events_frame(path), window)
        assert coded.case_ids == fast.case_ids
        assert coded.variable_names == fast.variable_names
        assert np.array_equal(coded.matrix, fast.matrix)

    def test_consumption_frame_matches_records(self, tmp_path):
        from jointrank.coding import DateWindow, code_consumption
        from jointrank.pipeline import _code_consumption_frame
        import datetime as dt

        path = tmp_path / "c.csv"
        path.write_text(CONS_HEADER
                        + cons_row("m1", "2024-01-01", "0.5")
                        + cons_row("m1", "2024-01-08", "1.5")
                        + cons_row("m2", "2024-01-03", "2.0"))
        window = DateWindow(dt.date(2024, 1, 1), dt.date(2024, 1, 31))
        coded, _ = code_consumption(io.parse_consumption_csv(path), window)
        fast = _code_consumption_frame(io.load_consumption_frame(path), window)
        assert coded.case_ids == fast.case_ids
        assert np.allclose(coded.matrix, fast.matrix)


class TestCli:
    def test_synth_then_pipeline(self, tmp_path):
        data = tmp_path / "data"
        out = tmp_path / "out"
        assert main(["synth", "--m", "300", "--codes", "40", "--seed", "1",
                     "--out", str(data)]) == 0
        assert main(["pipeline",
                     "--events", str(data / "events.csv"),
                     "--consumption", str(data / "consumption.csv"),
                     "--out", str(out)]) == 0
        report = json.loads((out / "report.json").read_text())
        assert report["counts"]["total_cases"] == 300
        assert (out / "density_grid.csv").exists()
        assert (out / "scree_events.csv").exists()
        assert (out / "distance_hist_consumption.csv").exists()

    def test_stepwise_commands(self, tmp_path):
        data = tmp_path / "data"
        main(["synth", "--m", "200", "--codes", "30", "--seed", "2", "--out", str(data)])
        ev_matrix = tmp_path / "events_coded.csv"
        assert main(["code-events", "--input", str(data / "events.csv"),
                     "--start", "2024-01-01", "--end", "2024-01-14",
                     "--double-log", "--out", str(ev_matrix)]) == 0
        ord_dir = tmp_path / "ord"
        assert main(["ordinate", "--input", str(ev_matrix), "--method", "ca",
                     "--out", str(ord_dir)]) == 0
        dist_a = tmp_path / "da.csv"
        assert main(["distances", "--input", str(ord_dir / "coords_F.csv"),
                     "--k", "2", "--out", str(dist_a)]) == 0

        cons_matrix = tmp_path / "cons_coded.csv"
        assert main(["code-consumption", "--input", str(data / "consumption.csv"),
                     "--start", "2024-01-01", "--end", "2024-01-14",
                     "--out", str(cons_matrix)]) == 0
        ord_dir_b = tmp_path / "ordb"
        assert main(["ordinate", "--input", str(cons_matrix), "--method", "pca",
                     "--out", str(ord_dir_b)]) == 0
        dist_b = tmp_path / "db.csv"
        assert main(["distances", "--input", str(ord_dir_b / "coords_F.csv"),
                     "--k", "2", "--out", str(dist_b)]) == 0

        joint_dir = tmp_path / "joint"
        assert main(["joint", "--a", str(dist_a), "--b", str(dist_b),
                     "--out", str(joint_dir)]) == 0
        report = tmp_path / "report.json"
        assert main(["detect", "--input", str(joint_dir / "joint_cases.csv"),
                     "--threshold", "2.0", "--out", str(report)]) == 0
        assert "flagged" in json.loads(report.read_text())

    def test_bench_command(self, tmp_path):
        out = tmp_path / "bench.csv"
        assert main(["bench", "--sizes", "100,200", "--cols", "20",
                     "--repeats", "3", "--out", str(out)]) == 0
        text = out.read_text()
        assert "vectorized" in text and "sparse" in text and "full" in text

    def test_exit_code_config_error(self, tmp_path):
        # by-type mode without a consumption input
        assert main(["pipeline", "--events", "nope.csv",
                     "--out", str(tmp_path / "o")]) == 2

    def test_exit_code_data_error(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("wrong,header\n")
        assert main(["code-events", "--input", str(bad),
                     "--start", "2024-01-01", "--end", "2024-01-31",
                     "--out", str(tmp_path / "m.csv")]) == 3

    def test_exit_code_empty_events(self, tmp_path):
        ev = tmp_path / "e.csv"
        ev.write_text(EVENT_HEADER)
        cons = tmp_path / "c.csv"
        cons.write_text(CONS_HEADER + cons_row())
        assert main(["pipeline", "--events", str(ev), "--consumption", str(cons),
                     "--out", str(tmp_path / "o")]) == 3
