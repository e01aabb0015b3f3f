import json

import numpy as np

from sfrkit import FrequencyTrace
from sfrkit.reports import fmt, write_csv, write_json, write_trace_csv


class TestFormatting:
    def test_nine_significant_digits(self):
        assert fmt(-0.9740344404076423) == "-0.97403444"
        assert fmt(397.82941506384293) == "397.829415"
        assert fmt(0.0) == "0"
        assert fmt(2.7755575615628914e-15) == "2.77555756e-15"

    def test_trace_csv_bytes(self, tmp_path):
        trace = FrequencyTrace(t0=0.0, dt=0.5, samples=np.array([0.0, -0.123456789123, -0.25]))
        path = tmp_path / "t.csv"
        write_trace_csv(path, trace)
        assert path.read_bytes() == b"t_s,delta_f_hz\n0,0\n0.5,-0.123456789\n1,-0.25\n"

    def test_csv_writer_deterministic(self, tmp_path):
        rows = [(1.0, 2.0 / 3.0), (0.1 + 0.2, 1e-12)]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_csv(a, ("x", "y"), rows)
        write_csv(b, ("x", "y"), rows)
        assert a.read_bytes() == b.read_bytes()

    def test_json_sorted_with_trailing_newline(self, tmp_path):
        path = tmp_path / "o.json"
        write_json(path, {"b": 1.5, "a": None})
        text = path.read_text()
        assert text.endswith("\n")
        assert json.loads(text) == {"a": None, "b": 1.5}
        assert text.index('"a"') < text.index('"b"')
