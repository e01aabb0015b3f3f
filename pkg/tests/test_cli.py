import json

import pytest

from sfrkit.cli import _FIGURES, main

BASE = {
    "system": {"f_n_hz": 50, "ke_mws": 9000, "p_load_mw": 2000, "d_relief": 0.04,
               "p_cont_mw": 300},
    "bands": [{"kind": "lag", "pfr_mw": 270, "tau_s": 2.0}],
    "sim": {"t_end_s": 10.0, "dt_s": 0.001},
}

TWO_BAND = {
    "system": BASE["system"],
    "bands": [{"kind": "lag", "pfr_mw": 130, "tau_s": 0.4},
              {"kind": "lag", "pfr_mw": 80, "tau_s": 2.0}],
}

RAMP = {
    "system": BASE["system"],
    "bands": [{"kind": "ramp", "pfr_mw": 270, "t_r_s": 6.0}],
    "sim": {"t_end_s": 10.0, "dt_s": 0.001},
}


@pytest.fixture
def scenario(tmp_path):
    def write(doc, name="scenario.json"):
        path = tmp_path / name
        path.write_text(json.dumps(doc))
        return str(path)

    return write


def read_csv(path):
    lines = path.read_text().splitlines()
    header = lines[0].split(",")
    rows = [[float(v) for v in line.split(",")] for line in lines[1:]]
    return header, rows


class TestSimulate:
    def test_writes_trace(self, scenario, tmp_path):
        out = tmp_path / "trace.csv"
        assert main(["simulate", "--scenario", scenario(BASE), "--out", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == ["t_s", "delta_f_hz"]
        assert len(rows) == 10001
        assert rows[0] == [0.0, 0.0]

    def test_byte_identical_reruns(self, scenario, tmp_path):
        path = scenario(BASE)
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        main(["simulate", "--scenario", path, "--out", str(out1)])
        main(["simulate", "--scenario", path, "--out", str(out2)])
        assert out1.read_bytes() == out2.read_bytes()

    def test_euler_method(self, scenario, tmp_path):
        out = tmp_path / "trace.csv"
        code = main(["simulate", "--scenario", scenario(BASE), "--out", str(out),
                     "--method", "euler"])
        assert code == 0 and out.exists()


class TestCompare:
    def test_lag_alignment(self, scenario, tmp_path, capsys):
        out = tmp_path / "cmp"
        assert main(["compare", "--scenario", scenario(BASE), "--out", str(out)]) == 0
        line = capsys.readouterr().out.strip()
        assert line.startswith("max_abs_gap_hz=")
        assert float(line.split("=")[1]) <= 1e-3
        assert (tmp_path / "cmp_closed.csv").exists()
        assert (tmp_path / "cmp_oracle.csv").exists()

    def test_ramp_divergence_visible(self, scenario, tmp_path, capsys):
        doc = json.loads(json.dumps(RAMP))
        doc["bands"][0]["t_r_s"] = 1.0
        out = tmp_path / "cmp"
        assert main(["compare", "--scenario", scenario(doc), "--out", str(out)]) == 0
        gap = float(capsys.readouterr().out.strip().split("=")[1])
        assert gap > 0.05

    def test_mixed_bands_rejected(self, scenario, tmp_path):
        doc = {"system": BASE["system"],
               "bands": BASE["bands"] + RAMP["bands"],
               "sim": BASE["sim"]}
        assert main(["compare", "--scenario", scenario(doc),
                     "--out", str(tmp_path / "x")]) == 1


class TestNadir:
    def test_closed_form(self, scenario, tmp_path):
        out = tmp_path / "nadir.json"
        assert main(["nadir", "--scenario", scenario(BASE), "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["kind"] == "interior_minimum"
        assert doc["t_nadir_s"] == pytest.approx(3.4576630206742536, rel=1e-12)
        assert doc["delta_f_nadir_hz"] == pytest.approx(-0.9740344404076423, rel=1e-12)
        assert doc["max_rocof_hz_per_s"] == pytest.approx(-300 / 360, rel=1e-12)

    def test_oracle_method_on_ramp(self, scenario, tmp_path):
        out = tmp_path / "nadir.json"
        assert main(["nadir", "--scenario", scenario(RAMP), "--out", str(out),
                     "--method", "oracle"]) == 0
        doc = json.loads(out.read_text())
        assert doc["max_rocof_hz_per_s"] == pytest.approx(-300 / 360, rel=1e-12)
        assert doc["delta_f_nadir_hz"] < -1.0

    def test_empty_scenario_exits_1_without_output(self, scenario, tmp_path, capsys):
        out = tmp_path / "nadir.json"
        assert main(["nadir", "--scenario", scenario({}, "empty.json"),
                     "--out", str(out)]) == 1
        assert not out.exists()
        assert "system" in capsys.readouterr().err

    def test_two_bands_need_oracle_or_fit(self, scenario, tmp_path):
        assert main(["nadir", "--scenario", scenario(TWO_BAND),
                     "--out", str(tmp_path / "n.json")]) == 1

    def test_asymptotic_case(self, scenario, tmp_path):
        doc = json.loads(json.dumps(BASE))
        doc["bands"] = [{"kind": "lag", "pfr_mw": 210, "tau_s": 0.4}]
        out = tmp_path / "nadir.json"
        assert main(["nadir", "--scenario", scenario(doc), "--out", str(out)]) == 0
        parsed = json.loads(out.read_text())
        assert parsed["kind"] == "asymptotic"
        assert parsed["t_nadir_s"] is None
        assert parsed["delta_f_nadir_hz"] == pytest.approx(-1.125, rel=1e-12)


class TestFits:
    def test_fit_band(self, scenario, tmp_path):
        out = tmp_path / "eq.json"
        assert main(["fit-band", "--scenario", scenario(TWO_BAND), "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["pfr_eq_mw"] == pytest.approx(210.0, rel=0.02)
        assert 0.75 <= doc["tau_eq_s"] <= 0.90

    def test_fit_band_needs_two_lag_bands(self, scenario, tmp_path):
        assert main(["fit-band", "--scenario", scenario(BASE),
                     "--out", str(tmp_path / "eq.json")]) == 1

    def test_fit_surface_and_reuse(self, scenario, tmp_path, capsys):
        surface = tmp_path / "surface.json"
        assert main(["fit-surface", "--tau1", "0.4", "--tau2", "2.0",
                     "--pfr-min", "50", "--pfr-max", "200", "--pfr-step", "50",
                     "--out", str(surface)]) == 0
        doc = json.loads(surface.read_text())
        assert set(doc) >= {"a", "b", "tau1_s", "tau2_s", "rms_residual"}

        out = tmp_path / "map.csv"
        assert main(["mape-map", "--tau1", "0.4", "--tau2", "2.0",
                     "--surface", str(surface),
                     "--pfr-min", "50", "--pfr-max", "200", "--pfr-step", "50",
                     "--out", str(out)]) == 0
        summary = capsys.readouterr().out.strip().splitlines()[-1]
        assert "mean_mape_pct=" in summary


class TestMapeMapCli:
    def test_canonical_default_surface(self, tmp_path, capsys):
        out = tmp_path / "map.csv"
        assert main(["mape-map", "--pfr-min", "50", "--pfr-max", "200",
                     "--pfr-step", "50", "--out", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == ["pfr1_mw", "pfr2_mw", "mape_pct"]
        assert len(rows) == 16

    def test_byte_identical_reruns(self, tmp_path):
        args = ["mape-map", "--pfr-min", "50", "--pfr-max", "150", "--pfr-step", "50"]
        out1, out2 = tmp_path / "m1.csv", tmp_path / "m2.csv"
        main(args + ["--out", str(out1)])
        main(args + ["--out", str(out2)])
        assert out1.read_bytes() == out2.read_bytes()


class TestTauSweepCli:
    def test_small_sweep(self, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        assert main(["tau-sweep", "--tau1-values", "0.4,0.8",
                     "--tau2-values", "0.8,1.6",
                     "--pfr-min", "60", "--pfr-max", "180", "--pfr-step", "60",
                     "--out", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == ["tau1_s", "tau2_s", "mean_mape_pct", "max_mape_pct"]
        assert [(r[0], r[1]) for r in rows] == [(0.4, 0.8), (0.4, 1.6), (0.8, 0.8), (0.8, 1.6)]

    def test_threads_do_not_change_bytes(self, tmp_path, monkeypatch):
        args = ["tau-sweep", "--tau1-values", "0.4", "--tau2-values", "1.2",
                "--pfr-min", "80", "--pfr-max", "160", "--pfr-step", "80"]
        out1, out2 = tmp_path / "s1.csv", tmp_path / "s2.csv"
        main(args + ["--out", str(out1)])
        monkeypatch.setenv("SFRKIT_THREADS", "3")
        main(args + ["--out", str(out2)])
        assert out1.read_bytes() == out2.read_bytes()


class TestSecurityCommands:
    def test_max_contingency(self, scenario, tmp_path, capsys):
        doc = json.loads(json.dumps(BASE))
        doc["system"]["ke_mws"] = 7000
        doc["system"]["p_load_mw"] = 2500
        out = tmp_path / "cap.json"
        assert main(["max-contingency", "--scenario", scenario(doc),
                     "--delta-f-max", "-1.25", "--tau", "1.0", "--out", str(out)]) == 0
        parsed = json.loads(out.read_text())
        assert parsed["max_contingency_mw"] == pytest.approx(397.82941506384293, rel=1e-9)
        assert parsed["ffr_share"] == pytest.approx(0.5084278831291483, rel=1e-9)

    def test_max_contingency_asymptotic_exit_2(self, scenario, tmp_path, capsys):
        doc = json.loads(json.dumps(BASE))
        doc["system"]["ke_mws"] = 7000
        doc["system"]["p_load_mw"] = 2500
        out = tmp_path / "cap.json"
        code = main(["max-contingency", "--scenario", scenario(doc),
                     "--delta-f-max", "-1.25", "--tau", "0.5", "--out", str(out)])
        assert code == 2
        assert not out.exists()
        assert "asymptotic" in capsys.readouterr().err

    def test_min_tau(self, scenario, tmp_path):
        out = tmp_path / "mt.json"
        assert main(["min-tau", "--scenario", scenario(BASE),
                     "--k", str(300 / 210), "--out", str(out)]) == 0
        parsed = json.loads(out.read_text())
        assert parsed["min_effective_tau_s"] == pytest.approx(1.35, rel=1e-12)

    def test_sensitivities(self, scenario, tmp_path):
        doc = json.loads(json.dumps(BASE))
        doc["system"]["ke_mws"] = 7000
        doc["system"]["p_load_mw"] = 2500
        out = tmp_path / "sens.json"
        assert main(["sensitivities", "--scenario", scenario(doc),
                     "--delta-f-max", "-1.25", "--pfr1", "130", "--pfr2", "80",
                     "--out", str(out)]) == 0
        parsed = json.loads(out.read_text())
        for key, value in parsed["analytic"].items():
            assert value == pytest.approx(parsed["finite_difference"][key], rel=1e-4), key
        assert parsed["analytic"]["dtau_dpfr1_s_per_mw"] == pytest.approx(
            -0.0026615762709064805, rel=1e-9
        )


class TestOverridesAndErrors:
    def test_set_override(self, scenario, tmp_path):
        out = tmp_path / "mt.json"
        assert main(["min-tau", "--scenario", scenario(BASE),
                     "--set", "system.ke_mws=7000", "--set", "system.p_load_mw=2500",
                     "--k", "1.4", "--out", str(out)]) == 0
        parsed = json.loads(out.read_text())
        # (1 - 1/1.4) * 2 * 140 / 100
        assert parsed["min_effective_tau_s"] == pytest.approx(0.8, rel=1e-9)

    def test_bad_override_exits_1(self, scenario, tmp_path):
        assert main(["min-tau", "--scenario", scenario(BASE),
                     "--set", "bands.7.tau_s=1", "--k", "1.4",
                     "--out", str(tmp_path / "x.json")]) == 1

    def test_malformed_json_exits_1(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["nadir", "--scenario", str(bad),
                     "--out", str(tmp_path / "x.json")]) == 1
        assert "line" in capsys.readouterr().err

    def test_unknown_subcommand_exits_1(self, capsys):
        assert main(["frobnicate"]) == 1


class TestReproduceFigures:
    def test_all_required_targets_registered(self):
        assert {"fig1", "fig3", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10",
                "fig11"} <= set(_FIGURES)

    @pytest.mark.parametrize("target,header", [
        ("fig1", ["t_r_s", "t_s", "delta_f_closed_hz", "delta_f_oracle_hz"]),
        ("fig3", ["tau_s", "t_s", "pfr_mw"]),
        ("fig5", ["t_s", "delta_f_closed_hz", "delta_f_oracle_hz"]),
        ("fig6", ["pfr1_mw", "pfr2_mw", "t_s", "delta_f_exact_hz", "delta_f_approx_hz"]),
        ("fig7", ["pfr1_mw", "pfr2_mw", "t_s", "delta_f_exact_hz", "delta_f_approx_hz"]),
        ("fig9", ["tau_s", "max_contingency_mw", "ffr_share"]),
        ("fig11", ["A", "K", "f_AK"]),
    ])
    def test_cheap_targets_emit_tables(self, tmp_path, target, header):
        out = tmp_path / f"{target}.csv"
        assert main(["reproduce-figure", target, "--out", str(out)]) == 0
        got_header, rows = read_csv(out)
        assert got_header == header
        assert rows

    def test_fig9_contains_the_anchor_row(self, tmp_path):
        out = tmp_path / "fig9.csv"
        main(["reproduce-figure", "fig9", "--out", str(out)])
        _, rows = read_csv(out)
        anchor = [r for r in rows if r[0] == 1.0]
        assert anchor
        assert anchor[0][1] == pytest.approx(397.829, abs=0.01)
        assert anchor[0][2] == pytest.approx(0.5084, abs=0.0005)

    def test_fig9_caps_non_increasing(self, tmp_path):
        out = tmp_path / "fig9.csv"
        main(["reproduce-figure", "fig9", "--out", str(out)])
        _, rows = read_csv(out)
        caps = [r[1] for r in rows]
        assert all(a >= b - 1e-9 for a, b in zip(caps, caps[1:]))

    def test_fig5_alignment(self, tmp_path):
        out = tmp_path / "fig5.csv"
        main(["reproduce-figure", "fig5", "--out", str(out)])
        _, rows = read_csv(out)
        assert max(abs(r[1] - r[2]) for r in rows) <= 1e-3

    def test_fig1_shows_the_ramp_failure(self, tmp_path):
        out = tmp_path / "fig1.csv"
        main(["reproduce-figure", "fig1", "--out", str(out)])
        _, rows = read_csv(out)
        fast = [r for r in rows if r[0] == 1.0 and r[1] > 1.0]
        assert max(abs(r[2] - r[3]) for r in fast) > 0.05

    def test_unknown_target_exits_1(self, tmp_path):
        assert main(["reproduce-figure", "fig99", "--out", str(tmp_path / "x.csv")]) == 1

    def test_byte_identical_reruns(self, tmp_path):
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        main(["reproduce-figure", "fig9", "--out", str(out1)])
        main(["reproduce-figure", "fig9", "--out", str(out2)])
        assert out1.read_bytes() == out2.read_bytes()
