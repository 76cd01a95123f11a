"""CLI surface: subcommands, scenario handling, exit codes, determinism."""

import re
from fractions import Fraction

import pytest

from hmsim.cli import main
from hmsim.modcod import Family, SchemeId, Stream, ThresholdTable, packaged_data_path, serialize_threshold_csv
from hmsim.rateopt import pair_solution


@pytest.fixture()
def scenario_dir(tmp_path):
    """Scenario with a tiny campaign plus custom table set: the shipped
    baseline and only the rho=0.8 hierarchical-QPSK scheme."""
    from hmsim.modcod import load_threshold_csv

    hq = load_threshold_csv(packaged_data_path("hqpsk_thresholds.csv"))
    sub = ThresholdTable({k: v for k, v in hq.entries().items() if k[0].rho_he == 0.8})
    (tmp_path / "hq08.csv").write_text(serialize_threshold_csv(sub))
    (tmp_path / "wx.csv").write_text("attenuation_db,cum_prob\n0,0\n0.4,0.9\n2,1\n")
    (tmp_path / "scenario.ini").write_text(
        f"""
[tables]
baseline = {packaged_data_path("dvbs2_single.csv")}
hierarchical = hq08.csv

[weather]
cdf = wx.csv

[campaign]
grid = 2:4:1
receivers = 12
repetitions = 3
seed = 9

[output]
dir = {tmp_path / "out"}
"""
    )
    return tmp_path


class TestRho:
    def test_hqpsk_value(self, capsys):
        assert main(["rho", "--hqpsk", "--theta", "30"]) == 0
        assert "0.7500" in capsys.readouterr().out

    def test_h32apsk_value(self, capsys):
        assert main(["rho", "--h32apsk", "--g1", "1.6", "--g2", "2.6", "--theta", "28.4"]) == 0
        out = capsys.readouterr().out
        assert float(re.search(r"rho_he = ([\d.]+)", out).group(1)) == pytest.approx(0.8, abs=0.005)

    def test_out_of_range_errors(self, capsys):
        assert main(["rho", "--hqpsk", "--theta", "90"]) == 1
        assert "error" in capsys.readouterr().err

    def test_table_regeneration(self, capsys):
        assert main(["rho", "--table", "h32apsk"]) == 0
        out = capsys.readouterr().out
        assert out.count("\n") == 6  # header + 5 splits
        assert "32.3" in out

    def test_requires_exactly_one_family(self, capsys):
        assert main(["rho", "--theta", "20"]) == 1


class TestPair:
    def test_invariant_printed(self, capsys):
        assert main(["pair", "7", "10"]) == 0
        out = capsys.readouterr().out
        r_ts = float(re.search(r"r_ts\s+= ([\d.]+)", out).group(1))
        r_hm = float(re.search(r"r_hm\s+= ([\d.]+)", out).group(1))
        assert r_hm >= r_ts > 0

    def test_outage_pair_flagged(self, capsys):
        assert main(["pair", "-10", "-10"]) == 0
        out = capsys.readouterr().out
        assert "OUTAGE" in out
        assert "r_hm  = 0.000000" in out

    def test_matches_module_solution(self, scenario_dir, capsys):
        code = main(["pair", "1", "7", "--scenario", str(scenario_dir / "scenario.ini")])
        assert code == 0
        out = capsys.readouterr().out
        from hmsim.modcod import load_threshold_csv

        table = load_threshold_csv(packaged_data_path("dvbs2_single.csv")).merged_with(
            load_threshold_csv(scenario_dir / "hq08.csv")
        )
        expected = pair_solution(1.0, 7.0, table)
        assert float(re.search(r"r_hm\s+= ([\d.]+)", out).group(1)) == pytest.approx(expected.r_hm, abs=1e-6)
        assert float(re.search(r"r_ts\s+= ([\d.]+)", out).group(1)) == pytest.approx(expected.r_ts, abs=1e-6)

    def test_hull_dump(self, scenario_dir, tmp_path, capsys):
        dump = tmp_path / "hull.csv"
        assert main([
            "pair", "1", "7", "--scenario", str(scenario_dir / "scenario.ini"),
            "--dump-hull", str(dump),
        ]) == 0
        lines = dump.read_text().strip().splitlines()
        assert lines[0] == "r1,r2,configuration"
        assert len(lines) >= 4  # origin, two singles, and the hull body


class TestCampaign:
    def test_writes_reports(self, scenario_dir, capsys):
        assert main(["campaign", "--scenario", str(scenario_dir / "scenario.ini")]) == 0
        gains = (scenario_dir / "out" / "gains.csv").read_text().strip().splitlines()
        assert gains[0] == "snr_max_db,family,mean_gain,std_gain,excluded_runs"
        assert len(gains) - 1 == 3  # 3 grid points x 1 family
        assert (scenario_dir / "out" / "curve_h_qpsk.csv").exists()

    def test_seed_determinism(self, scenario_dir, tmp_path, capsys):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        base = ["campaign", "--scenario", str(scenario_dir / "scenario.ini"), "--seed", "42"]
        assert main(base + ["--out", str(out_a)]) == 0
        assert main(base + ["--out", str(out_b), "--workers", "2"]) == 0
        assert (out_a / "gains.csv").read_bytes() == (out_b / "gains.csv").read_bytes()

    def test_flag_overrides(self, scenario_dir, tmp_path, capsys):
        out = tmp_path / "o"
        assert main([
            "campaign", "--scenario", str(scenario_dir / "scenario.ini"),
            "--grid", "3", "--reps", "2", "--receivers", "8", "--out", str(out),
        ]) == 0
        lines = (out / "gains.csv").read_text().strip().splitlines()
        assert len(lines) - 1 == 1

    def test_unknown_family_is_validation_error(self, scenario_dir, capsys):
        code = main([
            "campaign", "--scenario", str(scenario_dir / "scenario.ini"), "--families", "h_psk8",
        ])
        assert code == 1


class TestValidate:
    def test_shipped_data_passes_with_one_warning(self, capsys):
        assert main(["validate"]) == 0
        out = capsys.readouterr().out
        assert out.count("WARNING") == 1
        assert "known anomaly" in out
        assert "OK" in out

    def test_decreasing_cdf_fails(self, scenario_dir, capsys):
        (scenario_dir / "wx.csv").write_text("attenuation_db,cum_prob\n0,0.9\n1,0.2\n2,1\n")
        assert main(["validate", "--scenario", str(scenario_dir / "scenario.ini")]) == 1

    def test_missing_baseline_fails(self, scenario_dir, capsys):
        ini = (scenario_dir / "scenario.ini").read_text().replace(
            str(packaged_data_path("dvbs2_single.csv")), "does_not_exist.csv"
        )
        (scenario_dir / "scenario.ini").write_text(ini)
        assert main(["validate", "--scenario", str(scenario_dir / "scenario.ini")]) == 1

    def test_missing_scenario_file(self, capsys):
        assert main(["validate", "--scenario", "/nonexistent/s.ini"]) == 1
