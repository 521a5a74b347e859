import pytest

from coexsim.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestRun:
    def test_default_run_emits_header_and_row(self, capsys):
        code, out, _ = run_cli(capsys, "run", "--duration", "0.2")
        assert code == 0
        header, row = out.strip().splitlines()
        assert header.startswith("scenario,rep,seed,throughput_mbps,normalized")
        cells = row.split(",")
        assert cells[0] == "run"
        assert cells[4] == ""  # no baseline requested -> normalized empty
        assert float(cells[3]) > 0

    def test_same_invocation_twice_is_identical(self, capsys):
        _, first, _ = run_cli(capsys, "run", "--duration", "0.2", "--seed", "9")
        _, second, _ = run_cli(capsys, "run", "--duration", "0.2", "--seed", "9")
        assert first == second

    def test_trace_flag_writes_event_trace(self, tmp_path, capsys):
        trace = tmp_path / "events.log"
        code, _, _ = run_cli(capsys, "run", "--duration", "0.05",
                             "--trace", str(trace))
        assert code == 0
        lines = trace.read_text().strip().splitlines()
        assert lines
        # Format: time_ns kind node [detail]
        t, kind, node = lines[0].split(" ")[:3]
        assert t == "0" and kind in ("lte-on", "cca-sample")
        times = [int(line.split(" ")[0]) for line in lines]
        assert times == sorted(times)

    def test_config_file_and_overrides(self, tmp_path, capsys):
        path = tmp_path / "run.ini"
        path.write_text("[lte]\nduty = 0\n[wifi]\nmcs_mbps = 6\n")
        code, out, _ = run_cli(capsys, "run", "--config", str(path),
                               "--duration", "0.5")
        assert code == 0
        throughput = float(out.strip().splitlines()[1].split(",")[3])
        assert throughput == pytest.approx(5.37, abs=0.3)

    def test_bad_config_exits_2(self, tmp_path, capsys):
        path = tmp_path / "bad.ini"
        path.write_text("[lte]\nduty = 1.3\n")
        code, _, err = run_cli(capsys, "run", "--config", str(path))
        assert code == 2
        assert "duty" in err

    def test_missing_config_file_exits_2(self, capsys):
        code, _, err = run_cli(capsys, "run", "--config", "/nonexistent.ini")
        assert code == 2


class TestSweep:
    def test_unknown_scenario_exits_2(self, capsys):
        code, _, err = run_cli(capsys, "sweep", "bogus", "--out", "-")
        assert code == 2
        assert "bogus" in err

    def test_restricted_duty_sweep_writes_csv_and_summary(self, tmp_path, capsys):
        out = tmp_path / "duty.csv"
        code, _, _ = run_cli(
            capsys, "sweep", "duty", "--out", str(out), "--seed", "3",
            "--reps", "2", "--duration", "0.3", "--jobs", "1",
            "--grid", "duty=0,1", "--grid", "lte.tx_power_dbm=12",
            "--grid", "mcs_mbps=54")
        assert code == 0
        lines = out.read_text().strip().splitlines()
        assert len(lines) == 1 + 2 * 2  # header + 2 duties x 2 reps
        summary = tmp_path / "duty.summary.csv"
        assert summary.exists()
        assert len(summary.read_text().strip().splitlines()) == 1 + 2

    def test_sweep_is_byte_deterministic(self, tmp_path, capsys):
        texts = []
        for name in ("a.csv", "b.csv"):
            out = tmp_path / name
            run_cli(capsys, "sweep", "freq", "--out", str(out), "--seed", "3",
                    "--reps", "1", "--duration", "0.2", "--jobs", "2",
                    "--grid", "center_offset_mhz=-5,5",
                    "--grid", "lte.tx_power_dbm=12", "--grid", "mcs_mbps=54")
            texts.append(out.read_bytes())
        assert texts[0] == texts[1]

    def test_ambiguous_grid_key_exits_2(self, capsys):
        code, _, err = run_cli(capsys, "sweep", "duty", "--out", "-",
                               "--grid", "tx_power_dbm=12,17")
        assert code in (0, 2)  # tx_power_dbm exists in both lte and wifi
        assert code == 2 and "ambiguous" in err


class TestBaseline:
    def test_single_mcs_report(self, capsys):
        code, out, _ = run_cli(capsys, "baseline", "--mcs", "54",
                               "--duration", "2.0")
        assert code == 0
        assert "worst relative error" in out
        worst = float(out.strip().splitlines()[-1].split(":")[1].strip().rstrip("%"))
        assert worst < 2.0

    def test_goodput_monotone_in_rate_label(self, capsys):
        code, out, _ = run_cli(capsys, "baseline", "--duration", "1.0")
        assert code == 0
        rows = [line.split() for line in out.strip().splitlines()[1:-1]]
        simulated = [float(r[2]) for r in rows]
        assert simulated == sorted(simulated)
        assert len(simulated) == 8

    def test_bad_mcs_exits_2(self, capsys):
        code, _, err = run_cli(capsys, "baseline", "--mcs", "11")
        assert code == 2
