import pytest

from neuroadc.cli import main
from neuroadc.config import paper_ramp_10, parse_config


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_simulate_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_cli(capsys, "simulate", "--preset", "paper-ramp-10", "--seed", "7", "--out", str(a))[0] == 0
    assert run_cli(capsys, "simulate", "--preset", "paper-ramp-10", "--seed", "7", "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().startswith("step,time_s,row,col,id\n")


def test_simulate_with_membrane(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code, text, _ = run_cli(capsys, "simulate", "--preset", "paper-ramp-10", "--duration", "30",
                            "--record-membrane", "--out", str(out))
    assert code == 0
    lines = (tmp_path / "s_membrane.csv").read_text().splitlines()
    assert lines[0] == "step,id,v" and len(lines) == 1 + 30 * 10


def test_decohere_prints_two_rows(capsys):
    code, text, _ = run_cli(capsys, "decohere", "--preset", "paper-ramp-10", "--constant", "50e-9",
                            "--duration", "3000")
    assert code == 0
    lines = text.strip().splitlines()
    assert lines[0] == "inhibition,isi_cv,burst_fraction,spikes"
    assert [l.split(",")[0] for l in lines[1:]] == ["on", "off"]


def test_reconstruct_summary(tmp_path, capsys):
    out = tmp_path / "r.csv"
    code, text, _ = run_cli(capsys, "reconstruct", "--preset", "paper-ramp-10", "--window", "100",
                            "--alpha", "0.5", "--out", str(out))
    assert code == 0 and "rms_error_pct=" in text
    assert out.read_text().startswith("window,time_s,count,filtered,estimate,reference,abs_error\n")


def test_compensate_writes_table(tmp_path, capsys):
    out = tmp_path / "c.csv"
    code, text, _ = run_cli(capsys, "compensate", "--preset", "paper-ramp-10", "--out", str(out))
    assert code == 0 and "monotone=true" in text
    assert out.read_text().startswith("count_norm,input_norm\n")


def test_montecarlo_small(tmp_path, capsys):
    out = tmp_path / "mc.csv"
    code, text, _ = run_cli(capsys, "montecarlo", "--preset", "paper-ramp-10", "--trials", "2",
                            "--duration", "1000", "--window", "50", "--out", str(out))
    assert code == 0 and "mean_rms_pct=" in text
    assert len(out.read_text().splitlines()) == 3


def test_config_file_and_dump(tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("preset = paper-ramp-10\nrun.duration_steps = 200\n")
    dump = tmp_path / "dump.cfg"
    code, *_ = run_cli(capsys, "simulate", "--config", str(cfg), "--no-inhibition",
                       "--dump-config", str(dump), "--out", str(tmp_path / "s.csv"))
    assert code == 0
    resolved = parse_config(dump)
    assert resolved.sim.duration_steps == 200 and not resolved.sim.policy.enabled
    assert resolved.sim.waveform == paper_ramp_10().sim.waveform


def test_calibrate_prints_gain(capsys):
    code, text, _ = run_cli(capsys, "calibrate-gain", "--preset", "paper-ramp-10", "--target", "5e6")
    assert code == 0 and text.startswith("charge_gain=")
    assert float(text.split("=")[1]) > 0


@pytest.mark.parametrize("argv,needle", [
    (["simulate", "--config", "/nonexistent.cfg"], "cannot read config"),
    (["calibrate-gain", "--preset", "paper-ramp-10", "--target", "0"], "target rate"),
    (["simulate", "--constant=-1e-9"], "constant current"),
])
def test_failures_exit_nonzero_with_one_line(argv, needle, capsys):
    code, _, err = run_cli(capsys, *argv)
    assert code == 1
    assert len(err.strip().splitlines()) == 1 and needle in err


def test_bad_config_value_reports_line(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("[scan]\ncols = -1\n")
    code, _, err = run_cli(capsys, "simulate", "--config", str(cfg))
    assert code == 1 and "bad.cfg:2" in err and "scan.cols" in err


def test_unwritable_output(tmp_path, capsys):
    code, _, err = run_cli(capsys, "simulate", "--duration", "10", "--out",
                           str(tmp_path / "no" / "s.csv"))
    assert code == 1 and "s.csv" in err
