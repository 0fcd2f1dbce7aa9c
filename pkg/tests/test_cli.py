import csv
import json
import math
import subprocess
import sys

import pytest

from poissonfield import cli
from poissonfield.config import ConfigError, parse


def write_cfg(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


SMALL_OUTAGE = {
    "experiment": "capacity-outage", "seed": 3, "n_trials": 20000,
    "sweep": {"axis": "snr_db", "values": [0, 10, 20, 30, 40]},
}
SMALL_SOP = {
    "experiment": "sop", "seed": 1,
    "sweep": {"axis": "f_hz", "start": -4e6, "stop": 4e6, "num": 41},
}


# ---------------------------------------------------------------- outputs


def test_capacity_outage_csv(tmp_path):
    out = tmp_path / "fig3.csv"
    assert cli.main(["capacity-outage", "--config", write_cfg(tmp_path, SMALL_OUTAGE), "--out", str(out)]) == 0
    rows = read_csv(out)
    assert rows[0] == ["inr_db", "sweep_value", "p_out", "std_err"]
    assert len(rows) == 1 + 4 * 5
    assert [r[0] for r in rows[1::5]] == ["-inf", "10.0", "20.0", "30.0"]
    for r in rows[1:]:
        p, se = float(r[2]), float(r[3])
        assert 0 <= p <= 1
        assert se == pytest.approx(math.sqrt(p * (1 - p) / 20000))
    # Each curve decreases in SNR; curves are ordered in INR.
    p = [[float(r[2]) for r in rows[1 + 5 * k: 6 + 5 * k]] for k in range(4)]
    for curve in p:
        assert all(a >= b for a, b in zip(curve, curve[1:]))
    for lo, hi in zip(p, p[1:]):
        assert all(a <= b for a, b in zip(lo, hi))


def test_capacity_outage_without_series(tmp_path):
    out = tmp_path / "r.csv"
    cfg = dict(SMALL_OUTAGE, series=None, sweep={"axis": "rate", "values": [0.5, 1, 2]})
    assert cli.main(["capacity-outage", "--config", write_cfg(tmp_path, cfg), "--out", str(out)]) == 0
    rows = read_csv(out)
    assert rows[0] == ["sweep_value", "p_out", "std_err"]
    assert [r[0] for r in rows[1:]] == ["0.5", "1.0", "2.0"]


def test_sop_csv(tmp_path):
    out = tmp_path / "sop.csv"
    assert cli.main(["sop", "--config", write_cfg(tmp_path, SMALL_SOP), "--out", str(out)]) == 0
    rows = read_csv(out)
    assert rows[0] == ["f_hz", "sop"]
    assert len(rows) == 42
    vals = [float(r[1]) for r in rows[1:]]
    assert all(0 <= v <= 1 for v in vals)
    assert float(rows[21][0]) == 0.0 and vals[20] == max(vals)


def test_sop_power_sweep_fig8(tmp_path):
    out = tmp_path / "fig8.csv"
    cfg = {"experiment": "sop", "seed": 1, "sweep": {"axis": "power_dbm", "start": -40, "stop": 40, "num": 9},
           "series": {"axis": "lambda", "values": [0.01, 0.1, 1.0]}}
    assert cli.main(["sop", "--config", write_cfg(tmp_path, cfg), "--out", str(out)]) == 0
    rows = read_csv(out)
    assert rows[0] == ["lambda", "sweep_value", "f_hz", "sop"]
    curves = [[float(r[3]) for r in rows[1 + 9 * k: 10 + 9 * k]] for k in range(3)]
    for c in curves:
        assert all(a <= b for a, b in zip(c, c[1:]))
    assert curves[-1][-1] > 0.99


def test_psd_csv(tmp_path):
    out = tmp_path / "psd.csv"
    cfg = {"experiment": "psd", "seed": 0, "sweep": {"axis": "f_hz", "values": [0.0, 5e5, 1e6]}}
    assert cli.main(["psd", "--config", write_cfg(tmp_path, cfg), "--out", str(out)]) == 0
    rows = read_csv(out)
    assert rows[0] == ["f_hz", "psd_w_per_hz"]
    assert float(rows[1][1]) == pytest.approx(1e-8)
    assert float(rows[3][1]) < 1e-30


def test_validate_capacity(tmp_path):
    out = tmp_path / "vc.csv"
    assert cli.main(["validate-capacity", "--seed", "5", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert rows[0] == ["case", "statistic", "threshold", "pass"]
    cases = {r[0]: r for r in rows[1:]}
    assert sum(k.startswith("closed_vs_numeric") for k in cases) == 5
    gap = cases["published_minus_rederived_eta=1"]
    assert float(gap[1]) == pytest.approx(-0.1854, abs=1e-4)
    assert all(r[3] == "true" for r in rows[1:])


def test_validate_stable_small(tmp_path):
    out = tmp_path / "vs.csv"
    assert cli.main(["validate-stable", "--seed", "42", "--trials", "20000", "--out", str(out)]) == 0
    rows = read_csv(out)
    names = [r[0] for r in rows[1:]]
    assert names == ["ks_vs_stable_cdf", "ks_vs_levy_cdf", "truncation_error"]
    for r in rows[1:]:
        assert float(r[1]) < float(r[2]) and r[3] == "true"


def test_validation_failure_exit_code(tmp_path, monkeypatch):
    monkeypatch.setitem(cli._RUNNERS, "validate-capacity", lambda cfg: (["case"], [["x"]], False))
    assert cli.main(["validate-capacity", "--seed", "1", "--out", str(tmp_path / "v.csv")]) == 2


# ---------------------------------------------------------------- config errors


@pytest.mark.parametrize("argv", [
    ["capacity-outage"],                                   # seed missing
    ["capacity-outage", "--seed", "-1"],
    ["capacity-outage", "--seed", "1", "--trials", "0"],
    ["capacity-outage", "--seed", "1", "--bogus"],
    ["nonsense", "--seed", "1"],
])
def test_config_errors_exit_1(argv, tmp_path, capsys):
    assert _exit_code(argv + ["--out", str(tmp_path / "x.csv")]) == 1
    err = capsys.readouterr().err.strip().splitlines()
    assert err and "error" in err[-1]


def _exit_code(argv):
    try:
        return cli.main(argv)
    except SystemExit as exc:
        return exc.code


@pytest.mark.parametrize("cfg", [
    {"model": {"snr_db": 20, "b": 0.5}},
    {"model": {"unknown": 1}},
    {"sweep": {"axis": "nothing", "values": [1]}},
    {"sweep": {"axis": "snr_db"}},
    {"series": {"axis": "inr_db", "values": []}},
    {"extra_top_level": True},
])
def test_bad_config_files(tmp_path, cfg):
    raw = dict({"experiment": "capacity-outage", "seed": 1}, **cfg)
    assert cli.main(["capacity-outage", "--config", write_cfg(tmp_path, raw)]) == 1


def test_unreadable_and_mismatched_configs(tmp_path):
    assert cli.main(["sop", "--config", str(tmp_path / "missing.json")]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["sop", "--config", str(bad)]) == 1
    assert cli.main(["sop", "--config", write_cfg(tmp_path, SMALL_OUTAGE)]) == 1


def test_parse_requires_seed():
    with pytest.raises(ConfigError):
        parse({"experiment": "psd"})
    assert parse({"experiment": "psd", "seed": 2**64 - 1}).seed == 2**64 - 1


# ---------------------------------------------------------------- reproducibility


def test_manifest_round_trip(tmp_path):
    out = tmp_path / "o.csv"
    path = write_cfg(tmp_path, SMALL_OUTAGE)
    assert cli.main(["capacity-outage", "--config", path, "--out", str(out), "--workers", "2"]) == 0
    manifest = json.loads((tmp_path / "o.csv.manifest.json").read_text())
    again = parse(manifest)
    assert again.to_dict() == manifest
    assert again == parse(dict(SMALL_OUTAGE, output=str(out), workers=2))


def test_rerun_from_manifest_is_identical(tmp_path):
    out = tmp_path / "a.csv"
    cli.main(["sop", "--config", write_cfg(tmp_path, SMALL_SOP), "--out", str(out)])
    manifest = tmp_path / "a.csv.manifest.json"
    out2 = tmp_path / "b.csv"
    cli.main(["sop", "--config", str(manifest), "--out", str(out2)])
    assert out.read_bytes() == out2.read_bytes()


@pytest.mark.parametrize("experiment,cfg", [("capacity-outage", SMALL_OUTAGE), ("sop", SMALL_SOP)])
def test_worker_count_independent(tmp_path, experiment, cfg):
    outs = []
    for w in (1, 8):
        out = tmp_path / f"w{w}.csv"
        assert cli.main([experiment, "--config", write_cfg(tmp_path, cfg), "--workers", str(w),
                         "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_seed_changes_output(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    path = write_cfg(tmp_path, SMALL_OUTAGE)
    cli.main(["capacity-outage", "--config", path, "--out", str(a)])
    cli.main(["capacity-outage", "--config", path, "--seed", "4", "--out", str(b)])
    assert a.read_bytes() != b.read_bytes()


# ---------------------------------------------------------------- files and plots


def test_plot_writes_svg(tmp_path):
    pytest.importorskip("matplotlib")
    out = tmp_path / "p.csv"
    assert cli.main(["sop", "--config", write_cfg(tmp_path, SMALL_SOP), "--out", str(out), "--plot"]) == 0
    svg = (tmp_path / "p.svg").read_text()
    assert svg.lstrip().startswith("<?xml") and "<svg" in svg


def test_mask_and_table_files(tmp_path):
    (tmp_path / "mask.txt").write_text("# f_hz dBm/Hz\n-4e6 -40\n0 -60\n4e6 -40\n")
    (tmp_path / "doppler.txt").write_text("# nu_hz density\n-1000 0.0005\n1000 0.0005\n")
    cfg = dict(SMALL_SOP, model={"mask": {"file": "mask.txt"}, "doppler": {"kind": "tabulated", "file": "doppler.txt"}})
    out = tmp_path / "f.csv"
    assert cli.main(["sop", "--config", write_cfg(tmp_path, cfg), "--out", str(out)]) == 0
    rows = read_csv(out)
    assert len(rows) == 42
    manifest = json.loads((tmp_path / "f.csv.manifest.json").read_text())
    assert manifest["model"]["mask"]["file"] == str((tmp_path / "mask.txt").resolve())


def test_tabulated_pulse_file(tmp_path):
    (tmp_path / "pulse.txt").write_text("-1e6 0\n0 1e-6\n1e6 0\n")
    cfg = {"experiment": "psd", "seed": 0, "model": {"pulse": {"kind": "tabulated", "file": "pulse.txt"}},
           "sweep": {"axis": "f_hz", "values": [0.0, 5e5]}}
    out = tmp_path / "t.csv"
    assert cli.main(["psd", "--config", write_cfg(tmp_path, cfg), "--out", str(out)]) == 0
    rows = read_csv(out)
    assert float(rows[2][1]) == pytest.approx(0.01 * 0.5e-6)


def test_console_entry_point(tmp_path):
    out = tmp_path / "e.csv"
    proc = subprocess.run([sys.executable, "-m", "poissonfield.cli", "psd", "--seed", "1", "--out", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert read_csv(out)[0] == ["f_hz", "psd_w_per_hz"]
