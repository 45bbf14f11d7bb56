import json
import os
from pathlib import Path

import pytest

from cfthp import cli
from cfthp.config import ScenarioConfig, parse_bool
from cfthp.errors import EmptyResultError, InvalidArgumentError
from cfthp.output import CSV_COLUMNS, RunWriter, emit_plot_data, read_results_csv, read_series
from cfthp.sweep import SweepResult, SweepRow, run_csit_sweep, run_snr_sweep, sweep_points

SMALL = dict(n_aps=16, n_users=4, l_aps=4, cluster_max=2, n_outer=2, n_inner=2, seed=3,
             snr_grid_db=(0.0, 10.0), csit_grid=(0.0, 0.05),
             precoders=("ZF-NW", "cTHP-SP", "dTHP-RD"))


@pytest.fixture
def small():
    return ScenarioConfig(**SMALL)


def test_default_config_values():
    cfg = ScenarioConfig()
    assert (cfg.n_aps, cfg.n_users, cfg.l_aps, cfg.cluster_max) == (128, 24, 24, 10)
    assert cfg.side_m == 20000.0 and cfg.sigma_e2 == 0.01
    assert len(cfg.precoders) == 8


def test_config_text_round_trip(small):
    text = small.to_text()
    again = ScenarioConfig.from_text(text)
    assert again == small
    assert again.to_text() == text
    assert again.digest() == small.digest()


def test_config_partial_file_and_comments():
    cfg = ScenarioConfig.from_text("""
# desk run
[network]
n_aps = 32
n_users = 8
[clustering]
l_aps = 8
; full-line comments only
cluster_max = 4
""")
    assert (cfg.n_aps, cfg.n_users, cfg.l_aps, cfg.cluster_max) == (32, 8, 8, 4)
    assert cfg.seed == 0


@pytest.mark.parametrize("text", [
    "[network]\nnum_aps = 3\n",
    "[nonsense]\nx = 1\n",
    "[network]\nn_aps = many\n",
    "[precoding]\nprecoders = MF-RD\n",
    "[precoding]\nsquare_beta_d = maybe\n",
    "[clustering]\nl_aps = 500\n",
])
def test_config_rejects_bad_text(text):
    with pytest.raises(InvalidArgumentError):
        ScenarioConfig.from_text(text)


def test_digest_ignores_output_dir_but_not_seed(small):
    assert small.digest() == small.replace(output_dir="elsewhere").digest()
    assert small.digest() != small.replace(seed=4).digest()


def test_parse_bool():
    assert parse_bool("True") is True and parse_bool("0") is False
    with pytest.raises(InvalidArgumentError):
        parse_bool("2")


def test_sweep_points(small):
    assert sweep_points(small, "snr") == [(0.0, 0.0, 0.01), (10.0, 10.0, 0.01)]
    assert sweep_points(small, "csit") == [(0.0, 15.0, 0.0), (0.05, 15.0, 0.05)]


def test_workers_do_not_change_results(small, tmp_path):
    run_snr_sweep(small, workers=1, output_dir=tmp_path / "a")
    run_snr_sweep(small, workers=2, output_dir=tmp_path / "b")
    a = (tmp_path / "a" / "snr_sweep.csv").read_bytes()
    b = (tmp_path / "b" / "snr_sweep.csv").read_bytes()
    assert a == b
    for name in ("ZF-NW.dat", "cTHP-SP.dat", "dTHP-RD.dat"):
        assert (tmp_path / "a/series" / name).read_bytes() == (tmp_path / "b/series" / name).read_bytes()


def test_run_directory_contents(small, tmp_path):
    result = run_csit_sweep(small, output_dir=tmp_path)
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["status"] == "complete"
    assert manifest["seed"] == 3
    assert manifest["config_hash"] == small.digest()
    for f in manifest["files"]:
        assert (tmp_path / f).is_file()
    rows = read_results_csv(tmp_path / "csit_sweep.csv")
    assert len(rows) == 2 * 3
    assert rows[0]["sweep"] == "csit" and rows[0]["config_hash"] == small.digest()
    assert float(rows[0]["esr"]) == result.rows[0].esr
    assert ScenarioConfig.load(tmp_path / "config.ini") == small


def test_emit_plot_data_round_trip(tmp_path):
    rows = tuple(SweepRow(v, label, 10 * i + v, 0.1, 0.0)
                 for i, label in enumerate(("A-x", "B-y")) for v in (0.0, 5.0, 10.0))
    result = SweepResult("snr", rows, 1, "h", 2, 2)
    files = emit_plot_data(result, tmp_path / "series")
    assert [f.name for f in files] == ["A-x.dat", "B-y.dat"]
    assert read_series(files[1]) == [(0.0, 10.0, 0.1), (5.0, 15.0, 0.1), (10.0, 20.0, 0.1)]
    manifest = json.loads((tmp_path / "series" / "manifest.json").read_text())
    assert manifest["series"] == {"A-x": "A-x.dat", "B-y": "B-y.dat"}
    assert manifest["columns"] == ["sweep_value", "esr", "esr_stderr"]


def test_emit_plot_data_rejects_empty(tmp_path):
    with pytest.raises(EmptyResultError):
        emit_plot_data(SweepResult("snr", (), 0, "h", 1, 1), tmp_path)


@pytest.mark.skipif(os.geteuid() == 0, reason="root ignores directory permissions")
def test_unwritable_directory_fails_before_compute(small, tmp_path):
    locked = tmp_path / "locked"
    locked.mkdir(mode=0o500)
    with pytest.raises(OSError):
        run_snr_sweep(small, output_dir=locked / "run")


def test_output_path_under_a_file_fails_before_compute(small, tmp_path, monkeypatch):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    called = []
    monkeypatch.setattr("cfthp.sweep.run_sweep", lambda *a, **k: called.append(1))
    with pytest.raises(OSError):
        run_snr_sweep(small, output_dir=blocker / "run")
    assert not called


def test_manifest_stays_incomplete_when_run_fails(small, tmp_path, monkeypatch):
    def boom(*args, **kwargs):
        raise RuntimeError("interrupted")
    monkeypatch.setattr("cfthp.sweep.run_sweep", boom)
    with pytest.raises(RuntimeError):
        run_snr_sweep(small, output_dir=tmp_path)
    assert json.loads((tmp_path / "manifest.json").read_text())["status"] == "incomplete"
    assert not (tmp_path / "snr_sweep.csv").exists()


def test_writer_header(small, tmp_path):
    w = RunWriter(tmp_path, small, "snr")
    assert w.csv_path == Path(tmp_path) / "snr_sweep.csv"
    assert json.loads((tmp_path / "manifest.json").read_text())["csv_columns"] == list(CSV_COLUMNS)


def _write_config(path, cfg):
    path.write_text(cfg.to_text())
    return str(path)


def test_cli_snr_sweep(small, tmp_path, capsys):
    cfg = _write_config(tmp_path / "c.ini", small)
    out = tmp_path / "run"
    code = cli.main(["snr-sweep", "--config", cfg, "--out", str(out), "--seed", "9",
                     "--square-beta-d", "false", "--tau-mode", "consistent"])
    assert code == 0
    used = ScenarioConfig.load(out / "config.ini")
    assert used.seed == 9 and used.square_beta_d is False and used.tau_mode == "consistent"
    assert "cTHP-SP" in capsys.readouterr().out


def test_cli_show_config(capsys):
    assert cli.main(["show-config", "--seed", "5", "--beta-mode", "unit"]) == 0
    cfg = ScenarioConfig.from_text(capsys.readouterr().out)
    assert cfg.seed == 5 and cfg.beta_mode == "unit"


def test_cli_errors(tmp_path, capsys):
    assert cli.main(["snr-sweep", "--config", str(tmp_path / "missing.ini")]) == 2
    bad = tmp_path / "bad.ini"
    bad.write_text("[network]\nbogus = 1\n")
    assert cli.main(["csit-sweep", "--config", str(bad)]) == 2
    assert "bogus" in capsys.readouterr().err
    assert cli.main(["snr-sweep", "--workers", "0", "--out", str(tmp_path / "w")]) == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["snr-sweep", "--tau-mode", "other"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        cli.main(["snr-sweep", "--square-beta-d", "perhaps"])


def test_cli_selftest(capsys):
    assert cli.main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out


def test_shipped_desk_config_loads():
    cfg = ScenarioConfig.load(Path(__file__).parent.parent / "configs" / "desk.ini")
    assert (cfg.n_aps, cfg.n_users, cfg.l_aps, cfg.cluster_max) == (32, 8, 8, 4)
    assert cfg.csit_grid == (0.0, 0.01, 0.05, 0.1)
