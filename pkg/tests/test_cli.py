import json

import pytest

from heatflat.cli import main


def run(args):
    return main(args)


class TestCli:
    def test_loss_table(self, tmp_path, capsys):
        assert run(["loss-table", "--out", str(tmp_path), "--assert"]) == 0
        out = capsys.readouterr().out
        assert "loss-table: PASS" in out
        csv = (tmp_path / "loss_table.csv").read_text()
        assert csv.splitlines()[0] == "s,rho_s,Gamma_s,rho_mrr,sign"
        # s = 2 row carries 0.70711 and 0.832
        row2 = [l for l in csv.splitlines() if l.startswith("2,")][0]
        assert "0.7071067811865" in row2
        assert "0.83198" in row2

    def test_byte_identical_rerun(self, tmp_path):
        run(["loss-table", "--out", str(tmp_path / "a")])
        run(["loss-table", "--out", str(tmp_path / "b")])
        assert (tmp_path / "a" / "loss_table.csv").read_bytes() == \
               (tmp_path / "b" / "loss_table.csv").read_bytes()

    def test_kernel_check_with_config(self, tmp_path, capsys):
        cfgp = tmp_path / "cfg.json"
        cfgp.write_text(json.dumps({"schema": 1, "n_points": 50}))
        assert run(["kernel-check", "--config", str(cfgp), "--out", str(tmp_path),
                    "--assert"]) == 0
        rows = (tmp_path / "kernel_check.csv").read_text().splitlines()
        assert len(rows) == 51

    def test_kernel_check_rerun_identical(self, tmp_path):
        run(["kernel-check", "--out", str(tmp_path / "a")])
        run(["kernel-check", "--out", str(tmp_path / "b")])
        assert (tmp_path / "a" / "kernel_check.csv").read_bytes() == \
               (tmp_path / "b" / "kernel_check.csv").read_bytes()

    def test_track_zero_target(self, tmp_path, capsys):
        cfgp = tmp_path / "cfg.json"
        cfgp.write_text(json.dumps({"schema": 1, "target": "zero", "K_low": 0}))
        assert run(["track", "--config", str(cfgp), "--out", str(tmp_path),
                    "--assert"]) == 0
        assert "track: PASS" in capsys.readouterr().out

    def test_unknown_key_rejected(self, tmp_path):
        cfgp = tmp_path / "cfg.json"
        cfgp.write_text(json.dumps({"schema": 1, "bogus": 5}))
        with pytest.raises(SystemExit):
            run(["loss-table", "--config", str(cfgp), "--out", str(tmp_path)])

    def test_missing_schema_rejected(self, tmp_path):
        cfgp = tmp_path / "cfg.json"
        cfgp.write_text(json.dumps({"s_grid": [2.0]}))
        with pytest.raises(SystemExit):
            run(["loss-table", "--config", str(cfgp), "--out", str(tmp_path)])

    def test_unknown_subcommand(self):
        with pytest.raises(SystemExit):
            run(["frobnicate"])

    def test_assert_failure_exit_code(self, tmp_path, capsys):
        cfgp = tmp_path / "cfg.json"
        # unattainable threshold forces a FAIL and nonzero exit under --assert
        cfgp.write_text(json.dumps({"schema": 1, "threshold": 1e-30}))
        assert run(["kernel-check", "--config", str(cfgp), "--out", str(tmp_path),
                    "--assert"]) == 1
        assert "FAIL" in capsys.readouterr().out

    def test_seed_flag_accepted(self, tmp_path):
        assert run(["loss-table", "--out", str(tmp_path), "--seed", "42"]) == 0
