import json

import pytest

from biofet_mc.cli import main
from biofet_mc.sweep import from_csv


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestSubcommands:
    @pytest.mark.parametrize("cmd,metric", [("respond", "mu_I"), ("snr", "snr_db"), ("sep", "sep")])
    def test_defaults_all_valid(self, capsys, cmd, metric):
        code, out, _ = run(capsys, cmd)
        assert code == 0
        table = from_csv(out)
        assert metric in table.metrics and all(table.validity)

    def test_psd(self, capsys):
        code, out, _ = run(capsys, "psd", "--freq", "1:1000:4")
        assert code == 0
        assert out.splitlines()[0] == "param,value,S_I,S_IB,S_IF,validity"
        assert len(out.splitlines()) == 5

    def test_custom_sweep_json(self, capsys, tmp_path):
        out_path = tmp_path / "snr.json"
        code, out, _ = run(capsys, "snr", "--sweep", "medium.c_ion:log:1:300:5", "--format", "json",
                           "--out", str(out_path))
        assert code == 0 and out == ""
        doc = json.loads(out_path.read_text())
        assert doc["param"] == "medium.c_ion" and len(doc["rows"]) == 5

    def test_validate(self, capsys):
        code, out, _ = run(capsys, "validate", "--trials", "100000", "--seed", "11", "--workers", "2")
        assert code == 0
        records = [json.loads(line) for line in out.splitlines() if line.startswith("{")]
        assert len(records) == 7 and all(r["passed"] for r in records)
        assert {r["seed"] for r in records if r["name"].startswith("mc_")} == {11}

    def test_show_config_round_trip(self, capsys, tmp_path):
        cfg_path = tmp_path / "in.yaml"
        cfg_path.write_text("medium:\n  c_ion: 55\n")
        _, dumped, _ = run(capsys, "show-config", "--config", str(cfg_path))
        again = tmp_path / "again.yaml"
        again.write_text(dumped)
        _, a, _ = run(capsys, "snr", "--config", str(cfg_path))
        _, b, _ = run(capsys, "snr", "--config", str(again))
        assert a == b


class TestErrors:
    def test_bad_config(self, capsys, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("channel:\n  h_ch: -1\n")
        code, _, err = run(capsys, "snr", "--config", str(path))
        assert code == 2 and "channel.h_ch" in err

    def test_bad_metric(self, capsys):
        code, _, err = run(capsys, "snr", "--metrics", "volume")
        assert code == 2 and "volume" in err

    def test_bad_sweep(self, capsys):
        code, _, err = run(capsys, "respond", "--sweep", "channel.d:log:5:1:3")
        assert code == 2 and "lo < hi" in err
