import json

import numpy as np
import pytest

from unlearn_forge import cli, data, models
from unlearn_forge.config import default_config, format_config, parse_config, parse_seeds
from unlearn_forge.errors import ConfigError
from unlearn_forge.modelio import load_model, save_model


class TestConfig:
    def test_defaults_complete(self):
        cfg = default_config()
        assert cfg["data.k"] == 3
        assert cfg["unlearn.lr"] == 0.01

    def test_parse_with_comments_and_overrides(self, tmp_path):
        p = tmp_path / "run.cfg"
        p.write_text("# comment\ndata.k = 4\ntrain.lr = 0.25  # inline\n\nseeds = 0..2\n")
        cfg = parse_config(p)
        assert cfg["data.k"] == 4
        assert cfg["train.lr"] == 0.25
        assert parse_seeds(cfg["seeds"]) == [0, 1, 2]

    def test_unknown_key_names_line(self, tmp_path):
        p = tmp_path / "bad.cfg"
        p.write_text("data.k = 3\nnot.a.key = 1\n")
        with pytest.raises(ConfigError, match="line 2"):
            parse_config(p)

    def test_bad_value_type(self, tmp_path):
        p = tmp_path / "bad.cfg"
        p.write_text("data.k = many\n")
        with pytest.raises(ConfigError, match="line 1"):
            parse_config(p)

    def test_missing_equals(self, tmp_path):
        p = tmp_path / "bad.cfg"
        p.write_text("data.k 3\n")
        with pytest.raises(ConfigError):
            parse_config(p)

    def test_seed_lists(self):
        assert parse_seeds("3") == [3]
        assert parse_seeds("0,1,5") == [0, 1, 5]
        assert parse_seeds("2..5") == [2, 3, 4, 5]
        with pytest.raises(ConfigError):
            parse_seeds("5..2")
        with pytest.raises(ConfigError):
            parse_seeds("a,b")

    def test_format_roundtrip(self, tmp_path):
        cfg = default_config()
        cfg["data.spread"] = 1.25
        p = tmp_path / "echo.cfg"
        p.write_text(format_config(cfg))
        assert parse_config(p) == cfg


class TestModelFile:
    def test_roundtrip_identical_probabilities(self, tmp_path, rng):
        m = models.init_model("logistic", 4, 3).with_theta(rng.standard_normal(15))
        path = tmp_path / "m.model"
        save_model(m, path)
        back = load_model(path)
        X = rng.standard_normal((6, 4))
        assert models.forward(back, X).tobytes() == models.forward(m, X).tobytes()
        assert back.theta.tobytes() == m.theta.tobytes()

    def test_bad_header(self, tmp_path):
        p = tmp_path / "x.model"
        p.write_text("something else\n")
        with pytest.raises(ConfigError):
            load_model(p)

    def test_truncated_params(self, tmp_path, rng):
        m = models.init_model("logistic", 2, 2)
        p = tmp_path / "t.model"
        save_model(m, p)
        lines = p.read_text().splitlines()
        p.write_text("\n".join(lines[:-2]) + "\n")
        with pytest.raises(ConfigError):
            load_model(p)


def write_cfg(tmp_path, extra=""):
    p = tmp_path / "run.cfg"
    p.write_text("data.per_class = 20\ndata.test_per_class = 20\ntrain.epochs = 15\n"
                 "unlearn.methods = retrain,ga,ugradsl_plus\nseeds = 0,1\n" + extra)
    return str(p)


class TestSubcommands:
    def test_gen_data_roundtrip(self, tmp_path):
        out = tmp_path / "ds.csv"
        code = cli.main(["gen-data", "--config", write_cfg(tmp_path), "--out", str(out)])
        assert code == 0
        ds = data.load_dataset(out)
        assert ds.n == 60 and ds.d == 5

    def test_gen_data_requires_out(self, tmp_path):
        assert cli.main(["gen-data", "--config", write_cfg(tmp_path)]) == 2

    def test_train_writes_model(self, tmp_path):
        out = tmp_path / "m.model"
        assert cli.main(["train", "--config", write_cfg(tmp_path), "--out", str(out)]) == 0
        m = load_model(out)
        assert m.kind == "logistic" and m.d == 5 and m.K == 3

    def test_unlearn_fragment(self, tmp_path, capsys):
        out = tmp_path / "u.model"
        code = cli.main(["unlearn", "--config", write_cfg(tmp_path), "--method", "ga",
                         "--out", str(out)])
        assert code == 0
        frag = json.loads(capsys.readouterr().out.strip())
        assert frag["method"] == "ga"
        assert set(frag) >= {"ua", "mia", "ra", "ta", "sum"}
        load_model(out)  # file exists and parses

    def test_benchmark_determinism_and_table(self, tmp_path, capsys):
        cfgp = write_cfg(tmp_path)
        r1 = tmp_path / "r1.json"
        r2 = tmp_path / "r2.json"
        assert cli.main(["benchmark", "--config", cfgp, "--format", "machine", "--out", str(r1)]) == 0
        assert cli.main(["benchmark", "--config", cfgp, "--format", "machine", "--out", str(r2)]) == 0
        assert r1.read_bytes() == r2.read_bytes()
        doc = json.loads(r1.read_text())
        assert doc["methods"] == ["retrain", "ga", "ugradsl_plus"]
        assert doc["seeds"] == [0, 1]
        assert "rte_seconds" not in doc
        assert doc["summary"]["ga"]["avg_gap"] is not None
        # table form prints a retrain row
        capsys.readouterr()
        assert cli.main(["benchmark", "--config", cfgp]) == 0
        table = capsys.readouterr().out
        assert "retrain" in table and "RTE" in table

    def test_benchmark_jobs_matches_serial(self, tmp_path):
        cfgp = write_cfg(tmp_path)
        r1 = tmp_path / "serial.json"
        r2 = tmp_path / "parallel.json"
        assert cli.main(["benchmark", "--config", cfgp, "--format", "machine", "--out", str(r1)]) == 0
        assert cli.main(["benchmark", "--config", cfgp, "--format", "machine", "--out", str(r2),
                         "--jobs", "2"]) == 0
        assert r1.read_bytes() == r2.read_bytes()

    def test_verify_theory(self, tmp_path, capsys):
        p = tmp_path / "t.cfg"
        p.write_text("theory.instances = 3\ntheory.alpha_grid_points = 51\n")
        out = tmp_path / "theory.json"
        assert cli.main(["verify-theory", "--config", str(p), "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["summary"]["count"] == 3
        assert len(doc["instances"]) == 3
        for row in doc["instances"]:
            assert row["dist_ga"] >= 0 and row["dist_noop"] >= 0

    def test_ldp_machine_output(self, capsys):
        code = cli.main(["ldp", "--k", "10", "--alpha", "-1", "--gamma1", "2", "--gamma2", "1",
                         "--format", "machine"])
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["epsilon"] == pytest.approx(0.0, abs=1e-12)

    def test_exit_codes(self, tmp_path, capsys):
        bad = tmp_path / "bad.cfg"
        bad.write_text("nope = 1\n")
        assert cli.main(["benchmark", "--config", str(bad)]) == 2
        assert cli.main(["ldp", "--k", "2", "--alpha", "-1", "--gamma1", "1", "--gamma2", "1"]) == 3

    def test_log_env_validation(self, monkeypatch):
        monkeypatch.setenv("UNLEARN_FORGE_LOG", "verbose")
        assert cli.main(["ldp", "--k", "10", "--alpha", "-1", "--gamma1", "2", "--gamma2", "1"]) == 2
