import json

import pytest

from tree_quench.__main__ import main
from tree_quench.experiments import RunManifest
from tree_quench.gibbs import ModelParams, mu_plus_root
from tree_quench.run_config import RunConfig


def _quench_args(out, workers):
    return [
        "quench",
        "--seed", "7",
        "--beta", "1.0",
        "--p", "0.5",
        "--depth", "3",
        "--t-max", "1",
        "--checkpoints", "0,0.5,1",
        "--replicas", "6",
        "--workers", str(workers),
        "--out", str(out),
    ]  # fmt: skip


class TestRecursion:
    @staticmethod
    def test_prints_the_plus_root_magnetization(tmp_path, capsys):
        assert main(["recursion", "--seed", "1", "--beta", "1.0", "--out", str(tmp_path)]) == 0
        first = capsys.readouterr().out.splitlines()[0]
        assert first.startswith("Root magnetization at depth 8 with plus boundary: ")
        value = float(first.rsplit(" ", 1)[1])
        assert value == pytest.approx(mu_plus_root(ModelParams(1.0, 0.0, 2), 8), abs=1e-11)
        assert (tmp_path / "recursion.csv").exists()
        assert RunManifest.from_file(tmp_path / "recursion_manifest.json").verify(tmp_path)

    @staticmethod
    def test_config_file_with_overrides(tmp_path, capsys):
        config_path = RunConfig("recursion", seed=3, beta=0.5, depth=4).to_json(tmp_path / "config.json")
        out = tmp_path / "out"
        assert main(["recursion", "-c", str(config_path), "--beta", "1.5", "--out", str(out)]) == 0
        assert "at depth 4 " in capsys.readouterr().out
        with open(out / "recursion_manifest.json", encoding="utf-8") as file:
            spec = json.load(file)["spec"]
        assert spec["beta"] == 1.5
        assert spec["depth"] == 4
        assert spec["seed"] == 3

    @staticmethod
    def test_regime_with_margin(tmp_path):
        args = ["recursion", "--seed", "2", "--beta", "3", "--depth", "3", "--replicas", "4", "--out", str(tmp_path)]
        assert main([*args, "--regime", "c", "--margin", "0.5"]) == 0
        rows = (tmp_path / "weight_moment.csv").read_text().splitlines()
        assert rows[-1] == "bad_fraction,0.0,0.0"
        assert main([*args, "--regime", "b", "--margin", "1.0"]) == 2


class TestErrors:
    @staticmethod
    def test_seed_is_mandatory(tmp_path):
        with pytest.raises(SystemExit) as error:
            main(["recursion", "--out", str(tmp_path)])
        assert error.value.code == 2

    @staticmethod
    def test_no_command():
        assert main([]) == 2

    @staticmethod
    def test_invalid_parameters_return_usage_error(tmp_path, capsys):
        assert main(["contraction", "--seed", "1", "--beta", "2", "--out", str(tmp_path)]) == 2
        assert "contraction" in capsys.readouterr().err
        assert not (tmp_path / "contraction_manifest.json").exists()

    @staticmethod
    def test_unreadable_config(tmp_path):
        with pytest.raises(SystemExit) as error:
            main(["recursion", "-c", str(tmp_path / "missing.json")])
        assert error.value.code == 2

    @staticmethod
    def test_clear():
        assert main(["clear"]) == 0


class TestReproducibility:
    @staticmethod
    def test_identical_outputs_for_any_worker_count(tmp_path):
        assert main(_quench_args(tmp_path / "serial", 1)) == 0
        assert main(_quench_args(tmp_path / "parallel", 2)) == 0
        serial = (tmp_path / "serial" / "quench.csv").read_bytes()
        parallel = (tmp_path / "parallel" / "quench.csv").read_bytes()
        assert serial == parallel
        first = RunManifest.from_file(tmp_path / "serial" / "quench_manifest.json")
        second = RunManifest.from_file(tmp_path / "parallel" / "quench_manifest.json")
        assert first.outputs == second.outputs

    @staticmethod
    def test_phase_diagram(tmp_path):
        assert main(["phase-diagram", "--seed", "0", "--betas", "0.3,1,2", "--out", str(tmp_path)]) == 0
        lines = (tmp_path / "phase_diagram.csv").read_text().splitlines()
        assert lines[0].startswith("beta,h_c")
        assert len(lines) == 4


class TestRunConfig:
    @staticmethod
    def test_json_round_trip(tmp_path):
        config = RunConfig("quench", seed=5, p=0.7, checkpoints=[0, 1, 2], betas=[1])
        path = config.to_json(tmp_path / "run.json")
        assert RunConfig.from_json(path) == config
        assert RunConfig.from_json(path, command="hc-quench").command == "hc-quench"

    @staticmethod
    def test_overrides_skip_missing_values():
        config = RunConfig("quench", seed=5, beta=2.0).overridden({"beta": None, "p": 0.3})
        assert config.beta == 2.0
        assert config.p == 0.3

    @staticmethod
    def test_unknown_keys():
        with pytest.raises(ValueError):
            RunConfig.from_dict({"command": "quench", "temperature": 1.0})

    @staticmethod
    def test_experiment_fields_leave_out_execution_settings():
        fields = RunConfig("quench", seed=1, workers=4).experiment_fields()
        assert "workers" not in fields
        assert "out" not in fields
        assert fields["seed"] == 1
