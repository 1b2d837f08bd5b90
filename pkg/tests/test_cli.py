import json
import os

import pytest

from koop import cli, list_gallery, run_scenario
from koop.config import ConfigError, DEFAULTS, load_config, merge_config, parse_function_spec
from koop.gallery import UnknownScenario

NAMES = {"koopman-derivation", "non-koopman-multiplier", "nilpotent-counterexample",
         "weighted-trotter-kato", "special-flow-sqrt", "sign-cocycle", "unbounded-A1",
         "winding-obstruction", "cocycle-calculus"}


def test_list_gallery_exact_set():
    names = [n for n, _ in list_gallery()]
    assert len(names) == 9 and set(names) == NAMES


def test_unknown_scenario_lists_names():
    with pytest.raises(UnknownScenario) as exc:
        run_scenario("nope")
    assert "koopman-derivation" in str(exc.value)


def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        merge_config({"bogus": 1})
    with pytest.raises(ConfigError):
        merge_config({"space": {"N": 64, "width": 3}})
    with pytest.raises(ConfigError):
        merge_config({"tolerances": {"made_up": 1.0}})


def test_config_validation():
    with pytest.raises(ConfigError):
        merge_config({"space": {"N": 8, "K": 4}})
    with pytest.raises(ConfigError):
        merge_config({"special_flow": {"a": 0.6}})
    with pytest.raises(ConfigError):
        merge_config({"suite": {"pair_band": 16}})
    with pytest.raises(ConfigError):
        merge_config({"probes": {"n_list": [8, 4]}})
    cfg = merge_config({"space": {"N": 128, "K": 30}})
    assert cfg["space"] == {"N": 128, "K": 30} and cfg["special_flow"] == DEFAULTS["special_flow"]


def test_function_specs(space):
    import numpy as np
    cos = parse_function_spec("cos", space)
    assert np.allclose(cos.samples, np.cos(space.points))
    f = parse_function_spec({"2": [0.0, 1.0]}, space)
    assert np.allclose(f.samples, 1j * np.exp(2j * space.points))
    with pytest.raises(ConfigError):
        parse_function_spec("tan", space)
    with pytest.raises(ConfigError):
        parse_function_spec({"40": 1.0}, space)


def test_load_config_file(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"cocycle": {"zeta": "icos"}}))
    assert load_config(str(p))["cocycle"]["zeta"] == "icos"
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(str(p))


def test_print_defaults(capsys):
    assert cli.main(["print-defaults"]) == 0
    a = capsys.readouterr().out
    assert cli.main(["--print-defaults"]) == 0
    assert capsys.readouterr().out == a
    assert json.loads(a)["space"] == {"N": 64, "K": 16}


def test_list_command(capsys):
    assert cli.main(["list"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert {l.split("\t")[0] for l in lines} == NAMES


def test_run_unknown_exit_code(tmp_path, capsys):
    assert cli.main(["run", "nope", "--out", str(tmp_path)]) == 2
    assert "valid:" in capsys.readouterr().err


def test_run_writes_outputs(tmp_path):
    assert cli.main(["run", "nilpotent-counterexample", "--out", str(tmp_path)]) == 0
    root = tmp_path / "nilpotent-counterexample"
    lines = (root / "verdicts.jsonl").read_text().splitlines()
    verdicts = [json.loads(l) for l in lines]
    assert [v["name"] for v in verdicts] == sorted(v["name"] for v in verdicts)
    for v in verdicts:
        assert set(v) == {"name", "pass", "residual", "threshold", "context"}
        assert v["pass"] == (v["residual"] <= v["threshold"])
    ns = next(v for v in verdicts if v["name"] == "weighted_nonsingular")
    assert ns["pass"] is False and ns["context"]["expected_pass"] is False
    inv = next(v for v in verdicts if v["name"] == "linf_invariance")
    assert inv["pass"] is True
    report = json.loads((root / "report.json").read_text())
    assert report["ok"] and report["config"] == json.loads(json.dumps(DEFAULTS))
    for rel in report["tables"].values():
        assert (root / rel).exists()
    assert "wall_clock_seconds" in json.loads((root / "timing.json").read_text())


def test_winding_report(tmp_path):
    assert cli.main(["run", "winding-obstruction", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "winding-obstruction" / "report.json").read_text())
    ob = report["artifacts"]["obstruction"]
    assert ob == {"mean_zeta": [1.0, 0.0], "nearest_integer_multiple": 0, "distance": 1.0}


def test_failing_verdict_sets_exit_code(tmp_path):
    cfgp = tmp_path / "c.json"
    cfgp.write_text(json.dumps({"tolerances": {"derivation": 0.0}}))
    assert cli.main(["run", "koopman-derivation", "--config", str(cfgp),
                     "--out", str(tmp_path / "o")]) == 1


def test_output_dir_from_config(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    cfgp = tmp_path / "c.json"
    cfgp.write_text(json.dumps({"output_dir": "elsewhere"}))
    assert cli.main(["run", "unbounded-A1", "--config", str(cfgp)]) == 0
    assert os.path.exists(tmp_path / "elsewhere" / "unbounded-A1" / "report.json")
