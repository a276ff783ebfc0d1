import csv
import json
from pathlib import Path

import numpy as np
import pytest

from decobec import cli, runner
from decobec.config import apply_override, config_hash, strip_comments, validate_config
from decobec.errors import ConfigError

DEMO_CONFIGS = Path(__file__).resolve().parent.parent / "demos" / "configs"


def write(tmp_path, text, name="cfg.json"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_minimal_fig1a_gets_documented_defaults():
    cfg = validate_config('{"scenario": "fig1a"}')
    assert cfg.units.hbar == 1.0 and cfg.units.c == 1.0
    assert cfg.params.tolerance == 1e-10
    assert cfg.output.format == "csv"
    assert [e.values for e in cfg.sweep] == [[1e-3, 5e-3, 2e-2]]
    assert cfg.times.t_end == 100.0 and cfg.times.steps == 500


def test_zero_detuning_is_rejected_by_name():
    with pytest.raises(ConfigError) as info:
        validate_config('{"scenario": "fig1a", "pump": {"detuning": 0}}')
    assert any(p.startswith("pump.detuning") for p in info.value.problems)


def test_unknown_keys_are_rejected():
    with pytest.raises(ConfigError, match="omega0_typo"):
        validate_config('{"scenario": "fig1a", "pump": {"omega0_typo": 1}}')


def test_all_problems_reported_together():
    raw = ('{"scenario": "fig2", "geometry": {"kind": "single_well"}, '
           '"times": {"t_start": 5, "t_end": 1}, "sweep": [{"path": "pump.nope", "values": [1]}]}')
    with pytest.raises(ConfigError) as info:
        validate_config(raw)
    text = " ".join(info.value.problems)
    assert "t_end" in text and "pump.nope" in text and "geometry.kind" in text


def test_syntax_error_position_survives_comment_stripping():
    raw = '// a comment\n{\n  "scenario": "fig1a",\n}\n'
    with pytest.raises(ConfigError, match="line 4"):
        validate_config(raw)
    assert strip_comments('// x\n{}').splitlines() == ["", "{}"]


def test_hash_is_stable_and_ignores_output_location():
    a = validate_config('{"scenario": "fig1a", "output": {"directory": "x"}, "workers": 4}')
    b = validate_config('{"scenario": "fig1a"}')
    assert config_hash(a) == config_hash(b)
    c = validate_config('{"scenario": "fig1a", "pump": {"pump_frequency": 2}}')
    assert config_hash(c) != config_hash(b)


def test_override():
    cfg = validate_config('{"scenario": "fig1a"}')
    assert apply_override(cfg, "params.lam", 0.1).params.lam == 0.1
    with pytest.raises(ConfigError):
        apply_override(cfg, "pump.pump_frequency", -1.0)


def read_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


def test_fig1a_run_columns_and_ordering(tmp_path):
    cfg = validate_config('{"scenario": "fig1a", "times": {"t_end": 50, "steps": 101}}')
    manifest = runner.run(cfg, out_dir=tmp_path)
    header, data = read_csv(manifest.outputs[0])
    assert Path(manifest.outputs[0]).name == f"fig1a_{manifest.config_hash}.csv"
    assert data.shape[0] == 101
    assert header[0] == "t [time]"
    norms = [data[:, i] for i, h in enumerate(header) if h.startswith("abs_O")]
    assert len(norms) == 3
    assert np.all(norms[0][1:] > norms[1][1:]) and np.all(norms[1][1:] > norms[2][1:])
    saved = json.loads((tmp_path / "manifest.json").read_text())
    assert saved["config-hash"] == manifest.config_hash
    assert set(saved) >= {"config-hash", "artifact-version", "wall-time", "outputs"}


def test_invalid_sweep_value_is_a_config_error():
    with pytest.raises(ConfigError, match="sweep"):
        validate_config('{"scenario": "fig1b", '
                        '"sweep": [{"path": "pump.pump_frequency", "values": [1.0, -1.0]}]}')


def test_failed_sweep_point_is_marked(tmp_path):
    # the second grid reaches beyond the tabulated density
    raw = json.dumps({
        "scenario": "single_well",
        "density": {"kind": "tabulated", "samples": [[0.1, 1.0], [3.0, 0.5]]},
        "grid": {"n_radial": 8, "n_angular": 1},
        "params": {"max_sector": 1},
        "sweep": [{"path": "grid.k_max", "values": [2.0, 5.0]}],
        "times": {"t_end": 2, "steps": 3}})
    manifest = runner.run(validate_config(raw), out_dir=tmp_path)
    assert len(manifest.failures) == 1 and "grid.k_max=5.0" in manifest.failures[0]
    header, data = read_csv(manifest.outputs[0])
    failed = [data[0, i] for i, h in enumerate(header) if h.startswith("failed")]
    assert failed == [0.0, 1.0]
    assert sum(h.startswith("purity") for h in header) == 2
    assert np.all(np.isfinite(data))


def test_free_space_continuum_writes_sentinel(tmp_path):
    raw = json.dumps({"scenario": "single_well", "density": {"kind": "free_space"},
                      "params": {"method": "continuum", "max_sector": 1, "alpha": 0.5},
                      "times": {"t_start": 1, "t_end": 2, "steps": 2}})
    manifest = runner.run(validate_config(raw), out_dir=tmp_path)
    header, data = read_csv(manifest.outputs[0])
    assert np.all(data[:, header.index("abs_O_01 [1]")] == 0.0)
    assert np.all(data[:, header.index("diverged_01 [bool]")] == 1.0)


def test_json_output(tmp_path):
    cfg = validate_config('{"scenario": "fig1a", "times": {"t_end": 5, "steps": 3}}')
    manifest = runner.run(cfg, out_dir=tmp_path, fmt="json")
    payload = json.loads(Path(manifest.outputs[0]).read_text())
    assert len(payload["columns"]) == len(payload["data"])


def test_env_var_sets_default_directory(tmp_path, monkeypatch):
    monkeypatch.setenv(runner.OUTPUT_DIR_ENV, str(tmp_path / "env"))
    cfg = validate_config('{"scenario": "fig1a", "times": {"t_end": 5, "steps": 3}}')
    manifest = runner.run(cfg)
    assert Path(manifest.outputs[0]).parent == tmp_path / "env"


def test_cli_exit_codes(tmp_path, capsys):
    good = write(tmp_path, '{"scenario": "fig1a", "times": {"t_end": 5, "steps": 3}}')
    bad = write(tmp_path, '{"scenario": "fig1a", "pump": {"detuning": 0}}', "bad.json")
    assert cli.main(["validate", str(good)]) == cli.EXIT_OK
    assert cli.main(["validate", str(bad)]) == cli.EXIT_CONFIG
    assert cli.main(["validate", str(tmp_path / "missing.json")]) == cli.EXIT_CONFIG
    assert cli.main(["run", str(good), "--out", str(tmp_path / "o")]) == cli.EXIT_OK
    assert cli.main(["oracle-check", str(good)]) == cli.EXIT_CONFIG
    huge = write(tmp_path, json.dumps({
        "scenario": "oracle_check",
        "grid": {"kind": "explicit", "modes": [{"omega": 1.0, "coupling": 0.1}] * 3},
        "truncation": {"max_atoms": 2, "max_photons_per_mode": 40, "cap": 10000},
        "times": {"t_end": 1, "steps": 2}}), "huge.json")
    assert cli.main(["oracle-check", str(huge), "--out", str(tmp_path / "o")]) == cli.EXIT_RESOURCE
    assert "config error" in capsys.readouterr().err


def test_oracle_check_small_instance(tmp_path):
    code = cli.main(["oracle-check", str(DEMO_CONFIGS / "oracle_single.json"),
                     "--out", str(tmp_path)])
    assert code == cli.EXIT_OK
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["max-deviation"] < 1e-6


@pytest.mark.parametrize("name", sorted(p.name for p in DEMO_CONFIGS.glob("*.json")))
def test_demo_configs_validate(name):
    assert cli.main(["validate", str(DEMO_CONFIGS / name)]) == cli.EXIT_OK
