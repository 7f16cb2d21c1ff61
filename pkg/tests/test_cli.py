import csv
import dataclasses
import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from cubicmars.arms import ArmsParams
from cubicmars.cli import PRESETS, HlRule, RunConfig, emit_svg, main, parse_h_multiple, parse_number
from cubicmars.driver import initial_state
from cubicmars.errors import ConfigError
from cubicmars.metrics import sample_boundary
from cubicmars.scenes import get_scene


def _read(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_parse_helpers():
    assert parse_number("1/32") == 1 / 32
    assert parse_number("2^-5") == 1 / 32
    assert parse_number("0.125") == 0.125
    assert parse_h_multiple("0.2h") == (0.2, 1.0)
    assert parse_h_multiple("h/8") == (0.125, 1.0)
    assert parse_h_multiple("0.8h^1.5") == (0.8, 1.5)
    assert parse_h_multiple("0.2*h^(3/2)") == (0.2, 1.5)
    with pytest.raises(ConfigError):
        parse_number("abc")
    with pytest.raises(ConfigError):
        parse_h_multiple("0.2")


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_presets_validate_and_round_trip(name):
    cfg = PRESETS[name]
    cfg.validate()
    assert RunConfig.loads(cfg.dumps()) == cfg
    assert json.loads(cfg.dumps()) == cfg.to_dict()


def test_invalid_config_messages():
    with pytest.raises(ConfigError, match="r_tiny"):
        dataclasses.replace(RunConfig(), r_tiny=0.5).validate()
    with pytest.raises(ConfigError, match="h"):
        dataclasses.replace(RunConfig(), h=(0.3,)).validate()
    with pytest.raises(ConfigError, match="order"):
        dataclasses.replace(RunConfig(), order=5).validate()


def test_hl_rule_values():
    assert HlRule(0.8, 1.5).value(1 / 16) == pytest.approx(0.8 / 64)
    spec = HlRule(0.2, 1.0, True, 1e-5, 0.2, 0.01).spec(1 / 32)
    assert spec.hl_c == pytest.approx(0.2 / 32)


def test_invalid_arguments_exit_with_status_2(capsys):
    assert main(["run", "--preset", "identity", "--rtiny", "0.5", "--out", "unused"]) == 2
    assert "r_tiny" in capsys.readouterr().err
    assert main(["run", "--preset", "identity", "--h", "0.3", "--out", "unused"]) == 2


def test_module_entry_point_reports_errors(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "cubicmars", "run", "--scene", "no_such_scene", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 2
    assert "scene" in proc.stderr


def test_list(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    assert "vortex_T4" in out and "quartered_disk" in out


def test_empty_svg(tmp_path):
    path = tmp_path / "empty.svg"
    emit_svg([], path)
    root = ET.parse(path).getroot()
    assert root.tag.endswith("svg")
    assert not root.findall(".//{http://www.w3.org/2000/svg}path")


def test_quartered_disk_svg_has_four_regions(tmp_path):
    scene = get_scene("quartered_disk")
    state = initial_state(scene, ArmsParams(0.05, 0.01))
    path = tmp_path / "q.svg"
    emit_svg(sample_boundary(state, 0.002), path, bounded=[True] * 4 + [False])
    paths = ET.parse(path).getroot().findall(".//{http://www.w3.org/2000/svg}path")
    assert len(paths) == 4


def _run_vortex(out):
    return main(["run", "--preset", "vortex_T4", "--T", "0.5", "--h", "1/16", "--snapshot", "0.25",
                 "--out", str(out)])


def test_run_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert _run_vortex(a) == 0
    assert _run_vortex(b) == 0
    for name in ("errors.csv", "rates.csv", "diagnostics.csv", "snapshot_h16_t0.25.svg"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    ca, cb = (json.loads((d / "config.json").read_text()) for d in (a, b))
    assert {**ca, "out": None} == {**cb, "out": None}
    rows = _read(a / "errors.csv")
    assert rows[0] == ["h", "Q0", "Q1", "Q2", "Q3", "outside", "total"]
    assert len(rows) == 2 and float(rows[1][0]) == 1 / 16
    diag = _read(a / "diagnostics.csv")
    assert diag[0] == ["h", "step", "t", "n_added", "n_removed", "n_markers", "length", "mu_variation"]
    assert len(diag) == 1 + 64
    cfg = RunConfig.loads((a / "config.json").read_text())
    assert cfg.T == 0.5 and cfg.h == (1 / 16,)


def test_identity_preset_floor(tmp_path):
    assert main(["run", "--preset", "identity", "--out", str(tmp_path)]) == 0
    total = float(_read(tmp_path / "errors.csv")[1][-1])
    assert total <= 1e-10


def test_sweep_writes_rates(tmp_path):
    assert main(["sweep", "--preset", "identity", "--h", "1/8,1/16", "--T", "1/8", "--out", str(tmp_path)]) == 0
    rates = _read(tmp_path / "rates.csv")
    assert rates[0][:2] == ["h_coarse", "h_fine"]
    assert len(rates) == 2


def test_config_file_overrides(tmp_path):
    cfg = dataclasses.replace(PRESETS["identity"], T=0.125, h=(1 / 8,), out=str(tmp_path / "o"))
    path = tmp_path / "cfg.json"
    path.write_text(cfg.dumps())
    assert main(["run", "--config", str(path)]) == 0
    assert RunConfig.loads((tmp_path / "o" / "config.json").read_text()) == cfg
