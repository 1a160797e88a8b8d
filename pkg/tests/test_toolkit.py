import filecmp
from pathlib import Path

import numpy as np
import pytest

from photonshape.cli import main
from photonshape.config import build_run_config, load_samples, parse_config
from photonshape.errors import ConfigError
from photonshape.pipelines import read_csv, run, write_csv

GOLDEN = Path(__file__).parent / "golden"

GOOD_ROUNDTRIP = """
[model]
rabi = 2.0
gamma_rad = 0.9

[grid]
horizon = 200
steps = 1024

[target]
kind = double_gaussian
eta_target = 0.895
"""

GOOD_FORWARD = """
[model]
rabi = 1.0

[grid]
horizon = 80
steps = 1024

[pump]
kind = gaussian
amplitude = 0.5
center = 15
width = 4
"""


def test_parse_good_roundtrip_config():
    config = parse_config(GOOD_ROUNDTRIP, "roundtrip")
    assert config.params.rabi == 2.0
    assert config.params.gamma_rad == 0.9
    assert config.grid.steps == 1024
    assert config.target.eta_target == 0.895
    assert config.pump is None


def test_parse_good_forward_config():
    config = parse_config(GOOD_FORWARD, "forward")
    assert config.pump.kind == "gaussian"
    assert config.pump.amplitude == 0.5


def test_steps_override():
    config = parse_config(GOOD_ROUNDTRIP, "roundtrip", steps_override=512)
    assert config.grid.steps == 512


MALFORMED = [
    # (document, mode, expected key path fragment)
    ("[bogus]\nx = 1\n" + GOOD_FORWARD, "forward", "bogus"),
    (GOOD_FORWARD.replace("[model]", "[model]\nlifetime = 3"), "forward", "model.lifetime"),
    (GOOD_FORWARD.replace("rabi = 1.0", "frequency = 1.0"), "forward", "model.frequency"),
    (GOOD_FORWARD.replace("rabi = 1.0", ""), "forward", "model.rabi"),
    (GOOD_FORWARD.replace("steps = 1024", ""), "forward", "grid.steps"),
    (GOOD_FORWARD.replace("steps = 1024", "steps = many"), "forward", "grid.steps"),
    (GOOD_FORWARD.replace("steps = 1024", "steps = -4"), "forward", "grid"),
    (GOOD_FORWARD.replace("horizon = 80", "horizon = -80"), "forward", "grid"),
    (GOOD_FORWARD.replace("rabi = 1.0", "rabi = 1.0\ngamma_rad = 2.0"), "forward", "model"),
    (GOOD_ROUNDTRIP + "\n[pump]\nkind = constant\namplitude = 1\n", "roundtrip", "pump"),
    (GOOD_ROUNDTRIP.replace("[target]", "[output]\ndir = x\n\n[target]"), "forward", "target"),
    ("[model]\nrabi = 1.0\n\n[grid]\nhorizon = 80\nsteps = 64\n", "forward", "pump"),
    (GOOD_FORWARD.replace("kind = gaussian", "kind = sawtooth"), "forward", "pump.kind"),
    (GOOD_FORWARD.replace("amplitude = 0.5", ""), "forward", "pump.amplitude"),
    (GOOD_FORWARD.replace("kind = gaussian", "kind = sampled"), "forward", "pump.file"),
    (GOOD_ROUNDTRIP.replace("steps = 1024", ""), "roundtrip", "grid.steps"),
    (GOOD_ROUNDTRIP.replace("eta_target = 0.895", "eta_target = -1"), "roundtrip", "target"),
    (GOOD_ROUNDTRIP.replace("kind = double_gaussian", "kind = chirp"), "roundtrip", "target"),
    ("[model]\nrabi = 2.0\n\n[grid]\nhorizon = 200\nsteps = 512\n", "roundtrip", "target"),
    (GOOD_FORWARD.replace("rabi = 1.0", "rabi = 1.0\ncoupling = varying"), "forward", "model.coupling"),
    ("rabi = 1.0\n", "forward", "document"),
]


@pytest.mark.parametrize("doc,mode,fragment", MALFORMED)
def test_malformed_config_rejected_with_key_path(doc, mode, fragment):
    with pytest.raises(ConfigError) as exc:
        parse_config(doc, mode)
    assert fragment in exc.value.path


def test_unknown_mode_rejected():
    with pytest.raises(ConfigError):
        build_run_config("analyze", {})


def test_load_samples_two_and_three_columns(tmp_path):
    t = np.linspace(0.0, 1.0, 11)
    p2 = tmp_path / "two.dat"
    np.savetxt(p2, np.column_stack([t, np.sin(t)]))
    sig = load_samples(p2)
    assert np.allclose(sig.values.imag, 0.0)
    p3 = tmp_path / "three.dat"
    np.savetxt(p3, np.column_stack([t, np.sin(t), np.cos(t)]))
    sig = load_samples(p3)
    assert np.allclose(sig.values, np.sin(t) + 1j * np.cos(t))


def test_load_samples_rejects_nonuniform_grid(tmp_path):
    p = tmp_path / "bad.dat"
    np.savetxt(p, np.column_stack([[0.0, 0.1, 0.5, 1.0], np.ones(4)]))
    with pytest.raises(ConfigError):
        load_samples(p)


def test_load_samples_rejects_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_samples(tmp_path / "absent.dat")


def test_csv_roundtrip_full_precision(tmp_path):
    rng = np.random.default_rng(7)
    a = rng.standard_normal(50)
    b = rng.standard_normal(50)
    path = tmp_path / "x.csv"
    write_csv(path, ["a", "b"], [a, b])
    header, data = read_csv(path)
    assert header == ["a", "b"]
    assert np.array_equal(data[:, 0], a)
    assert np.array_equal(data[:, 1], b)


def test_forward_pipeline_writes_artifacts(tmp_path):
    config = parse_config(GOOD_FORWARD, "forward", outdir_override=str(tmp_path))
    summary, artifacts = run(config)
    assert 0.0 < summary["efficiency"] <= 1.0
    assert set(artifacts) == {"amplitudes", "envelope"}
    for path in artifacts.values():
        assert Path(path).exists()


def test_forward_with_sampled_pump(tmp_path):
    t = np.linspace(0.0, 80.0, 81)
    np.savetxt(tmp_path / "pump.dat", np.column_stack([t, 0.5 * np.exp(-((t - 15) ** 2) / 16)]))
    doc = GOOD_FORWARD.replace(
        "kind = gaussian\namplitude = 0.5\ncenter = 15\nwidth = 4",
        "kind = sampled\nfile = pump.dat",
    )
    config = parse_config(doc, "forward", base_dir=tmp_path, outdir_override=str(tmp_path / "out"))
    summary, _ = run(config)
    assert summary["efficiency"] > 0.1


def test_validate_pipeline_reports_issues():
    doc = GOOD_ROUNDTRIP.replace("horizon = 200", "horizon = 30").replace(
        "kind = double_gaussian", "kind = double_gaussian\ncenter1 = 26\ncenter2 = 28\nwidth = 0.05"
    )
    config = parse_config(doc, "validate")
    summary, _ = run(config)
    assert summary["ok"] is False
    assert summary["issues"]


def test_cli_roundtrip_exit_zero(tmp_path, capsys):
    cfg = tmp_path / "rt.ini"
    cfg.write_text(GOOD_ROUNDTRIP)
    code = main(["roundtrip", "--config", str(cfg), "--out", str(tmp_path / "out")])
    assert code == 0
    out = capsys.readouterr().out
    assert '"fidelity"' in out
    assert (tmp_path / "out" / "pump.csv").exists()


def test_cli_bad_config_exit_one(tmp_path, capsys):
    cfg = tmp_path / "bad.ini"
    cfg.write_text(GOOD_FORWARD.replace("rabi = 1.0", "spin = 1.0"))
    assert main(["forward", "--config", str(cfg)]) == 1


def test_cli_missing_config_exit_one(tmp_path):
    assert main(["forward", "--config", str(tmp_path / "none.ini")]) == 1


def test_cli_failed_validation_exit_one(tmp_path, capsys):
    cfg = tmp_path / "v.ini"
    cfg.write_text(GOOD_ROUNDTRIP.replace("horizon = 200", "horizon = 45").replace(
        "kind = double_gaussian", "kind = double_gaussian\ncenter1 = 15\ncenter2 = 30\nwidth = 5"
    ))
    assert main(["validate", "--config", str(cfg)]) == 1


def test_cli_unreachable_target_exit_two(tmp_path, capsys):
    cfg = tmp_path / "hot.ini"
    cfg.write_text(GOOD_ROUNDTRIP.replace("eta_target = 0.895", "eta_target = 0.95"))
    assert main(["roundtrip", "--config", str(cfg)]) == 2


def test_figure_csvs_byte_stable(tmp_path):
    cfg = tmp_path / "fig.ini"
    cfg.write_text(GOOD_ROUNDTRIP)
    code = main(["figures", "--config", str(cfg), "--out", str(tmp_path / "out"), "--steps", "1024"])
    assert code == 0
    for name in ("fig5a.csv", "fig5b.csv"):
        assert filecmp.cmp(tmp_path / "out" / name, GOLDEN / name, shallow=False), name
