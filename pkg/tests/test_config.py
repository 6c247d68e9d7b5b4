import json

import pytest

from rydspec.config import PRESETS, ExperimentConfig
from rydspec.errors import ConfigError
from rydspec.hamiltonian import DriveParams

MIN = {"geometry": {"family": "tetra_to_square", "value": 1.0}}


def test_defaults_materialized():
    cfg = ExperimentConfig.from_dict(MIN)
    d = cfg.data
    assert d["drive"] == {"omega_MHz": 1.0, "r_b_um": 10.0, "c6": None, "detuning_MHz": 0.0}
    assert d["grid"] == {"t_max_us": 5.0, "dt_us": 0.1}
    assert d["geometry"]["d_um"] == 8.0
    assert d["model"] == "pxp" and d["noise"] is None and d["seed"] == 0
    assert cfg.drive().blockade_radius == pytest.approx(10.0)


def test_noise_defaults_filled():
    cfg = ExperimentConfig.from_dict(dict(MIN, noise={"gamma_phi": 0.2}))
    n = cfg.noise()
    assert n.gamma_phi == 0.2 and n.n_shots == 150 and n.eps_det_1to0 == 0.05


@pytest.mark.parametrize("raw, where", [
    (dict(MIN, colour="red"), "config"),
    ({"geometry": {"family": "tetra_to_square", "value": 1.0, "zeta": 2}}, "geometry"),
    (dict(MIN, drive={"omega": 1.0}), "drive"),
    (dict(MIN, noise={"gamma": 0.1}), "noise"),
    (dict(MIN, grid={"t_max": 5}), "grid"),
])
def test_unknown_keys(raw, where):
    with pytest.raises(ConfigError, match=where):
        ExperimentConfig.from_dict(raw)


@pytest.mark.parametrize("raw, field", [
    ({}, "geometry"),
    ({"geometry": {"family": "tetra_to_square", "value": 3.0}}, "geometry.value"),
    ({"geometry": {"family": "wiggle", "value": 0.0}}, "family"),
    (dict(MIN, model="exact"), "model"),
    (dict(MIN, drive={"omega_MHz": -1}), "drive.omega_MHz"),
    (dict(MIN, grid={"dt_us": 1.0, "t_max_us": 2.0}), "grid"),
    (dict(MIN, analysis={"window": "kaiser"}), "analysis.window"),
    (dict(MIN, analysis={"zero_pad_factor": 0}), "analysis.zero_pad_factor"),
    (dict(MIN, seed=-1), "seed"),
    (dict(MIN, noise={"eps_prep": 2.0}), "eps_prep"),
    (dict(MIN, output={"formats": ["png"]}), "output.formats"),
])
def test_field_diagnostics(raw, field):
    with pytest.raises(ConfigError, match=field.replace(".", r"\.")):
        ExperimentConfig.from_dict(raw)


def test_malformed_json_position():
    with pytest.raises(ConfigError, match="line 2 column"):
        ExperimentConfig.from_json('{"geometry":\n  {,}}')


def test_explicit_atoms():
    raw = {"geometry": {"atoms": [{"label": 1, "xyz_um": [0, 0, 0]}, {"label": 2, "xyz_um": [8, 0, 1]}]},
           "model": "full"}
    arr = ExperimentConfig.from_dict(raw).arrangement()
    assert arr.n_atoms == 2 and arr.positions[1, 2] == 1.0
    raw["geometry"]["atoms"][1]["xyz_um"] = [8, 0]
    with pytest.raises(ConfigError, match=r"atoms\[1\]\.xyz_um"):
        ExperimentConfig.from_dict(raw)
    raw["geometry"]["atoms"][1] = {"label": 3, "xyz_um": [8, 0, 0]}
    with pytest.raises(ConfigError, match="labels"):
        ExperimentConfig.from_dict(raw)


def test_c6_overrides_radius():
    cfg = ExperimentConfig.from_dict(dict(MIN, drive={"c6": 1234.0}))
    assert cfg.drive().c6 == 1234.0
    assert cfg.data["drive"]["r_b_um"] is None


def test_hash_ignores_output():
    a = ExperimentConfig.from_dict(MIN)
    b = ExperimentConfig.from_dict(dict(MIN, output={"directory": "elsewhere"}))
    c = ExperimentConfig.from_dict(dict(MIN, seed=4))
    assert a.sha256() == b.sha256() != c.sha256()


def test_echo_roundtrip():
    cfg = ExperimentConfig.from_preset("hexagon-0.75d")
    again = ExperimentConfig.from_json(cfg.to_json())
    assert again.data == cfg.data


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_presets_build(name):
    arr, drive, grid, noise, opts = ExperimentConfig.from_preset(name).build()
    assert isinstance(drive, DriveParams) and noise is None and grid.n_samples == 51


def test_preset_models():
    models = {n: ExperimentConfig.from_preset(n).model for n in PRESETS}
    assert models["triangle-60"] == "pxp"
    assert models["hexagon-0.75d"] == "full"
    hexd = ExperimentConfig.from_preset("hexagon-0").drive()
    assert hexd.blockade_radius == pytest.approx(11.0)


def test_unknown_preset():
    with pytest.raises(ConfigError, match="available"):
        ExperimentConfig.from_preset("pentagon")


def test_family_alias():
    cfg = ExperimentConfig.from_dict({"geometry": {"family": "star-to-tetra", "value": 0.2}})
    assert cfg.data["geometry"]["family"] == "star_to_tetrahedron"
    json.loads(cfg.to_json())
