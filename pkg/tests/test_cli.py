import json
from pathlib import Path

import numpy as np
import pytest

import jsonschema
from referencing import Registry, Resource

from steerkit import cli

SCHEMA_DIR = Path(cli.__file__).parent / "schemas"


def make_validator(schema_name: str) -> jsonschema.Draft202012Validator:
    resources = []
    for path in SCHEMA_DIR.glob("*.json"):
        with open(path) as fh:
            resources.append((path.name, Resource.from_contents(json.load(fh))))
    registry = Registry().with_resources(resources)
    with open(SCHEMA_DIR / schema_name) as fh:
        schema = json.load(fh)
    return jsonschema.Draft202012Validator(schema, registry=registry)


def load(path: Path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def test_ellipsoid_command(tmp_path):
    out = tmp_path / "o"
    assert cli.main(["ellipsoid", "--family", "90", "45", "--out", str(out)]) == 0
    payload = load(out / "ellipsoid.json")
    make_validator("ellipsoid_report.schema.json").validate(payload)
    assert payload["ellipsoids"]["B|A"]["volume"] == pytest.approx(0.25, abs=5e-5)
    assert payload["ellipsoids"]["C|A"]["volume"] == pytest.approx(0.25, abs=5e-5)


def test_ellipsoid_two_qubit_unit_sphere(tmp_path):
    out = tmp_path / "o"
    assert cli.main(["ellipsoid", "--two-qubit", "45", "--out", str(out)]) == 0
    payload = load(out / "ellipsoid.json")
    ell = payload["ellipsoids"]["B|A"]
    assert ell["volume"] == pytest.approx(1.0, abs=1e-9)
    assert np.allclose(ell["semiaxes"], 1.0)


def test_ellipsoid_mixed_w(tmp_path):
    out = tmp_path / "o"
    assert cli.main(["ellipsoid", "--mixed-w", "--out", str(out)]) == 0
    payload = load(out / "ellipsoid.json")
    assert payload["ellipsoids"]["B|A"]["volume"] == pytest.approx(8 / 27, abs=5e-5)
    assert payload["ellipsoids"]["C|A"]["volume"] == pytest.approx(8 / 27, abs=5e-5)


def test_missing_state_is_config_error(tmp_path):
    assert cli.main(["ellipsoid", "--out", str(tmp_path)]) == cli.EXIT_CONFIG


def test_simulate_row_d(tmp_path):
    out = tmp_path / "o"
    rc = cli.main(["simulate", "--family", "90", "45", "--seed", "1",
                   "--directions", "400", "--events", "50000", "--out", str(out)])
    assert rc == 0
    summary = load(out / "summary.json")
    for party in ("B", "C"):
        assert summary["fits"][party]["r_squared"] > 0.995
        assert abs(summary["fits"][party]["fitted_volume"] - 0.25) < 0.01
        fit_payload = load(out / f"fit_{party}.json")
        make_validator("fit_report.schema.json").validate(fit_payload)
        cloud = (out / f"cloud_{party}.csv").read_text().splitlines()
        assert cloud[0] == ",".join(cli.CLOUD_HEADER)
        assert len(cloud) == 401
    make_validator("monogamy_report.schema.json").validate(load(out / "monogamy.json"))


def test_simulate_deterministic_outputs(tmp_path):
    args = ["simulate", "--mixed-w", "--seed", "7", "--directions", "50",
            "--events", "5000"]
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert cli.main(args + ["--out", str(out1)]) == 0
    assert cli.main(args + ["--out", str(out2)]) == 0
    for name in ("cloud_B.csv", "cloud_C.csv", "fit_B.json", "monogamy.json",
                 "summary.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_simulate_from_config_file(tmp_path):
    cfg = {
        "state": {"kind": "family", "alpha": np.pi / 2, "beta": np.pi / 4},
        "scheme": "uniform",
        "directions": 30,
        "events": 2000,
        "seed": 5,
        "noise": 0.01,
    }
    make_validator("experiment_config.schema.json").validate(cfg)
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "o"
    assert cli.main(["simulate", "--config", str(cfg_path), "--out", str(out)]) == 0
    assert (out / "summary.json").exists()


def test_fit_command_roundtrip(tmp_path):
    out = tmp_path / "sim"
    cli.main(["simulate", "--bell-diagonal", "0.6", "0.1", "0.1", "0.2",
              "--seed", "3", "--directions", "200", "--events", "50000",
              "--out", str(out)])
    out2 = tmp_path / "fit"
    rc = cli.main(["fit", str(out / "cloud_B.csv"), "--out", str(out2)])
    assert rc == 0
    payload = load(out2 / "fit.json")
    make_validator("fit_report.schema.json").validate(payload)
    assert payload["recovered"]["volume"] == pytest.approx(0.096, abs=0.01)


def test_fit_command_degenerate_cloud(tmp_path):
    path = tmp_path / "cloud.csv"
    lines = ["x,y,z"] + ["0.1,0.2,0.3"] * 30
    path.write_text("\n".join(lines) + "\n")
    out = tmp_path / "o"
    assert cli.main(["fit", str(path), "--out", str(out)]) == cli.EXIT_DEGENERATE
    assert load(out / "fit.json")["verdict"] == "point"


def test_fit_command_missing_file(tmp_path):
    assert cli.main(["fit", str(tmp_path / "nope.csv"),
                     "--out", str(tmp_path)]) == cli.EXIT_IO


def test_monogamy_command(tmp_path):
    out = tmp_path / "o"
    assert cli.main(["monogamy", "--mixed-w", "--out", str(out)]) == 0
    payload = load(out / "monogamy.json")
    make_validator("monogamy_report.schema.json").validate(payload)
    assert payload["classification"] == "pure-violating-mixed-state"


def test_monogamy_sweep(tmp_path):
    out = tmp_path / "o"
    assert cli.main(["monogamy", "--sweep", "4", "--out", str(out)]) == 0
    lines = (out / "monogamy_sweep.csv").read_text().splitlines()
    assert lines[0] == "alpha,beta,v_ba,v_ca,pure_residual,mixed_residual"
    assert len(lines) == 17


def test_table_s1_theory(tmp_path):
    out = tmp_path / "o"
    assert cli.main(["table-s1", "--out", str(out)]) == 0
    lines = (out / "table_s1.csv").read_text().splitlines()
    assert len(lines) == 13
    rows = {line.split(",")[0]: line.split(",") for line in lines[1:]}
    assert float(rows["b"][3]) == pytest.approx(0.0944, abs=5e-5)
    assert float(rows["b"][4]) == pytest.approx(0.4800, abs=5e-5)
    assert float(rows["k"][3]) == pytest.approx(0.1875, abs=5e-5)
    assert float(rows["h"][3]) == pytest.approx(0.0, abs=5e-5)
    assert float(rows["h"][4]) == pytest.approx(0.0, abs=5e-5)
    assert float(rows["l"][3]) == pytest.approx(0.2963, abs=5e-5)


def test_icosahedron_robustness_small(tmp_path):
    out = tmp_path / "o"
    rc = cli.main(["icosahedron-robustness", "--runs", "4", "--events", "100000",
                   "--seed", "2", "--out", str(out)])
    assert rc == 0
    summary = load(out / "icosahedron_summary.json")
    assert abs(summary["volume_12"]["mean"] - 0.096) < 0.01
    lines = (out / "icosahedron_runs.csv").read_text().splitlines()
    assert len(lines) == 5


def test_plot_outputs(tmp_path):
    out = tmp_path / "o"
    rc = cli.main(["simulate", "--family", "90", "45", "--seed", "4",
                   "--directions", "30", "--events", "2000",
                   "--plot", "--out", str(out)])
    assert rc == 0
    assert (out / "cloud_B.png").stat().st_size > 0
    assert (out / "cloud_C.png").stat().st_size > 0
