import csv
import json

import numpy as np
import pytest

from onlinebb import csvio
from onlinebb.bench import load_curves, main, run_matrix, run_policy
from onlinebb.config import DEFAULT_CHECKPOINTS, POLICY_DEFAULTS, parse_config, serialize
from onlinebb.errors import ConfigError, InvalidArgument

SMALL = {
    "scenario": {"type": "random_rotation", "dim": 3, "eig_range": [1.0, 4.0], "seed": 5},
    "set": {"type": "box", "lower": [-1, -1, -1], "upper": [1, 1, 1]},
    "policies": [{"policy": "bb1"}, {"policy": "diminishing", "alpha0": "auto", "name": "dim"}],
    "K": 300,
    "checkpoints": [10, 300],
}


def write_config(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return p


def test_minimal_config_materializes_defaults():
    cfg = parse_config('{"scenario": "stationary-iso", "policies": [{"policy": "bb2"}]}')
    assert cfg.K == 10_000
    assert cfg.checkpoints == list(DEFAULT_CHECKPOINTS)
    assert cfg.set == {"type": "ball", "center": [0.0] * 10, "radius": 5.0}
    assert cfg.scenario["eigenvalues"] == [2.0] * 10
    assert cfg.x0 == "zero"
    p = cfg.policies[0]
    assert p["name"] == "bb2"
    assert {k: p[k] for k in POLICY_DEFAULTS} == POLICY_DEFAULTS


@pytest.mark.parametrize(
    "raw, path",
    [
        ({**SMALL, "K": 100, "checkpoints": [1000]}, "checkpoints"),
        ({**SMALL, "policies": [{"policy": "bb1"}, {"policy": "bb1"}]}, "policies[1].name"),
        ({**SMALL, "bogus": 1}, "bogus"),
        ({**SMALL, "policies": [{"policy": "bb1", "step": 2}]}, "policies[0].step"),
        ({**SMALL, "scenario": {"type": "random_rotation", "dim": 3, "colour": 1}}, "scenario.colour"),
        ({**SMALL, "set": {"type": "ball", "center": [0, 0], "radius": 1}}, "set.center"),
        ({**SMALL, "policies": [{"policy": "bb1", "alpha_min": 1.0}]}, "policies[0]"),
        ({**SMALL, "x0": "origin"}, "x0"),
        ({**SMALL, "scenario": "nope"}, "scenario.name"),
    ],
)
def test_validation_errors_name_the_field(raw, path):
    with pytest.raises(ConfigError) as info:
        parse_config(json.dumps(raw))
    assert info.value.path == path


def test_malformed_json():
    with pytest.raises(ConfigError):
        parse_config("{not json")


@pytest.mark.parametrize("raw", [
    SMALL,
    {"scenario": "drifting", "policies": ["alt_bb"], "x0": "random(3)", "K": 50},
    {"scenario": {"type": "stationary", "curvature": [[2, 0], [0, 1]], "center": [1, 0]},
     "policies": ["constant"], "x0": [0.5, 0.5], "K": 20},
])
def test_round_trip(raw):
    cfg = parse_config(json.dumps(raw))
    assert parse_config(serialize(cfg)) == cfg


def test_run_matrix_outputs(tmp_path):
    cfg = parse_config(json.dumps(SMALL))
    m = run_matrix(cfg, tmp_path / "out")
    assert m.ok and len(m.rows) == 2
    per_policy = sorted(p.name for p in (tmp_path / "out").glob("*_*.csv"))
    assert per_policy == ["regret_bb1.csv", "regret_dim.csv", "trajectory_bb1.csv", "trajectory_dim.csv"]
    with open(tmp_path / "out" / "trajectory_bb1.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["k", "x_1", "x_2", "x_3", "loss", "grad_norm", "alpha", "degenerate", "projected"]
    assert len(rows) == 301
    with open(tmp_path / "out" / "summary.csv") as fh:
        summary = list(csv.DictReader(fh))
    assert [r["policy"] for r in summary] == ["bb1", "dim"]
    assert list(summary[0]) == ["policy", "R_K", "avg_R_K", "slope", "zinkevich_bound", "psi", "zeta",
                                "cond_t1", "flag_P", "degenerate_rounds", "wall_ms"]
    with open(tmp_path / "out" / "checkpoints.csv") as fh:
        assert len(list(csv.reader(fh))) == 1 + 2 * 2


def test_float_format_round_trips():
    for v in (0.1, 1 / 3, 2.0**-40, 123456789.123456789, -7e-300):
        assert float(csvio.fmt(v)) == v
    assert csvio.fmt(True) == "true" and csvio.fmt(None) == "na" and csvio.fmt(3) == "3"


def _mask_wall(text):
    rows = [line.split(",") for line in text.splitlines()]
    return [r[:-1] for r in rows]


def _outputs(d):
    return {p.name: p.read_bytes() for p in sorted(d.glob("*.csv"))}


def test_cli_determinism_and_parallel_equivalence(tmp_path):
    cfg = write_config(tmp_path, SMALL)
    runs = []
    for name, jobs in (("a", "1"), ("b", "1"), ("c", "2")):
        assert main(["run", str(cfg), "--out", str(tmp_path / name), "--jobs", jobs, "--quiet"]) == 0
        runs.append(_outputs(tmp_path / name))
    for other in runs[1:]:
        assert other.keys() == runs[0].keys()
        for fname in runs[0]:
            if fname == "summary.csv":
                assert _mask_wall(other[fname].decode()) == _mask_wall(runs[0][fname].decode())
            else:
                assert other[fname] == runs[0][fname], fname


def test_cli_validate_and_exit_codes(tmp_path, capsys):
    good = write_config(tmp_path, SMALL)
    assert main(["validate", str(good)]) == 0
    printed = json.loads(capsys.readouterr().out)
    assert printed["K"] == 300
    bad = write_config(tmp_path, {**SMALL, "K": 5}, "bad.json")
    assert main(["validate", str(bad)]) == 1
    assert main(["validate", str(tmp_path / "missing.json")]) == 3
    assert main(["plot-data", str(tmp_path / "nothing"), "--out", str(tmp_path / "p.csv")]) == 3


def test_cli_numerical_failure_exit_code(tmp_path, capsys):
    cfg = {
        "scenario": {"type": "stationary", "eigenvalues": [1.0], "center": [0.0]},
        "set": {"type": "ball", "center": [0.0], "radius": 1e300},
        "policies": [{"policy": "constant", "alpha0": 1e300, "name": "boom"}, {"policy": "bb1"}],
        "x0": [1.0],
        "K": 5,
        "checkpoints": [],
    }
    path = write_config(tmp_path, cfg)
    assert main(["run", str(path), "--out", str(tmp_path / "o"), "--quiet"]) == 2
    assert "boom" in capsys.readouterr().err
    assert (tmp_path / "o" / "trajectory_bb1.csv").exists()


def test_plot_data(tmp_path):
    cfg = parse_config(json.dumps(SMALL))
    m = run_matrix(cfg, tmp_path / "out")
    reports = [r.report for r in m.results]
    csvio.emit_plot_data(reports, tmp_path / "stride.csv", decimation=3)
    with open(tmp_path / "stride.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["policy", "k", "regret", "avg_regret"]
    assert len(rows) == 1 + 2 * 100
    csvio.emit_plot_data(reports[:1], tmp_path / "all.csv", decimation=1)
    with open(tmp_path / "all.csv") as fh:
        assert len(list(csv.reader(fh))) == 1 + 300
    with pytest.raises(InvalidArgument):
        csvio.emit_plot_data([], tmp_path / "none.csv")
    assert main(["plot-data", str(tmp_path / "out"), "--out", str(tmp_path / "cli.csv")]) == 0
    curves = load_curves(tmp_path / "out")
    np.testing.assert_array_equal(curves[0][1], reports[0].regret)


def test_plot_data_large_horizon_arity(tmp_path):
    K = 10_000
    curves = [("a", np.arange(1, K + 1, dtype=float)), ("b", np.ones(K))]
    csvio.write_plot_data(curves, tmp_path / "p.csv", decimation=100)
    with open(tmp_path / "p.csv") as fh:
        assert len(list(csv.reader(fh))) == 1 + 2 * 100
    rounds = csvio.plot_rounds(K)
    assert rounds[0] == 1 and rounds[-1] == K and len(rounds) <= 100


# measured once with the bundled defaults (diminishing c = 0.1), K = 10^4
MEASURED_AVG_R = {
    "stationary-iso": (0.0006822032097022904, 0.0021006640397289987),
    "stationary-aniso": (0.002099711094637894, 0.0023632167357672015),
}


@pytest.mark.parametrize("scenario", sorted(MEASURED_AVG_R))
def test_bb1_not_worse_than_diminishing_regression(scenario):
    cfg = parse_config(json.dumps({"scenario": scenario, "policies": ["bb1", "diminishing"]}))
    bb, dim = (run_policy(cfg, i).report.avg_R_K for i in range(2))
    assert bb <= dim
    assert (bb, dim) == pytest.approx(MEASURED_AVG_R[scenario], rel=1e-6)


def test_plot_data_uses_configured_points(tmp_path):
    cfg = parse_config(json.dumps({**SMALL, "plot_points": 20}))
    run_matrix(cfg, tmp_path / "out")
    assert main(["plot-data", str(tmp_path / "out"), "--out", str(tmp_path / "p.csv")]) == 0
    with open(tmp_path / "p.csv") as fh:
        rows = list(csv.DictReader(fh))
    per_policy = [r for r in rows if r["policy"] == "bb1"]
    assert len(per_policy) == len(csvio.plot_rounds(300, points=20)) <= 20
    assert main(["plot-data", str(tmp_path / "missing"), "--out", str(tmp_path / "q.csv")]) == 3
