import csv
import json

import pytest

from sgqst import bench, cli
from sgqst.bench import BenchConfig, CSV_COLUMNS, derive_seed, run_benchmark


def small_config(tmp_path, **kw):
    base = dict(qubit_counts=[3], shot_counts=[256], restarts=2, max_iters=100, output_dir=str(tmp_path))
    base.update(kw)
    return BenchConfig(**base)


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_small_grid(tmp_path):
    rows = run_benchmark(small_config(tmp_path))
    assert [r.estimator for r in rows] == ["MLE", "PSD", "G1", "G2", "G3", "G4"]
    table = read_csv(tmp_path / "results.csv")
    assert list(table[0]) == CSV_COLUMNS
    assert [int(r["params"]) for r in table] == [63, 63, 9, 15, 17, 21]
    assert all(r["wall_ms"] == "" for r in table)
    assert float(table[2]["fidelity_target"]) == pytest.approx(0.125, abs=5e-3)
    for tag in ("G1", "G2", "G3", "G4"):
        text = (tmp_path / f"residuals_n3_shots256_{tag}.csv").read_text().splitlines()
        assert text[0] == "pauli,delta" and len(text) == 6
    doc = json.loads((tmp_path / "results.json").read_text())
    assert len(doc["rows"]) == 6 and doc["config"]["master_seed"] == 2024
    scaling = read_csv(tmp_path / "scaling.csv")
    assert len(scaling) == 6


def test_grid_deterministic(tmp_path):
    run_benchmark(small_config(tmp_path / "a"))
    run_benchmark(small_config(tmp_path / "b"))
    for name in ("results.csv", "scaling.csv", "residuals_n3_shots256_G3.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    docs = [json.loads((tmp_path / d / "results.json").read_text()) for d in "ab"]
    for doc in docs:
        doc["config"].pop("output_dir")
    assert docs[0] == docs[1]


def test_timing_fills_wall_ms(tmp_path):
    run_benchmark(small_config(tmp_path, estimators=["PSD"], timing=True))
    assert float(read_csv(tmp_path / "results.csv")[0]["wall_ms"]) >= 0


def test_min_qubits_skips_g4(tmp_path):
    rows = run_benchmark(small_config(tmp_path, qubit_counts=[2], estimators=["MLE", "G3", "G4"]), write=False)
    assert [r.estimator for r in rows] == ["MLE", "G3"]


def test_without_mle_no_reference(tmp_path):
    rows = run_benchmark(small_config(tmp_path, estimators=["G1"]), write=False)
    assert rows[0].status == "ok"
    assert rows[0].mle_agreement != rows[0].mle_agreement  # NaN


def test_config_validation():
    with pytest.raises(ValueError):
        BenchConfig(estimators=["G9"])
    with pytest.raises(ValueError):
        BenchConfig.from_dict({"qubits": [3]})
    cfg = BenchConfig.from_dict({"noise": {"depolarizing_p": 0.2}})
    assert cfg.noise_for(4).depolarizing_p == 0.2
    assert BenchConfig().noise_for(3).depolarizing_p == pytest.approx(0.263, abs=1e-3)


def test_derive_seed_distinct():
    seeds = {derive_seed(2024, n, s) for n in (3, 4, 5) for s in (256, 1024, 2048)}
    assert len(seeds) == 9
    assert derive_seed(1, 2) == derive_seed(1, 2)


# -- CLI -------------------------------------------------------------------

def run(argv):
    return cli.main([str(a) for a in argv])


def test_cli_simulate_and_reconstruct(tmp_path, capsys):
    data = tmp_path / "d.json"
    assert run(["simulate", "--n", 3, "--set", "full", "--shots", 2048, "--depolarizing", 0.263,
                "--seed", 42, "--out", data]) == 0
    doc = json.loads(data.read_text())
    assert doc["n"] == 3 and len(doc["records"]) == 63 and doc["seed"] == 42

    mle = tmp_path / "mle.json"
    assert run(["reconstruct", "--data", data, "--estimator", "MLE", "--restarts", 2, "--out", mle]) == 0
    g3 = tmp_path / "g3.json"
    assert run(["reconstruct", "--data", data, "--estimator", "g3", "--restarts", 2, "--mle-ref", mle,
                "--out", g3]) == 0
    metrics = json.loads(g3.read_text())["metrics"]
    assert set(metrics) == {"fidelity_target", "agreement_mle", "observable_error"}

    assert run(["residuals", "--mle", mle, "--model", g3, "-k", 3]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "pauli,delta" and len(lines) == 4

    assert run(["evaluate", "--result", g3, "--mle-ref", mle]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["estimator"] == "G3" and "agreement_mle" in out


def test_cli_custom_ops(tmp_path):
    data = tmp_path / "d.json"
    run(["simulate", "--n", 2, "--shots", 256, "--out", data])
    ops = tmp_path / "ops.json"
    ops.write_text('["ZZ", "XX"]')
    out = tmp_path / "r.json"
    assert run(["reconstruct", "--data", data, "--estimator", "CUSTOM", "--ops", ops, "--restarts", 1,
                "--out", out]) == 0
    assert json.loads(out.read_text())["operators"] == ["ZZ", "XX"]


def test_cli_usage_errors(tmp_path, capsys):
    assert run(["simulate", "--shots", 10]) == 2
    assert "--n" in capsys.readouterr().err
    with pytest.raises(SystemExit) as exc:
        run(["reconstruct", "--data", "x.json", "--estimator", "BOGUS"])
    assert exc.value.code == 2
    assert run(["simulate", "--n", 2, "--set", "nosuchset"]) == 2


def test_cli_coverage_error(tmp_path, capsys):
    data = tmp_path / "d.json"
    run(["simulate", "--n", 3, "--set", "g1", "--shots", 256, "--out", data])
    assert run(["reconstruct", "--data", data, "--estimator", "G3"]) == 1
    err = capsys.readouterr().err
    assert "missing 8 operator(s)" in err and "XXX" in err


def test_cli_bad_noise(tmp_path):
    assert run(["simulate", "--n", 2, "--depolarizing", 1.5, "--out", tmp_path / "x.json"]) == 1


def test_cli_benchmark(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"restarts": 2, "max_iters": 100}))
    out = tmp_path / "bench"
    assert run(["benchmark", "--config", cfg, "--qubits", 3, "--shots", 256, "--estimators", "MLE", "G1",
                "--out", out]) == 0
    rows = read_csv(out / "results.csv")
    assert [r["estimator"] for r in rows] == ["MLE", "G1"]
