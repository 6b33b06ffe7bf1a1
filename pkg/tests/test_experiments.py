import json
import math
import pathlib
from fractions import Fraction

import jsonschema
import numpy as np
import pytest

from freelab import experiments
from freelab.experiments import (
    CONFIG_SCHEMA,
    REPORT_SCHEMA,
    ExperimentConfig,
    ReportRecord,
    emit_report,
    load_report,
    run,
)
from freelab.rmt import RngStream, make_y_matrix


def cfg(**kw):
    return ExperimentConfig(**kw)


def test_config_validation():
    with pytest.raises(jsonschema.ValidationError):
        cfg(experiment="theorem9")
    with pytest.raises(jsonschema.ValidationError):
        cfg(experiment="theorem1", replicates=1)
    with pytest.raises(jsonschema.ValidationError):
        cfg(experiment="theorem1", aspect=0)
    with pytest.raises(jsonschema.ValidationError):
        ExperimentConfig.from_dict({"experiment": "theorem1", "bogus": 1})
    with pytest.raises(ValueError):
        cfg(experiment="theorem1", y_spec="gauss")
    with pytest.raises(ValueError):
        cfg(experiment="fact4", N=3, a_diag=[1, 2])


@pytest.mark.parametrize("N, aspect, M", [(256, 0.5, 512), (5, 2.0, 3), (3, 2.0, 2), (7, 0.3, 23)])
def test_gaussian_rows_round_half_up(N, aspect, M):
    assert cfg(experiment="theorem1", N=N, aspect=aspect).M == M


def test_theorem1_examples():
    rec = run(cfg(experiment="theorem1", N=64, replicates=10, polynomial="W"))
    assert rec.theory["trace"] == 1
    assert rec.passed
    rec = run(cfg(experiment="theorem1", N=16, replicates=4, polynomial="Y", y_spec="diag_quantile:point:1.75"))
    assert rec.theory["trace"] == 1.75
    assert rec.estimates["trace"] == (1.75, 0.0)
    rec = run(cfg(experiment="theorem1", N=128, replicates=10, polynomial="WYWY"))
    assert rec.theory["trace"] == 1
    assert rec.passed


def test_theorem1_complex_polynomial():
    rec = run(cfg(experiment="theorem1", N=64, replicates=10, polynomial="(1+2j)*WY - 1j*YW + 0.5", y_spec="uniform:0:1"))
    assert rec.theory["trace"] == pytest.approx(0.5 + 0.5)
    assert rec.theory["trace.im"] == pytest.approx(0.5)
    assert rec.passed


def test_theorem2_examples():
    rec = run(cfg(experiment="theorem2", N=256, replicates=4, polynomial="x+y", y_spec="diag_quantile:point:0"))
    assert rec.derived["route"] == "add"
    assert rec.distances["kolmogorov"] <= 0.02
    rec = run(cfg(experiment="theorem2", N=256, replicates=4, polynomial="xy", y_spec="diag_quantile:point:1"))
    assert rec.derived["route"] == "mul"
    assert rec.distances["kolmogorov"] <= 0.02
    assert rec.passed
    rec = run(cfg(experiment="theorem2", N=128, replicates=6, polynomial="xy+yx", y_spec="uniform:0:1", moment_order=3))
    assert rec.derived["route"] == "general"
    assert rec.passed


def test_theorem2_rejects_non_real_spectrum():
    with pytest.raises(ValueError, match="not real"):
        run(cfg(experiment="theorem2", N=32, replicates=2, polynomial="WY - YW", y_spec="uniform:0:1"))


def test_theorem3_bounded_y_has_no_truncation():
    rec = run(cfg(experiment="theorem3_add", N=64, replicates=4, y_spec="bernoulli", truncation_level=2, truncation_grid=[2, 4]))
    assert rec.estimates["rank_fraction@2"] == (0.0, 0.0)
    assert rec.distances["sup_distance@2"] == 0
    assert rec.passed


def test_theorem3_mul_first_moment():
    rec = run(cfg(experiment="theorem3_mul", N=128, replicates=6, y_spec="uniform:0:1", truncation_level=2, truncation_grid=[2]))
    est, se = rec.estimates["truncated_moment_1"]
    assert abs(est - 0.5) <= 3 * se + 0.02
    assert rec.passed


def test_theorem3_cauchy_tail():
    rec = run(cfg(experiment="theorem3_add", N=128, replicates=6, y_spec="cauchy", truncation_level=10))
    assert rec.theory["tail_mass@10"] == pytest.approx(1 - 2 * math.atan(10) / math.pi)
    assert rec.passed


def test_fact4_examples():
    rec = run(cfg(experiment="fact4", N=4, k=[1], replicates=20_000, batch_size=5000))
    a = [Fraction(i, 4) for i in range(1, 5)]
    b = [1, -1, 1, -1]
    assert rec.theory["trace"] == float(sum(a) * sum(b) / 4)
    assert rec.passed
    rec = run(cfg(experiment="fact4", N=3, k=[1, 1], replicates=100, a_diag=[1, 1, 1], b_diag=[1, 1, 1]))
    assert rec.theory["trace"] == 3
    assert rec.estimates["trace"][0] == pytest.approx(3, abs=1e-12)
    assert rec.passed
    with pytest.raises(ValueError):
        run(cfg(experiment="fact4", N=5, k=[1, 1, 1, 1], replicates=10))


@pytest.mark.parametrize("unitary", ["identity", "fourier", "permutation", "haar"])
def test_fact3_unitaries(unitary):
    rec = run(cfg(experiment="fact3", N=4, unitary=unitary, replicates=100_000))
    assert rec.passed


def test_fixed_unitaries_are_unitary():
    for kind in experiments.UNITARIES:
        u = experiments.fixed_unitary(kind, 5, seed=3)
        assert np.allclose(u.conj().T @ u, np.eye(5), atol=1e-12)


def test_determinism_byte_identical(tmp_path):
    c = cfg(experiment="theorem2", N=64, replicates=3, master_seed=99)
    a = emit_report(run(c), "json", tmp_path / "a.json")
    b = emit_report(run(c), "json", tmp_path / "b.json")
    assert a == b
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    assert emit_report(run(c), "csv") == emit_report(run(c), "csv")
    assert a != emit_report(run(c.replace(master_seed=100)), "json")


@pytest.mark.parametrize(
    "c",
    [
        cfg(experiment="theorem1", N=32, replicates=3),
        cfg(experiment="theorem3_add", N=32, replicates=3, y_spec="cauchy"),
        cfg(experiment="fact4", N=3, k=[2, 1], replicates=1000),
    ],
    ids=lambda c: c.experiment,
)
def test_json_round_trip_and_schema(tmp_path, c):
    rec = run(c)
    path = tmp_path / "r.json"
    emit_report(rec, "json", path)
    data = json.loads(path.read_text())
    jsonschema.validate(data, REPORT_SCHEMA)
    assert "wall_time" not in data
    assert load_report(path) == rec
    assert ExperimentConfig.from_dict(data["config"]) == c
    timed = json.loads(emit_report(rec, "json", include_timing=True))
    assert timed["wall_time"] == rec.wall_time


def test_csv_rows():
    rec = run(cfg(experiment="theorem1", N=16, replicates=2))
    lines = emit_report(rec, "csv").splitlines()
    assert lines[0] == "section,name,value,std_error"
    assert any(line.startswith("estimate,trace,") for line in lines)
    assert any(line.startswith("pass,trace_matches_free_limit,") for line in lines)
    with pytest.raises(ValueError):
        emit_report(rec, "xml")


def test_gate_fails_when_theory_perturbed(monkeypatch):
    c = cfg(experiment="theorem1", N=64, replicates=10, polynomial="WYWY")
    clean = run(c)
    assert clean.passed
    tol = 3 * math.hypot(clean.estimates["trace"][1], clean.estimates["trace.im"][1]) + c.abs_tol
    real = experiments.free_poly_moment
    monkeypatch.setattr(experiments, "free_poly_moment", lambda *a: real(*a) + 10 * tol)
    shifted = run(c)
    assert shifted.estimates == clean.estimates
    assert not shifted.pass_flags["trace_matches_free_limit"]
    assert not shifted.passed


def test_consistency_scaling():
    errs, ses = [], []
    for N in (64, 128, 256, 512):
        rec = run(cfg(experiment="theorem1", N=N, replicates=20, polynomial="W", master_seed=5))
        errs.append(rec.distances["abs_error"])
        ses.append(rec.estimates["trace"][1])
    for i in range(3):
        assert errs[i + 1] <= errs[i] + 3 * ses[i + 1]
    assert ses[-1] < ses[0]


@pytest.mark.parametrize("y_spec, alpha2", [("diag_iid:bernoulli", 1.0), ("diag_iid:uniform:0:1", 1 / 3)])
def test_trace_products_factorize(y_spec, alpha2):
    N, R = 256, 40
    vals = []
    for r in range(R):
        y = make_y_matrix(y_spec, N, RngStream(21, r))
        t = np.trace(y @ y).real
        vals.append(t * t / N**2)
    vals = np.array(vals)
    se = vals.std(ddof=1) / math.sqrt(R)
    assert abs(vals.mean() - alpha2**2) <= 3 * se + 1.0 / N


def test_report_record_summary():
    rec = ReportRecord(config={}, pass_flags={"a": True, "b": False})
    assert rec.summary_lines() == ["PASS a", "FAIL b"]
    assert not rec.passed


def test_config_schema_accepts_example_configs():
    root = pathlib.Path(__file__).resolve().parents[1] / "configs"
    for path in sorted(root.glob("*.json")):
        jsonschema.validate(json.loads(path.read_text()), CONFIG_SCHEMA)
        ExperimentConfig.from_json(path)
