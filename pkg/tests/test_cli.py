import json

import numpy as np
import pytest

from rbdpipe import io
from rbdpipe.cli import main
from rbdpipe.dynamics import FunctionId, RobotState, evaluate, random_states
from rbdpipe.model import load_model
from rbdpipe.pipesim import build_pipeline, read_jsonl

POINT_MASS = {
    "name": "point_mass",
    "root_mode": "fixed_base",
    "gravity": [0.0, 0.0, 0.0],
    "links": [{
        "name": "mass",
        "parent": None,
        "inertia": {"mass": 2.0, "com": [0, 0, 0], "ixx": 0.1, "iyy": 0.1, "izz": 0.1},
        "joint": {"kind": "translation3"},
    }],
}


def _write_model(tmp_path, doc, name="model.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def _edit_iiwa(tmp_path, **inertia):
    from rbdpipe.data import model_path

    doc = json.loads(open(model_path("iiwa")).read())
    doc["links"][3]["inertia"].update(inertia)
    return _write_model(tmp_path, doc)


def test_compute_example_values_from_state_file(tmp_path, capsys):
    model = _write_model(tmp_path, POINT_MASS)
    states = tmp_path / "s.jsonl"
    states.write_text(json.dumps({"q": [0.3, -1, 2], "qd": [0, 0, 0], "tau": [1, 0, 0]}) + "\n")
    assert main(["compute", "--model", model, "--function", "FD", "--states", str(states)]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["qdd"] == [0.5, 0.0, 0.0]
    states.write_text(json.dumps({"q": [0, 0, 0], "qdd": [1, 0, 0]}) + "\n")
    assert main(["compute", "--model", model, "--function", "ID", "--states", str(states)]) == 0
    assert json.loads(capsys.readouterr().out)["tau"] == [2.0, 0.0, 0.0]


def test_compute_seeded_batch_count(tmp_path):
    out = tmp_path / "r.jsonl"
    assert main(["compute", "--model", "iiwa", "--function", "dID", "--seed", "3", "--out", str(out)]) == 0
    recs = io.read_results(out)
    assert len(recs) == 256 and [r["task"] for r in recs] == list(range(256))


def test_unknown_function_is_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        main(["compute", "--model", "iiwa", "--function", "ABA"])
    assert info.value.code == 2
    assert "unknown function" in capsys.readouterr().err


def test_states_and_seed_conflict(tmp_path):
    p = tmp_path / "s.jsonl"
    p.write_text('{"q": [0,0,0,0,0,0,0]}\n')
    with pytest.raises(SystemExit) as info:
        main(["compute", "--model", "iiwa", "--function", "ID", "--states", str(p), "--seed", "1"])
    assert info.value.code == 2


def test_flag_combinations(capsys):
    with pytest.raises(SystemExit):
        main(["compute", "--model", "iiwa", "--function", "ID", "--out-minv"])
    assert "--out-minv applies to M, Minv and dFD only" in capsys.readouterr().err


@pytest.mark.parametrize("function", list(FunctionId), ids=lambda f: f.value)
def test_results_roundtrip_bit_identical(tmp_path, function):
    m = load_model("quadruped_arm")
    states = random_states(m, 6, 5, function=function, with_fext=True)
    sfile = tmp_path / "s.jsonl"
    io.write_states(sfile, states, function)
    back = io.read_states(sfile, function)
    for a, b in zip(states, back):
        for attr in ("q", "qd", "qdd_or_tau", "f_ext", "minv"):
            x, y = getattr(a, attr), getattr(b, attr)
            assert (x is None and y is None) or np.array_equal(x, y)
    out = tmp_path / "r.jsonl"
    assert main(["compute", "--model", "quadruped_arm", "--function", function.value,
                 "--states", str(sfile), "--out", str(out)]) == 0
    for st, rec in zip(states, io.read_results(out)):
        want = evaluate(m, function, st)
        if hasattr(want, "d_dq"):
            assert np.array_equal(rec["d_dq"], want.d_dq) and np.array_equal(rec["d_dqd"], want.d_dqd)
        else:
            key = {"ID": "tau", "FD": "qdd", "M": "M", "Minv": "Minv"}[function.value]
            assert np.array_equal(rec[key], want)


def test_compute_extra_outputs(tmp_path):
    out = tmp_path / "r.jsonl"
    assert main(["compute", "--model", "iiwa", "--function", "dFD", "--batch", "3", "--out-minv",
                 "--out", str(out)]) == 0
    assert all({"d_dq", "d_dqd", "Minv"} <= set(r) for r in io.read_results(out))
    assert main(["compute", "--model", "iiwa", "--function", "M", "--batch", "3", "--out-minv",
                 "--out", str(out)]) == 0
    rec = io.read_results(out)[0]
    M, Minv = np.array(rec["M"]), np.array(rec["Minv"])
    assert np.max(np.abs(M @ Minv - np.eye(7))) < 1e-10


def test_bad_state_file(tmp_path, capsys):
    p = tmp_path / "s.jsonl"
    p.write_text('{"q": [0,0,0,0,0,0,0]}\n{oops\n')
    assert main(["compute", "--model", "iiwa", "--function", "ID", "--states", str(p)]) == 2
    assert ":2: not valid JSON" in capsys.readouterr().err


def test_task_failure_exit_code(tmp_path, capsys):
    p = tmp_path / "s.jsonl"
    p.write_text('{"q": [0,0,0,0,0,0,0]}\n{"q": [0,0]}\n')
    assert main(["compute", "--model", "iiwa", "--function", "ID", "--states", str(p)]) == 1
    out, err = capsys.readouterr()
    assert "1 of 2 tasks failed" in err
    assert "error" in json.loads(out.splitlines()[1])


def test_thread_env_matches_serial(tmp_path, monkeypatch):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    monkeypatch.setenv("RBDPIPE_THREADS", "1")
    assert main(["compute", "--model", "humanoid", "--function", "diFD", "--batch", "40", "--out", str(a)]) == 0
    monkeypatch.setenv("RBDPIPE_THREADS", "4")
    assert main(["compute", "--model", "humanoid", "--function", "diFD", "--batch", "40", "--out", str(b)]) == 0
    assert a.read_text() == b.read_text()


def test_bench_report(tmp_path, capsys):
    out = tmp_path / "bench.json"
    assert main(["bench", "--model", "iiwa", "--function", "ID", "--repeats", "2", "--single", "8",
                 "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep == json.loads(capsys.readouterr().out)
    assert rep["batch"] == 256 and rep["errors"] == 0
    assert rep["single_throughput_per_s"] >= 1 / rep["single_latency_s"]["mean"] * (1 - 1e-12)
    assert rep["batch_throughput_per_s"] >= rep["single_throughput_per_s"]


def _critical_path(graph):
    lat = [max(c.latency for c in s.costs.values()) for s in graph.stages]
    best = {graph.entry: lat[graph.entry]}
    order, seen = [graph.entry], set()
    while order:
        s = order.pop(0)
        for i in graph.out_edges(s):
            e = graph.edges[i]
            if e.kind == "feedback":
                continue
            cand = best[s] + lat[e.dst]
            if cand > best.get(e.dst, -1):
                best[e.dst] = cand
                order.append(e.dst)
    return best[graph.exit]


def test_simulate_single_task_latency_is_critical_path(tmp_path, capsys):
    out = tmp_path / "t.jsonl"
    assert main(["simulate", "--model", "iiwa", "--function", "ID", "--batch", "1", "--out", str(out)]) == 0
    assert "makespan" in capsys.readouterr().out
    recs = read_jsonl(out.read_text().splitlines())
    g = build_pipeline(load_model("iiwa"), function="ID")
    assert recs[0]["latency_max"] == _critical_path(g)


def test_simulate_batch_follows_pipeline_law(tmp_path):
    out = tmp_path / "t.jsonl"
    assert main(["simulate", "--model", "iiwa", "--function", "ID", "--batch", "1", "--out", str(out)]) == 0
    one = read_jsonl(out.read_text().splitlines())[0]["makespan"]
    assert main(["simulate", "--model", "iiwa", "--function", "ID", "--batch", "256", "--out", str(out)]) == 0
    full = read_jsonl(out.read_text().splitlines())[0]["makespan"]
    ii = build_pipeline(load_model("iiwa"), function="ID").bottleneck_ii()
    assert full == one + 255 * ii


def test_simulate_bad_config(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"fifo_capacity": 2, "fill": "lots", "warp": 9}))
    assert main(["simulate", "--model", "iiwa", "--function", "ID", "--sim-config", str(cfg)]) == 2
    assert "unknown pipeline config keys: warp" in capsys.readouterr().err


def test_simulate_rk4_batch_must_divide(capsys):
    with pytest.raises(SystemExit):
        main(["simulate", "--model", "iiwa", "--function", "FD", "--batch", "10", "--deps", "rk4"])


def test_simulate_layout_options(capsys):
    assert main(["simulate", "--model", "humanoid", "--function", "dID", "--batch", "8",
                 "--reroot", "torso2", "--split-root"]) == 0


def test_check_iiwa_passes(capsys):
    assert main(["check", "--model", "iiwa", "--count", "5"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and "8/8 checks passed" in out


def test_negative_mass_is_load_error(tmp_path, capsys):
    path = _edit_iiwa(tmp_path, mass=-1.0)
    assert main(["check", "--model", path]) == 2
    assert "mass" in capsys.readouterr().err


def test_corrupted_inertia_fails_pd_check(tmp_path, capsys):
    path = _edit_iiwa(tmp_path, izz=-5.0)
    assert main(["check", "--model", path, "--count", "5"]) == 1
    out = capsys.readouterr().out
    line = next(l for l in out.splitlines() if "mass-matrix-pd" in l)
    assert line.startswith("FAIL") and "not positive definite" in line


def test_missing_model(capsys):
    assert main(["check", "--model", "no_such_robot"]) == 2
    assert "rbdpipe: error:" in capsys.readouterr().err
