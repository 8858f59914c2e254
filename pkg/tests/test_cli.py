import json
import warnings

import numpy as np
import pytest

from chromlc import linalg
from chromlc.cli import main
from chromlc.compiler import Gate, GateSchedule, Step
from chromlc.hamiltonian import embed_discrete
from chromlc.serialization import dumps_schedule, loads_gates, loads_schedule

from helpers import random_hermitian


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_generate_and_index(tmp_path, capsys):
    path = tmp_path / "chain.json"
    code, out, err = run_cli(capsys, "generate", "chain", "--n", "4", "--t", "1.0", "-o", str(path))
    assert code == 0
    schedule = loads_schedule(path.read_text())
    assert schedule.n_qubits == 4
    code, out, _ = run_cli(capsys, "index", str(path), "--samples", "4")
    assert code == 0
    first = out.splitlines()[0]
    assert first.startswith("I = ")
    assert abs(float(first.split()[2]) - 2.0) < 1e-9


@pytest.mark.filterwarnings("ignore:.*global phase.*")
def test_index_on_embedded_two_step_schedule(tmp_path, capsys):
    # two steps with angles 0.3 and 0.7 embed to integrated index 1.0;
    # generic gates carry a phase component, hence the filtered warning
    rng = np.random.default_rng(0)
    gates = []
    for norm in (0.3, 0.7):
        h = random_hermitian(4, rng, norm=norm)
        gates.append(Gate.from_unitary((0, 1), linalg.expm_i(h, 1.0)))
    schedule = embed_discrete(GateSchedule(2, (Step((gates[0],)), Step((gates[1],)))))
    path = tmp_path / "embedded.json"
    path.write_text(dumps_schedule(schedule))
    code, out, _ = run_cli(capsys, "index", str(path))
    assert code == 0
    value = float(out.splitlines()[0].split()[2])
    assert abs(value - 1.0) < 1e-9


def test_index_json_format(tmp_path, capsys):
    path = tmp_path / "chain.json"
    run_cli(capsys, "generate", "chain", "--n", "4", "-o", str(path))
    code, out, _ = run_cli(capsys, "index", str(path), "--format", "json", "--samples", "2")
    assert code == 0
    doc = json.loads(out)
    assert abs(doc["I"] - 2.0) < 1e-9
    assert len(doc["samples"]) == 2


def test_compile_subcommand(tmp_path, capsys):
    spath = tmp_path / "chain.json"
    gpath = tmp_path / "gates.json"
    rpath = tmp_path / "report.json"
    run_cli(capsys, "generate", "chain", "--n", "4", "-o", str(spath))
    code, _, err = run_cli(
        capsys, "compile", str(spath), "--epsilon", "0.25", "-o", str(gpath), "--report", str(rpath)
    )
    assert code == 0
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        gates = loads_gates(gpath.read_text())
    assert gates.n_qubits == 4
    report = json.loads(rpath.read_text())
    assert abs(report["weighted_depth"] - 2.0) < 1e-9
    assert report["n_steps"] == len(gates.steps)


def test_compile_epsilon_too_large_exits_2(tmp_path, capsys):
    spath = tmp_path / "chain.json"
    run_cli(capsys, "generate", "chain", "--n", "4", "--t", "0.5", "-o", str(spath))
    code, _, err = run_cli(capsys, "compile", str(spath), "--epsilon", "0.75", "-o", "/dev/null")
    assert code == 2
    assert "epsilon" in err


def test_parse_error_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run_cli(capsys, "index", str(bad))
    assert code == 2
    assert "error:" in err


def test_missing_file_exits_2(capsys):
    code, _, err = run_cli(capsys, "index", "/nonexistent/path.json")
    assert code == 2


def test_simulate_gates(tmp_path, capsys):
    spath = tmp_path / "chain.json"
    gpath = tmp_path / "gates.json"
    run_cli(capsys, "generate", "chain", "--n", "4", "-o", str(spath))
    run_cli(capsys, "compile", str(spath), "--epsilon", "0.25", "-o", str(gpath))
    code, out, _ = run_cli(capsys, "simulate", str(gpath), "--observable", "z")
    assert code == 0
    doc = json.loads(out)
    assert doc["n_qubits"] == 4
    assert abs(doc["norm"] - 1.0) < 1e-9
    assert abs(doc["expectation"] - 4.0) < 1e-9


def test_simulate_schedule_and_product_state(tmp_path, capsys):
    spath = tmp_path / "pairs.json"
    run_cli(capsys, "generate", "disjoint_pairs", "--n", "4", "-o", str(spath))
    state = tmp_path / "plus.json"
    amp = 1 / np.sqrt(2)
    state.write_text(
        json.dumps(
            {
                "format": "chromlc-product",
                "version": 1,
                "qubits": [[[amp, 0.0], [amp, 0.0]] for _ in range(4)],
            }
        )
    )
    code, out, _ = run_cli(
        capsys, "simulate", str(spath), "--state", str(state), "--observable", "x", "--tol", "1e-8"
    )
    assert code == 0
    doc = json.loads(out)
    assert abs(doc["norm"] - 1.0) < 1e-9
    code, out, _ = run_cli(capsys, "simulate", str(spath), "--state", "basis:3", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "n_qubits,4"


def test_simulate_bad_state_exits_2(tmp_path, capsys):
    spath = tmp_path / "chain.json"
    run_cli(capsys, "generate", "chain", "--n", "4", "-o", str(spath))
    missing = tmp_path / "missing_state.json"
    code, _, err = run_cli(capsys, "simulate", str(spath), "--state", str(missing))
    assert code == 2


def test_verify_variance(capsys):
    code, out, err = run_cli(
        capsys, "verify", "variance", "--n", "4", "--alpha", "0.25", "--trials", "3", "--seed", "5"
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "seed,n_qubits,alpha,variance,bound,slack"
    assert len(lines) == 4
    assert "satisfy the bound" in err


def test_verify_variance_alpha_cap(capsys):
    code, _, err = run_cli(
        capsys, "verify", "variance", "--n", "4", "--alpha", "0.6", "--trials", "2"
    )
    assert code == 2
    assert "alpha < 1/2" in err


def test_verify_theorem1(tmp_path, capsys):
    spath = tmp_path / "rand.json"
    run_cli(
        capsys,
        "generate", "random_graph", "--n", "4", "--p", "0.7", "--seed", "100",
        "--coupling", "0.3", "-o", str(spath),
    )
    code, out, err = run_cli(
        capsys, "verify", "theorem1", str(spath), "--epsilons", "0.2,0.1,0.05"
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "epsilon,error,weighted_depth,depth_gap"
    assert "passed" in err


def test_trotter_subcommand(tmp_path, capsys):
    spath = tmp_path / "pairs.json"
    run_cli(capsys, "generate", "disjoint_pairs", "--n", "4", "-o", str(spath))
    code, out, _ = run_cli(
        capsys, "trotter", str(spath), "--m-list", "1,2", "--epsilons", "1.0"
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "method,parameter,error,weighted_depth,n_steps"
    assert len(lines) == 4


def test_cli_outputs_deterministic(tmp_path, capsys):
    args = ["generate", "random_graph", "--n", "5", "--p", "0.5", "--seed", "9"]
    code, out1, _ = run_cli(capsys, *args)
    assert code == 0
    _, out2, _ = run_cli(capsys, *args)
    assert out1 == out2
    v = ["verify", "variance", "--n", "3", "--alpha", "0.2", "--trials", "3", "--seed", "4"]
    _, va, _ = run_cli(capsys, *v)
    _, vb, _ = run_cli(capsys, *v)
    assert va == vb


def test_usage_error_exits_2(capsys):
    assert main(["compile"]) == 2
    capsys.readouterr()
    assert main(["generate", "unknown_kind", "--n", "4"]) == 2
    capsys.readouterr()
