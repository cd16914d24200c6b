"""CLI subcommands: output schema, determinism, exit codes."""

import json
import subprocess
import sys

import pytest

RUN = [sys.executable, "-m", "qsts"]


def invoke(*args, **kwargs):
    return subprocess.run(RUN + list(args), capture_output=True, text=True, **kwargs)


# ── run ──────────────────────────────────────────────────────────────────

def test_run_p1_maximal_weights_json():
    result = invoke("run", "--protocol", "p1", "--n", "1", "--m", "1",
                    "--input", "1,0,0,0")
    assert result.returncode == 0
    doc = json.loads(result.stdout)
    assert doc["protocol"] == "p1"
    assert doc["classical_bits"] == 3
    assert len(doc["branches"]) == 8
    assert all(b["fidelity"] == 1.0 for b in doc["branches"])
    assert doc["success_probability"] == pytest.approx(1.0, abs=1e-12)


def test_run_strategy_resolution_in_output():
    result = invoke("run", "--protocol", "p1", "--n", "0.5",
                    "--m", "strategy:phi-plus", "--input", "0.6,0,0.8,0")
    assert result.returncode == 0
    doc = json.loads(result.stdout)
    assert doc["params"]["m"] == 2.0
    assert doc["params"]["n"] == 0.5


def test_run_p2_maximal_weights():
    result = invoke("run", "--protocol", "p2", "--n1", "1", "--n2", "1",
                    "--m", "1", "--input", "0.6,0,0.8,0")
    doc = json.loads(result.stdout)
    assert len(doc["branches"]) == 16
    assert all(b["fidelity"] == pytest.approx(1.0, abs=1e-12) for b in doc["branches"])


def test_run_nparty_and_csv_format():
    result = invoke("run", "--protocol", "nparty-ghz", "--n", "0.5", "--m", "0.5",
                    "--parties", "4", "--input", "0.6,0,0.8,0", "--format", "csv")
    assert result.returncode == 0
    lines = result.stdout.strip().splitlines()
    assert lines[0] == "alice,helpers,probability,fidelity,correction"
    assert len(lines) == 1 + 4 * 4  # four Alice outcomes x two helpers
    assert lines[1].split(",")[1].count("+") == 1  # two helper labels joined


def test_run_rejects_inconsistent_config():
    result = invoke("run", "--protocol", "p1", "--m", "1", "--input", "1,0,0,0")
    assert result.returncode == 2
    assert "needs --n" in result.stderr


def test_run_rejects_unnormalised_input():
    result = invoke("run", "--protocol", "p1", "--n", "1", "--m", "1",
                    "--input", "1,0,1,0")
    assert result.returncode == 2


def test_degenerate_strategy_exit_code():
    result = invoke("run", "--protocol", "p1", "--n", "0", "--m", "strategy:phi-plus",
                    "--input", "1,0,0,0")
    assert result.returncode == 3


def test_invalid_arguments_exit_code():
    result = invoke("run", "--protocol", "p7", "--n", "1", "--m", "1")
    assert result.returncode == 2


# ── verify-tables ────────────────────────────────────────────────────────

def test_verify_tables_passes_by_default():
    result = invoke("verify-tables")
    assert result.returncode == 0
    lines = result.stdout.strip().splitlines()
    assert sum("PASS" in line for line in lines) == 24
    assert "24/24 rows" in lines[-1]


def test_verify_tables_corruption_detected():
    result = invoke("verify-tables", "--corrupt", "HMinus,XPlus")
    assert result.returncode == 4
    assert "FAIL table2 HMinus/XPlus" in result.stdout


def test_verify_tables_absurd_tolerance_fails():
    result = invoke("verify-tables", "--tolerance", "1e-30")
    assert result.returncode == 4


# ── efficiency ───────────────────────────────────────────────────────────

def test_efficiency_analytic_only():
    result = invoke("efficiency", "--protocol", "p1", "--n", "0.5", "--m", "0.5",
                    "--analytic-only")
    assert result.returncode == 0
    doc = json.loads(result.stdout)
    assert doc == {"analytic": pytest.approx(0.88, abs=1e-12)}


def test_efficiency_exact_at_maximal_weights():
    result = invoke("efficiency", "--protocol", "p1", "--n", "1", "--m", "1",
                    "--samples", "100", "--seed", "5")
    doc = json.loads(result.stdout)
    assert doc["estimate"] == pytest.approx(1.0, abs=1e-12)
    assert doc["std_error"] == pytest.approx(0.0, abs=1e-13)
    assert doc["samples"] == 100 and doc["seed"] == 5


def test_efficiency_statistical_contract_p2():
    result = invoke("efficiency", "--protocol", "p2", "--n1", "0.5", "--n2", "0.5",
                    "--m", "0.25", "--samples", "4000", "--seed", "11")
    doc = json.loads(result.stdout)
    assert abs(doc["estimate"] - doc["analytic"]) <= 4 * doc["std_error"]


def test_efficiency_complex_weight_omits_analytic():
    result = invoke("efficiency", "--protocol", "p1", "--n", "0.5+0.2j", "--m", "0.5",
                    "--samples", "50", "--seed", "2")
    doc = json.loads(result.stdout)
    assert "analytic" not in doc


# ── sweep ────────────────────────────────────────────────────────────────

def test_sweep_analytic_column_monotone(tmp_path):
    out = tmp_path / "sweep.csv"
    result = invoke("sweep", "--protocol", "p1", "--param", "n", "--from", "0.1",
                    "--to", "1.0", "--steps", "10", "--m", "n",
                    "--samples", "10", "--seed", "1", "--out", str(out))
    assert result.returncode == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "param,value,analytic,estimate,std_error"
    assert len(lines) == 11
    analytic = [float(line.split(",")[2]) for line in lines[1:]]
    assert all(b > a for a, b in zip(analytic, analytic[1:]))


def test_sweep_single_step():
    result = invoke("sweep", "--protocol", "p1", "--param", "m", "--from", "0.4",
                    "--to", "0.9", "--steps", "1", "--n", "0.5", "--samples", "5")
    lines = result.stdout.strip().splitlines()
    assert len(lines) == 2
    assert lines[1].startswith("m,0.4")


def test_paired_sweep_orders_protocols(tmp_path):
    common = ["--param", "m", "--from", "0.2", "--to", "0.9", "--steps", "5",
              "--samples", "5", "--seed", "3"]
    first = tmp_path / "c1.csv"
    second = tmp_path / "c2.csv"
    invoke("sweep", "--protocol", "p1", "--n", "0.6", "--out", str(first), *common)
    invoke("sweep", "--protocol", "p2", "--n1", "0.6", "--n2", "0.75",
           "--out", str(second), *common)
    c1 = [float(line.split(",")[2]) for line in first.read_text().splitlines()[1:]]
    c2 = [float(line.split(",")[2]) for line in second.read_text().splitlines()[1:]]
    assert all(a >= b for a, b in zip(c1, c2))


def test_sweep_unwritable_path():
    result = invoke("sweep", "--protocol", "p1", "--param", "n", "--from", "0.1",
                    "--to", "0.5", "--steps", "2", "--m", "1", "--samples", "5",
                    "--out", "/nonexistent-dir/sweep.csv")
    assert result.returncode != 0


def test_sweep_rejects_unknown_param():
    result = invoke("sweep", "--protocol", "p1", "--param", "n1", "--from", "0.1",
                    "--to", "0.5", "--steps", "2", "--m", "1")
    assert result.returncode == 2


# ── reproducibility ──────────────────────────────────────────────────────

@pytest.mark.parametrize(
    "args",
    [
        ("run", "--protocol", "p1", "--n", "0.5", "--m", "0.7", "--input", "haar:42"),
        ("run", "--protocol", "nparty-bell", "--n-list", "0.5,0.4,0.9", "--m", "0.2",
         "--input", "haar:7", "--format", "csv"),
        ("efficiency", "--protocol", "p1", "--n", "0.5", "--m", "0.5",
         "--samples", "200", "--seed", "9"),
        ("sweep", "--protocol", "p2", "--param", "n1", "--from", "0.2", "--to", "0.8",
         "--steps", "3", "--n2", "0.5", "--m", "0.4", "--samples", "20", "--seed", "1"),
    ],
    ids=("run-haar", "run-nparty-csv", "efficiency", "sweep"),
)
def test_byte_identical_output_for_fixed_seed(args):
    first = invoke(*args)
    second = invoke(*args)
    assert first.returncode == 0
    assert first.stdout == second.stdout
    assert first.stdout.strip()


def test_float_serialisation_round_trips():
    result = invoke("run", "--protocol", "p1", "--n", "0.7", "--m", "0.3",
                    "--input", "haar:1")
    doc = json.loads(result.stdout)
    probs = [b["probability"] for b in doc["branches"]]
    assert sum(probs) == pytest.approx(1.0, abs=1e-10)
    # 17 significant digits: parsing back and re-rendering is lossless
    rendered = format(probs[0], ".17g")
    assert float(rendered) == probs[0]
