import json

import pytest

from lscomp.cli import main

from conftest import EX851_TEXT, FOOTNOTE3_TEXT


@pytest.fixture()
def ex851_path(tmp_path):
    p = tmp_path / "ex851.dam"
    p.write_text(EX851_TEXT)
    return str(p)


@pytest.fixture()
def footnote3_path(tmp_path):
    p = tmp_path / "footnote3.dam"
    p.write_text(FOOTNOTE3_TEXT)
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_analyze_text(capsys, ex851_path):
    code, out, _ = run(capsys, "analyze", ex851_path, "--cost", "1")
    assert code == 0
    assert "max column zeros: 3" in out
    assert "dimension achievable: 2" in out
    assert "dimension converse: 3" in out
    assert "optimal: no" in out


def test_analyze_footnote_optimal(capsys, footnote3_path):
    code, out, _ = run(capsys, "analyze", footnote3_path, "--cost", "1")
    assert code == 0
    assert "dimension achievable: 1" in out
    assert "optimal: yes" in out


def test_analyze_json_envelope(capsys, ex851_path):
    code, out, _ = run(
        capsys, "analyze", ex851_path, "--cost", "1/2", "--format", "json", "--seed", "5"
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["tool"] == "lscomp"
    assert payload["version"]
    assert payload["modulus"] == str(2**61 - 1)
    assert payload["seed"] == 5
    assert len(payload["assignment_sha256"]) == 64
    assert payload["report"]["dimension_achievable"]["decimal"] == "0.5"


def test_analyze_bundled_alias(capsys):
    code, out, _ = run(capsys, "analyze", "bundled:ex851", "--cost", "1")
    assert code == 0 and "dimension achievable: 2" in out


def test_missing_file_is_input_error(capsys):
    code, _, err = run(capsys, "analyze", "/nonexistent.dam", "--cost", "1")
    assert code == 2
    assert "error" in err


def test_bad_cost_is_input_error(capsys, ex851_path):
    code, _, err = run(capsys, "analyze", ex851_path, "--cost", "zero")
    assert code == 2


def test_out_of_range_cost_is_input_error(capsys, ex851_path):
    code, _, err = run(capsys, "analyze", ex851_path, "--cost", "9")
    assert code == 2
    assert "support" in err


def test_malformed_assignment_diagnostic(capsys, tmp_path):
    p = tmp_path / "bad.dam"
    p.write_text("* 0\n* x\n")
    code, _, err = run(capsys, "analyze", str(p), "--cost", "1")
    assert code == 2
    assert "line 2" in err


def test_csv_only_for_tradeoff(capsys, ex851_path):
    code, _, err = run(capsys, "analyze", ex851_path, "--cost", "1", "--format", "csv")
    assert code == 2 and "tradeoff" in err


def test_build_json_deterministic(capsys, ex851_path):
    args = ("build", ex851_path, "--cost", "1", "--seed", "9", "--format", "json")
    code1, out1, _ = run(capsys, *args)
    code2, out2, _ = run(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2


def test_build_text_reports_verification(capsys, ex851_path):
    code, out, _ = run(capsys, "build", ex851_path, "--cost", "1", "--seed", "4")
    assert code == 0
    assert "encodability: ok" in out
    assert "rank 5/5" in out


def test_build_matrices_omit(capsys, ex851_path):
    code, out, _ = run(
        capsys, "build", ex851_path, "--cost", "1", "--seed", "4",
        "--format", "json", "--matrices", "omit",
    )
    assert code == 0
    payload = json.loads(out)
    assert "matrices" not in payload["scheme"]
    assert payload["scheme"]["task_rows"] == 2


def test_build_out_file(capsys, ex851_path, tmp_path):
    dest = tmp_path / "bundle.json"
    code, out, _ = run(
        capsys, "build", ex851_path, "--cost", "1", "--seed", "4",
        "--format", "json", "--out", str(dest),
    )
    assert code == 0 and out == ""
    assert json.loads(dest.read_text())["command"] == "build"


def test_certify_identity_stack(capsys, ex851_path):
    code, out, _ = run(
        capsys, "certify", ex851_path, "--cost", "1", "--seed", "0", "--format", "json"
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["witness"]["case"] == "identity"
    assert payload["witness"]["identity_stack"] is True
    assert payload["witness"]["worker_order"] == [4, 5, 1, 2, 3]


def test_simulate_ok(capsys, ex851_path):
    code, out, _ = run(
        capsys, "simulate", ex851_path, "--cost", "1", "--trials", "5",
        "--length", "16", "--seed", "3",
    )
    assert code == 0
    assert "5/5 exact recoveries" in out


def test_simulate_json(capsys, ex851_path):
    code, out, _ = run(
        capsys, "simulate", ex851_path, "--cost", "1/2", "--trials", "3",
        "--length", "8", "--seed", "3", "--format", "json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["monte_carlo"]["failures"] == 0
    assert payload["monte_carlo"]["max_load_symbols"] == 4


def test_tradeoff_csv(capsys, ex851_path):
    code, out, _ = run(
        capsys, "tradeoff", ex851_path, "--costs", "1/2,1,2", "--format", "csv"
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("cost,cost_p,cost_q,dimension_converse")
    assert len(lines) == 4
    first = lines[1].split(",")
    assert first[0] == "0.5" and first[1] == "1" and first[2] == "2"


def test_tradeoff_range(capsys, ex851_path):
    code, out, _ = run(
        capsys, "tradeoff", ex851_path, "--cost-range", "1/2..2:1/2", "--format", "json"
    )
    assert code == 0
    payload = json.loads(out)
    costs = [(pt["cost"]["p"], pt["cost"]["q"]) for pt in payload["points"]]
    assert costs == [(1, 2), (1, 1), (3, 2), (2, 1)]


def test_tradeoff_dominance_column(capsys, ex851_path):
    code, out, _ = run(
        capsys, "tradeoff", ex851_path, "--costs", "1/2,1,3/2,2", "--format", "json"
    )
    payload = json.loads(out)
    for pt in payload["points"]:
        ach = pt["dimension_achievable"]
        rep = pt["dimension_repetition"]
        assert ach["p"] * rep["q"] >= rep["p"] * ach["q"]


def test_tradeoff_needs_costs(capsys, ex851_path):
    code, _, err = run(capsys, "tradeoff", ex851_path)
    assert code == 2


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
