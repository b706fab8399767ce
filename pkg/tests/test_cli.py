"""CLI subcommands and exit codes."""

import json

import pytest

from nonautodyn.cli import EXIT_CONFIG, EXIT_INCONSISTENT, EXIT_OK, main


@pytest.fixture
def spec_file(tmp_path):
    doc = {
        "family": {"builtin": "plateau-tent"},
        "check": {
            "horizon": 200, "grid_resolution": 10, "ball_count": 5, "eps": 0.1,
            "delta": 0.25, "tol": 1e-9, "tail_window": 100, "max_period": 6,
            "repetitions": 2,
        },
        "properties": ["sensitivity", "transitivity"],
        "label": "cli-smoke",
    }
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(doc))
    return path


def test_list(capsys):
    assert main(["list"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "plateau-tent" in out
    assert "sensitivity" in out


def test_run_spec(spec_file, tmp_path, capsys):
    code = main(["run", str(spec_file), "--out", str(tmp_path / "out"), "--format", "csv"])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "cli-smoke" in out
    assert (tmp_path / "out" / "cli-smoke.csv").exists()


def test_run_with_overrides(spec_file, capsys):
    code = main(["run", str(spec_file), "--horizon", "150", "--grid", "8"])
    assert code == EXIT_OK
    assert "sensitivity" in capsys.readouterr().out


def test_missing_spec_is_config_error(capsys):
    assert main(["run", "/nonexistent/spec.json"]) == EXIT_CONFIG
    assert "config error" in capsys.readouterr().err


def test_malformed_spec_is_config_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["run", str(bad)]) == EXIT_CONFIG


def test_unknown_example_id(capsys):
    assert main(["reproduce", "not-a-scenario"]) == EXIT_CONFIG


def test_reproduce_with_small_overrides(capsys):
    code = main(["reproduce", "sens", "--horizon", "150"])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "plateau-tent" in out


def test_bound_subcommand(spec_file, capsys):
    assert main(["bound", str(spec_file), "--n", "1", "--k", "2"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert {"measured", "bound", "holds", "n", "k"} <= set(doc)
    assert doc["n"] == 1 and doc["k"] == 2


def test_check_subcommand(spec_file, capsys):
    assert main(["check", "equicontinuity", str(spec_file)]) == EXIT_OK
    assert "equicontinuity" in capsys.readouterr().out


def test_check_unknown_property(spec_file, capsys):
    assert main(["check", "nope", str(spec_file)]) == EXIT_CONFIG


def test_inconsistency_exit_code():
    # synthetic: the exit path flags definite opposite verdicts under an
    # applicable rule
    from nonautodyn.report import ComparisonRow, _consistent, PROPERTY_BY_NAME
    from nonautodyn.verdict import holds, refuted

    rule = PROPERTY_BY_NAME["sensitivity"]
    ok, _ = _consistent(rule, holds({}), refuted({}), applicable=True)
    assert not ok
    row = ComparisonRow(
        property="sensitivity",
        rule_id=rule.rule_id,
        verdict_nonautonomous=holds({}),
        verdict_limit=refuted({}),
        theorem_applicable=True,
        consistent=ok,
        note="synthetic",
    )
    assert not row.consistent
    assert EXIT_INCONSISTENT == 2
