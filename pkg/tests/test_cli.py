import json
import logging

import pytest

from tempval import __version__
from tempval.cli import EXIT_USAGE, main

from .conftest import FIXTURES, read_fixture, replace_step

DOMAIN = str(FIXTURES / "domain.pddl")
PROBLEM = str(FIXTURES / "problem.pddl")
PLAN = str(FIXTURES / "plan.tplan")
PREFIX = str(FIXTURES / "prefix.tplan")


@pytest.fixture
def write_plan(tmp_path):
    def write(text):
        path = tmp_path / "plan.tplan"
        path.write_text(text)
        return str(path)

    return write


def test_check_valid(capsys):
    assert main(["check", DOMAIN, PROBLEM, PLAN]) == 0
    out, err = capsys.readouterr()
    assert out == "valid Plan\n"
    assert err == ""


def test_check_domain_name_mismatch_is_only_a_warning(capsys, caplog):
    with caplog.at_level(logging.WARNING, logger="tempval"):
        assert main(["check", DOMAIN, PROBLEM, PLAN]) == 0
    assert capsys.readouterr().out == "valid Plan\n"
    assert "names domain 'elevators', validating against 'temp-elevators'" in caplog.text


@pytest.mark.parametrize("semantics", ["strict", "right-closed"])
@pytest.mark.parametrize("path", ["list", "balanced", "auto"])
def test_check_options(capsys, semantics, path):
    assert main(["check", DOMAIN, PROBLEM, PLAN, "--semantics", semantics, "--path", path]) == 0
    assert capsys.readouterr().out == "valid Plan\n"


def test_check_invalid(capsys, write_plan):
    plan = write_plan(replace_step(read_fixture("plan.tplan"), "2: (cl e1)[1]", "0.5: (cl e1)[1]"))
    assert main(["check", DOMAIN, PROBLEM, plan]) == 1
    out, err = capsys.readouterr()
    assert out == "invalid\n"
    assert err.startswith("error: at step 3: Precondition not satisfied")


def test_check_ill_formed(capsys, write_plan):
    plan = write_plan(replace_step(read_fixture("plan.tplan"), "(cl e1)", "(cl f1)"))
    assert main(["check", DOMAIN, PROBLEM, plan]) == 1
    assert capsys.readouterr().out == "ill-formed\n"


def test_check_parse_error(capsys, write_plan):
    plan = write_plan("0: (op e1)[1e3]\n")
    assert main(["check", DOMAIN, PROBLEM, plan]) == 2
    out, err = capsys.readouterr()
    assert out == "parse-error\n"
    assert "plan:1:" in err


def test_check_missing_file(capsys, tmp_path):
    assert main(["check", DOMAIN, PROBLEM, str(tmp_path / "missing.tplan")]) == 2
    assert capsys.readouterr().err.startswith("error: ")


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["check", DOMAIN, PROBLEM],
        ["check", DOMAIN, PROBLEM, PLAN, "--semantics", "open"],
        ["difftest", "--count", "many"],
        ["bench", "--path", "auto"],
    ],
)
def test_usage_errors(capsys, argv):
    assert main(argv) == EXIT_USAGE
    assert "usage:" in capsys.readouterr().err


def test_version(capsys):
    assert main(["--version"]) == 0
    assert __version__ in capsys.readouterr().out


def test_happenings_of_prefix(capsys):
    assert main(["happenings", DOMAIN, PROBLEM, PREFIX]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert [line.split(": ", 1)[0] for line in lines[:9]] == [
        "0", "0.375", "0.75", "0.875", "1", "1.125", "1.25", "1.375", "1.5",
    ]
    assert lines[6] == "1.25: {(en p0 e1 f1)_start, (en p1 e0 f0)_end}"


def test_happenings_of_invalid_plan_still_print(capsys, write_plan):
    plan = write_plan(replace_step(read_fixture("plan.tplan"), "2: (cl e1)[1]", "0.5: (cl e1)[1]"))
    assert main(["happenings", DOMAIN, PROBLEM, plan]) == 0
    assert capsys.readouterr().out.startswith("0: {(op e1)_start}\n0.25: {(op e1)_inv}\n0.5: {(cl e1)_start}\n")


def test_happenings_ill_formed(capsys, write_plan):
    plan = write_plan("0: (fly e1)[1]\n")
    assert main(["happenings", DOMAIN, PROBLEM, plan]) == 1
    assert "fly" in capsys.readouterr().err


def test_difftest_clean(capsys):
    assert main(["difftest", "--seed", "3", "--count", "50"]) == 0
    assert capsys.readouterr().out.startswith("50 cases, 0 disagreements")


def test_difftest_empty(capsys):
    assert main(["difftest", "--count", "0"]) == 0


def test_difftest_json_with_mutation(capsys):
    code = main(["difftest", "--seed", "11", "--count", "3000", "--mutation", "unsorted-happenings", "--json"])
    report = json.loads(capsys.readouterr().out)
    assert code == 1
    assert report["mutation"] == "unsorted-happenings"
    assert report["disagreements"]


def test_difftest_bad_bounds(capsys):
    assert main(["difftest", "--max-atoms", "0"]) == EXIT_USAGE
    assert capsys.readouterr().err.startswith("error: ")


def test_bench(capsys):
    assert main(["bench", "-n", "10", "--compare"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert [line.split()[1] for line in lines] == ["path=list", "path=balanced"]
    assert all("verdict=valid" in line and "happenings=30" in line for line in lines)


def test_bench_rejects_zero(capsys):
    assert main(["bench", "-n", "0"]) == EXIT_USAGE


def test_bench_corpus(capsys, tmp_path):
    for name in ("domain.pddl", "problem.pddl"):
        (tmp_path / name).write_text(read_fixture(name))
    (tmp_path / "a.tplan").write_text(read_fixture("plan.tplan"))
    (tmp_path / "b.tplan").write_text(replace_step(read_fixture("plan.tplan"), "2: (cl e1)[1]", "0.5: (cl e1)[1]"))
    assert main(["bench", "--corpus", str(tmp_path)]) == 1
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("a.tplan verdict=valid happenings=")
    assert lines[1].startswith("b.tplan verdict=invalid ")
    assert all(" seconds=" in line for line in lines[:2])
    assert lines[2].startswith("2 plans, 1 valid (")


def test_bench_corpus_without_plans(capsys, tmp_path):
    assert main(["bench", "--corpus", str(tmp_path)]) == 2
    assert capsys.readouterr().err.startswith("error: no plans found under")
    assert main(["bench", "--corpus", str(tmp_path / "missing")]) == 2
