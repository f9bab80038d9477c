import json
import subprocess
import sys

import pytest

from ergosess import cli, corpus


def path(name):
    return str(corpus.entry(name).path)


def call(capsys, *argv):
    status = cli.main(list(argv))
    out, err = capsys.readouterr()
    return status, out, err


@pytest.fixture
def bad_file(tmp_path):
    def write(text):
        p = tmp_path / "bad.ss"
        p.write_text(text)
        return str(p)
    return write


def test_config_defaults():
    cfg = cli.config_from_args(["check", "x.ss"])
    assert (cfg.syntax, cfg.cost, cfg.verbose, cfg.json) == ("implicit", "none", False, False)
    cfg = cli.config_from_args(["run", "x.ss", "f", "1", "2", "--budget", "7"])
    assert (cfg.target, cfg.indices, cfg.budget) == ("f", (1, 2), 7)
    cfg = cli.config_from_args(["eq", "x.ss", "a", "b", "--vars", "m, n"])
    assert cfg.vars == ("m", "n") and cfg.types == ("a", "b")


def test_check_ok(capsys):
    status, out, _ = call(capsys, "check", path("list"), "--cost", "send")
    assert status == cli.OK
    assert all(": ok (" in ln for ln in out.splitlines())


def test_check_json_schema(capsys):
    status, out, _ = call(capsys, "check", path("queue2"), "--cost", "send", "--json")
    assert status == cli.OK
    rows = [json.loads(ln) for ln in out.splitlines()]
    assert {"queue_lists", "queue_new"} <= {r["name"] for r in rows}
    for r in rows:
        assert set(r) == {"name", "verdict", "ms"} and r["verdict"] == "ok"


def test_check_reports_static_error(capsys, bad_file):
    f = bad_file("type t = +{a : 1}\ndecl f : (x : t) |- (y : 1)\nproc y <- f <- x = close y\n")
    status, out, err = call(capsys, "check", f)
    assert status == cli.STATIC
    assert "f: error:leftover context" in out
    assert f"{f}:3:" in err and "~" in err


def test_syntax_error_exit_code(capsys, bad_file):
    status, _, err = call(capsys, "check", bad_file("decl f : . |- (y : 1\n"))
    assert status == cli.SYNTAX
    assert "^" in err or "~" in err


def test_unknown_cost_model(capsys):
    status, _, err = call(capsys, "check", path("list"), "--cost", "often")
    assert status == cli.STATIC and "often" in err


def test_recon_prints_explicit_program(capsys):
    status, out, _ = call(capsys, "recon", path("list"), "--cost", "send")
    assert status == cli.OK
    assert "assert l {0 = 0}" in out and "work" in out
    f_status, _, _ = call(capsys, "check", path("list"), "--syntax", "explicit")
    assert f_status == cli.STATIC  # the implicit source is not a valid explicit program


def test_run_trace(capsys):
    status, out, _ = call(capsys, "run", path("binary"), "one")
    assert status == cli.OK
    assert out.splitlines() == ["c.b1", "send c {0}", "c.e", "close c", "work=0 potential=0"]


def test_run_json(capsys):
    status, out, _ = call(capsys, "run", path("queue"), "main", "--cost", "send", "--json")
    assert status == cli.OK
    assert json.loads(out) == {"trace": ["close c"], "work": 22, "potential": 0, "steps": 95}


def test_run_budget_exhausted(capsys):
    status, _, err = call(capsys, "run", path("primes"), "sieve8", "--budget", "5")
    assert status == cli.RUNTIME and "error:runtime" in err


def test_run_unknown_process(capsys):
    status, _, err = call(capsys, "run", path("binary"), "nosuch")
    assert status == cli.STATIC and "nosuch" in err


def test_eq_equal_and_not_equal(capsys):
    status, out, _ = call(capsys, "eq", path("indexed"), "pos{n+1}", "nat{n+1}", "--vars", "n")
    assert (status, out.strip()) == (cli.OK, "equal")
    status, out, _ = call(capsys, "eq", path("indexed"), "nat{n}", "pos{n}", "--vars", "n",
                          "--json")
    assert status == cli.STATIC
    assert json.loads(out)["verdict"] == "not-equal" and json.loads(out)["path"] == ["zero"]


def test_eq_with_constraint(capsys):
    status, out, _ = call(capsys, "eq", path("binary"), "ord{m}{n}", "ord{a}{b}",
                          "--vars", "m,n,a,b",
                          "--constraint", "a > 0 /\\ m = 2*a /\\ b > 0 /\\ n = 2*b")
    assert (status, out.strip()) == (cli.OK, "equal")


def test_eq_argument_errors_point_at_argument(capsys):
    status, _, err = call(capsys, "eq", path("indexed"), "nat{n", "pos{n}", "--vars", "n")
    assert status == cli.SYNTAX
    assert "<argument>:1:" in err and "nat{n" in err


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "ergosess", "run", path("binary"), "one"],
                       capture_output=True, text=True)
    assert r.returncode == 0
    assert r.stdout.splitlines()[-1] == "work=0 potential=0"
