import json
import subprocess
import sys

import pytest

from cmlab.cli import (EXIT_BUDGET, EXIT_CONFIG, EXIT_FAIL, EXIT_OK, ConfigError, RunConfig,
                       _parse_primes, main, parse_config_text, render, run_suite)


def test_parse_primes():
    assert _parse_primes("2,3, 5") == (2, 3, 5)
    assert _parse_primes("10..20") == (11, 13, 17, 19)
    assert _parse_primes("2,7..11") == (2, 7, 11)


def test_parse_config_text():
    cfg = parse_config_text("# run\np = 5,7\ndmax=100  # small\n\nformat=json\n")
    assert cfg == {"p": (5, 7), "dmax": 100, "format": "json"}
    with pytest.raises(ConfigError):
        parse_config_text("colour=blue")
    with pytest.raises(ConfigError):
        parse_config_text("dmax")
    with pytest.raises(ConfigError):
        parse_config_text("dmax=many")


def test_validate():
    RunConfig().validate()
    for bad in (RunConfig(p=(4,)), RunConfig(dmax=0), RunConfig(format="xml"), RunConfig(jobs=0)):
        with pytest.raises(ConfigError):
            bad.validate()


def test_render_formats():
    from fractions import Fraction
    rows = [{"a": 1, "b": Fraction(1, 3)}, {"a": 2, "c": [1, 2], "b": 0.1 + 0.2}]
    assert render(rows, "tsv") == "a\tb\tc\n1\t1/3\t\n2\t0.3\t[1, 2]\n"
    assert json.loads(render(rows, "json")) == [{"a": 1, "b": "1/3"}, {"a": 2, "b": 0.3, "c": [1, 2]}]


def test_exit_codes(tmp_path):
    assert main(["ssgraph", "--p", "11,13", "--out", str(tmp_path)]) == EXIT_OK
    assert main(["nonsense", "--out", str(tmp_path)]) == EXIT_CONFIG
    assert main(["ssgraph", "--p", "4", "--out", str(tmp_path)]) == EXIT_CONFIG
    assert main(["ssgraph", "--dmax", "-3", "--out", str(tmp_path)]) == EXIT_CONFIG
    assert main(["ssgraph", "--config", str(tmp_path / "missing.cfg")]) == EXIT_CONFIG
    assert main(["--help"]) == EXIT_OK
    assert main([]) == EXIT_CONFIG
    # (Z/3)^4 needs 81 residues: a budget of 50 cannot hold them
    assert main(["spheres", "--p", "3", "--budget", "50", "--out", str(tmp_path)]) == EXIT_BUDGET


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("p=11\nformat=json\nout=%s\n" % (tmp_path / "a"))
    assert main(["ssgraph", "--config", str(cfg)]) == EXIT_OK
    rows = json.loads((tmp_path / "a" / "ssgraph.json").read_text())
    assert rows and all(r["p"] == 11 for r in rows)
    assert main(["ssgraph", "--config", str(cfg), "--format", "tsv"]) == EXIT_OK
    assert (tmp_path / "a" / "ssgraph.tsv").exists()


@pytest.mark.parametrize("suite", ["ssgraph", "quaternion", "genus", "katz", "theta"])
def test_suites_pass_and_are_deterministic(tmp_path, suite):
    cfg = RunConfig(dmax=60, fmax=4, out=str(tmp_path / "one"))
    status, results = run_suite(suite, cfg)
    assert status == EXIT_OK, results[0].failures
    first = open(results[0].path, "rb").read()
    status, results = run_suite(suite, RunConfig(dmax=60, fmax=4, out=str(tmp_path / "two")))
    assert open(results[0].path, "rb").read() == first


def test_cm_suite_small(tmp_path):
    status, results = run_suite("cm", RunConfig(p=(7,), dmax=40, fmax=3, out=str(tmp_path)))
    assert status == EXIT_OK, results[0].failures


def test_spheres_suite_small(tmp_path):
    status, _ = run_suite("spheres", RunConfig(p=(3,), out=str(tmp_path)))
    assert status == EXIT_OK


def test_unknown_suite_raises():
    with pytest.raises(ConfigError):
        run_suite("bogus", RunConfig())
    assert EXIT_FAIL == 1


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "cmlab", "quaternion", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == EXIT_OK, proc.stderr
    assert proc.stdout.startswith("quaternion\tpass")
