import io
import subprocess
import sys

import pytest

from nckernel.cli import DATA_ENV, EXIT_OK, EXIT_PARSE, EXIT_REJECTED, EXIT_USAGE, fixture_dir, run


def cli(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


def test_parse_round_trips(tmp_path):
    f = tmp_path / "a.fml"
    f.write_text("# comment\nall x . x in y\n")
    code, text = cli("parse", str(f))
    assert code == EXIT_OK and "all x . x in y" in text


def test_parse_error_exit_code(tmp_path):
    f = tmp_path / "bad.fml"
    f.write_text("all x . (x in\n")
    assert cli("parse", str(f))[0] == EXIT_PARSE


def test_unknown_flag_is_usage_error():
    assert cli("parse", "x.fml", "--bogus")[0] == EXIT_USAGE


def test_instantiate_separation():
    code, text = cli("instantiate", "--theory", "T", "--schema", "SEP", "--formula", "alpha != alpha")
    assert code == EXIT_OK
    assert "alpha in X /\\ alpha != alpha" in text


def test_instantiate_bad_schema_formula():
    code, _ = cli("instantiate", "--theory", "T", "--schema", "SEP", "--formula", "alpha in Y")
    assert code == EXIT_PARSE


def test_unknown_theory():
    assert cli("model-check", "--theory", "ZF")[0] == EXIT_USAGE


@pytest.mark.parametrize("name", ["eq42-derivation.prf", "prop6-derivation.prf"])
def test_check_accepts_shipped_scripts(name):
    code, text = cli("check", f"fixtures/{name}")
    assert code == EXIT_OK and text.rstrip().endswith("ACCEPTED")


def test_check_without_step_rejects():
    code, text = cli("check", "fixtures/prop6-derivation.prf", "--without", "84")
    assert code == EXIT_REJECTED and "104 FAIL" in text


def test_translate_matches_expectation(tmp_path):
    audit = tmp_path / "audit.tsv"
    code, text = cli("translate", "--in", "fixtures/gamma30.fml", "--expect", "fixtures/eq42.fml",
                     "--audit", str(audit))
    assert code == EXIT_OK and "MATCH" in text
    assert len(audit.read_text().splitlines()) >= 30


def test_model_check_reports_rank_overflow(tmp_path):
    fig = tmp_path / "report.png"
    code, text = cli("model-check", "--theory", "T", "--rank", "2", "--expect-fail",
                     "INF,SUM-F-INFINITE", "--no-timing", "--figure", str(fig))
    assert code == EXIT_REJECTED
    assert "INF EXPECTED-FAIL -" in text and "PAIR FAIL -" in text
    assert fig.stat().st_size > 0


def test_saturate_with_figure(tmp_path):
    fig = tmp_path / "sat.svg"
    code, text = cli("saturate", "--theory", "T-inf-0", "--sep", "alpha != alpha", "--rep", "beta = alpha",
                     "--rev-graph", "--terms", "0; succ(0)", "--depth", "1", "--figure", str(fig))
    assert code == EXIT_OK
    assert "contradiction none" in text or "no contradiction" in text
    assert fig.read_text().startswith("<?xml")


@pytest.mark.parametrize("name", ["eq42-derivation", "prop6-derivation", "sumf-unfold-3"])
def test_replay_matches_golden(name):
    code, text = cli("replay", name)
    assert code == EXIT_OK and text


def test_replay_unknown_fixture():
    assert cli("replay", "nope")[0] == EXIT_USAGE


def test_config_file_supplies_defaults(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("rank = 2\nno-timing = yes\nexpect-fail = INF,SUM-F-INFINITE\n")
    code, text = cli("--config", str(cfg), "model-check", "--theory", "T-inf-0")
    assert "rank <= 2" in text and "EXT PASS -" in text
    # flags override the file
    _, text = cli("--config", str(cfg), "model-check", "--theory", "T-inf-0", "--rank", "1")
    assert "rank <= 1" in text


def test_config_rejects_unknown_key(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("colour = red\n")
    assert cli("--config", str(cfg), "model-check")[0] == EXIT_USAGE


def test_data_directory_override(tmp_path, monkeypatch):
    (tmp_path / "one.fml").write_text("0 = 0\n")
    monkeypatch.setenv(DATA_ENV, str(tmp_path))
    assert fixture_dir() == tmp_path
    code, text = cli("parse", "fixtures/one.fml")
    assert code == EXIT_OK and "0 = 0" in text


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "nckernel.cli", "replay", "eq42-derivation"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "ACCEPTED" in proc.stdout
