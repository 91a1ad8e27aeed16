import csv
import io
import json
import math

import pytest
from hypothesis import given, strategies as st

from qmod.cli import format_complex, main, parse_complex, parse_grid, parse_params
from qmod.errors import ConfigurationError


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


@pytest.mark.parametrize("text, value", [
    ("i", 1j), ("-i", -1j), ("0.5i", 0.5j), ("2", 2), ("1+2i", 1 + 2j),
    ("-0.3-0.7i", -0.3 - 0.7j), ("1e-3+4.5e2i", 0.001 + 450j), (" 3.5 ", 3.5),
])
def test_parse_complex(text, value):
    assert parse_complex(text) == value


@pytest.mark.parametrize("bad", ["", "abc", "1+", "i2", "1++2i"])
def test_parse_complex_rejects(bad):
    with pytest.raises(ConfigurationError):
        parse_complex(bad)


finite = st.floats(allow_nan=False, allow_infinity=False)


@given(finite, finite)
def test_format_parse_roundtrip(a, b):
    z = complex(a, b)
    assert parse_complex(format_complex(z)) == z


def test_parse_params_and_grid():
    assert parse_params(["--tau", "i", "--xi=0.25"]) == {"tau": 1j, "xi": 0.25}
    with pytest.raises(ConfigurationError):
        parse_params(["--tau"])
    with pytest.raises(ConfigurationError):
        parse_params(["--x", "1", "--x", "2"])
    assert parse_grid("tau=i,0.5+0.5i;xi=0.1") == {"tau": [1j, 0.5 + 0.5j], "xi": [0.1]}


def test_eval_examples():
    code, out = run("eval", "li2", "--z", "0.5")
    assert code == 0
    assert out.startswith("li2 = 0.58224052646501")
    code, out = run("eval", "pochhammer_inf", "--x", "0.5", "--q", "0.5")
    assert code == 0 and "terms_used=" in out
    code, out = run("eval", "log_gamma", "--z", "0.5", "--format", "json")
    d = json.loads(out)
    assert d["value"][0] == pytest.approx(0.5 * math.log(math.pi), abs=1e-14)


def test_eval_errors():
    assert run("eval", "nope")[0] == 1
    assert run("eval", "li2")[0] == 1
    assert run("eval", "li2", "--z", "1", "--w", "2")[0] == 1
    assert run("eval", "li2", "--z", "2.5")[0] == 2
    assert run("eval", "log_gamma", "--z", "-3")[0] == 2
    assert run("frobnicate")[0] == 1


def test_verify_exit_codes():
    code, out = run("verify", "XQMAIN", "--tau", "i", "--xi", "0.25", "--format", "json")
    assert code == 0
    d = json.loads(out)
    assert {"identity", "params", "lhs", "rhs", "abs_err", "rel_err",
            "offset_2pik", "pass", "skipped"} <= set(d)
    assert d["pass"] is True and d["offset_2pik"] == 0
    assert run("verify", "MAIN", "--alpha", "-1", "--nu", "0.5")[0] == 2
    assert run("verify", "MP", "--alpha", "1", "--nu", "0.3", "--max-depth", "10",
               "--abs-tol", "1e-16", "--rel-tol", "1e-16")[0] == 3
    assert run("verify", "ASYMPTOTIC", "--q", "0.9", "--x", "0.5")[0] == 4
    assert run("verify", "MAIN", "--alpha", "1")[0] == 1
    assert run("verify", "NOPE", "--x", "1")[0] == 1


def test_verify_text_output():
    code, out = run("verify", "LANDEN", "--x", "3")
    assert code == 0 and out.startswith("LANDEN pass")


def test_sweep_csv(tmp_path):
    path = tmp_path / "euler.csv"
    code, _ = run("sweep", "EULER", "--grid", "q=0.5,0.3i;x=0.2,-1,1+i", "-o", str(path))
    assert code == 0
    lines = path.read_text().splitlines()
    assert lines[-1].startswith("#summary,points=6,")
    rows = list(csv.DictReader(lines[:-1]))
    assert len(rows) == 6
    assert list(rows[0]) == ["identity", "q", "x", "lhs_re", "lhs_im", "rhs_re", "rhs_im",
                             "abs_err", "rel_err", "pass", "skipped"]
    assert all(r["pass"] == "true" for r in rows)
    got = [(parse_complex(r["q"]), parse_complex(r["x"])) for r in rows]
    assert got[:3] == [(0.5, 0.2), (0.5, -1), (0.5, 1 + 1j)]


def test_sweep_csv_roundtrips_floats(tmp_path):
    from qmod.verify import verify
    path = tmp_path / "landen.csv"
    run("sweep", "LANDEN", "--grid", "x=0.5,3", "-o", str(path))
    rows = list(csv.DictReader(path.read_text().splitlines()[:-1]))
    assert float(rows[1]["rel_err"]) == verify("LANDEN", dict(x=3.0)).rel_err


def test_sweep_asymptotic_columns():
    code, out = run("sweep", "ASYMPTOTIC", "--grid", "q=0.5;x=0.5")
    header = out.splitlines()[0].split(",")
    assert header[-3:] == ["optimal_index", "optimal_error", "actual_error"]


def test_sweep_empty_grid_writes_nothing(tmp_path):
    path = tmp_path / "none.csv"
    assert run("sweep", "EULER", "--grid", "q=;x=0.5", "-o", str(path))[0] == 1
    assert not path.exists()
    assert run("sweep", "MAIN", "--grid", "alpha=-1;nu=0.5", "-o", str(path))[0] == 1
    assert not path.exists()


def test_sweep_rejects_unknown_grid_key():
    assert run("sweep", "EULER", "--grid", "q=0.5;x=0.5;y=1")[0] == 1


def test_asymptotic_command():
    code, out = run("asymptotic", "--q", "0.9", "--x", "0.5", "--format", "json")
    assert code == 0
    d = json.loads(out)
    assert d["optimal_index"] >= 1 and d["optimal_error"] > 0
    assert run("asymptotic", "--q", "0.9")[0] == 1


def test_config_file_and_env(tmp_path, monkeypatch):
    cfg = tmp_path / "q.cfg"
    cfg.write_text("# strict settings\nmax_depth = 10\nabs-tol = 1e-16\nrel_tol=1e-16\n")
    args = ("verify", "MP", "--alpha", "1", "--nu", "0.3")
    assert run(*args)[0] == 0
    assert run(*args, "--config", str(cfg))[0] == 3
    # flags override the file
    assert run(*args, "--config", str(cfg), "--max-depth", "40",
               "--abs-tol", "1e-12", "--rel-tol", "1e-12")[0] == 0
    monkeypatch.setenv("QMOD_DEFAULT_TOL", "not-a-number")
    assert run(*args)[0] == 1


def test_config_rejects_unknown_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("speed = 11\n")
    assert run("verify", "LANDEN", "--x", "3", "--config", str(cfg))[0] == 1
    assert run("verify", "LANDEN", "--x", "3", "--config", str(tmp_path / "missing"))[0] == 1
