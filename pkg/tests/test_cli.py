from __future__ import annotations

import io
import json
import subprocess
import sys
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gradedhom.cli import main, run
from gradedhom.errors import ParseError
from gradedhom.session import Command, ModuleDecl, PrimeDecl, RingDecl, format_session, parse_session

FIXTURES = Path(__file__).parent / "fixtures"


def reports(text, **kw):
    buf = io.StringIO()
    code = run(text, out=buf, **kw)
    return code, [json.loads(line) for line in buf.getvalue().splitlines()]


# parsing ------------------------------------------------------------------------------


def test_ring_declaration():
    s = parse_session("ring R = poly(101, [x,y], grevlex) / ideal(x*y)")
    r = s.ring
    assert isinstance(r, RingDecl)
    assert (r.p, r.vars, r.order) == (101, ("x", "y"), "grevlex")
    assert r.ideal == ("x*y",)


def test_degree_count_mismatch_is_a_parse_error():
    text = "ring R = poly(101, [x,y], grevlex)\nmodule M = coker [[x],[y]] degrees [0]"
    with pytest.raises(ParseError) as err:
        parse_session(text)
    assert err.value.line == 2


def test_ragged_rows_are_a_parse_error():
    text = "ring R = poly(101, [x,y], grevlex)\nmodule M = coker [[x, y],[x]]"
    with pytest.raises(ParseError) as err:
        parse_session(text)
    assert (err.value.line, err.value.col) >= (2, 1)


@pytest.mark.parametrize(
    "text",
    [
        "module M = coker [[x]]",
        "ring R = poly(101, [x], grevlex)\ndepth M",
        "ring R = poly(101, [x], grevlex)\nmodule M = coker [[z]]",
        "ring R = poly(101, [x], grevlex)\nring S = poly(101, [x], grevlex)",
        "ring R = poly(101, [x], grevlex)\nmodule M = coker [[x]]\nfrobnicate M",
        "ring R = poly(101, [x], grevlex)\nmodule M = coker [[x]]\next M M index",
    ],
)
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_session(text)


def test_fixture_session_has_nine_statements():
    s = parse_session((FIXTURES / "r3_session.txt").read_text())
    assert len(s.statements) == 9
    assert sum(isinstance(d, ModuleDecl) for d in s.declarations) == 3
    assert sum(isinstance(d, PrimeDecl) for d in s.declarations) == 3
    assert [c.name for c in s.commands] == ["gcdim", "phi"]


@pytest.mark.parametrize("name", ["r3_session.txt", "all_commands.txt"])
def test_round_trip(name):
    s = parse_session((FIXTURES / name).read_text())
    assert parse_session(format_session(s)) == s


@settings(max_examples=30, deadline=None)
@given(st.lists(st.lists(st.sampled_from(["x", "y", "x^2 - 3*y^2", "0", "x*y"]), min_size=2, max_size=2), min_size=1, max_size=3))
def test_round_trip_generated_modules(rows):
    # generators sit in degree 0, so a column is homogeneous when its nonzero entries share a degree
    lines = ["ring R = poly(101, [x, y], lex)"]
    cols = list(zip(*rows))
    deg = lambda e: 0 if e == "0" else (1 if e in ("x", "y") else 2)  # noqa: E731
    ok = all(len({deg(e) for e in col if e != "0"}) <= 1 for col in cols)
    if not ok:
        return
    body = ", ".join("[" + ", ".join(r) + "]" for r in rows)
    lines.append(f"module M = coker [{body}]")
    lines.append("prime p = ideal(x)")
    lines.append("hilbert M to 3")
    s = parse_session("\n".join(lines))
    assert parse_session(format_session(s)) == s


# running --------------------------------------------------------------------------------


def test_gcdim_report():
    text = (FIXTURES / "r3_session.txt").read_text()
    code, out = reports(text)
    assert code == 0
    gc = out[0]
    assert set(gc) == {"command", "inputs", "verdict", "certificates", "bound", "seed"}
    assert gc["verdict"] == 0 and gc["bound"] == 20
    assert gc["certificates"]["ab_check"] == "0 + 1 = 1"
    assert out[1]["command"] == "phi" and set(out[1]["verdict"]) == {"m", "px", "py"}


def test_semidual_report():
    text = "ring R = poly(101, [x], grevlex)\nmodule C = coker [[x]]\nsemidual C bound 20"
    code, out = reports(text)
    assert code == 0
    assert out[0]["verdict"] == "Fail"
    assert out[0]["certificates"]["witness"] == "Ext^1 ≅ R/(x)"


def test_every_command_runs():
    code, out = reports((FIXTURES / "all_commands.txt").read_text())
    assert code == 0
    assert len(out) == 22
    assert all("error" not in r for r in out)


def test_command_error_sets_exit_code():
    text = (
        "ring R = poly(101, [x], grevlex)\nmodule C = coker [[x]]\nmodule M = coker [[x]]\n"
        "dualizer D = C\ngcdim M dualizer D\ndepth M"
    )
    code, out = reports(text)
    assert code == 1
    assert "error" in out[0] and "error" not in out[1]


def test_parse_error_exit_code(capsys):
    assert run("ring R = poly(101, [x], grevlex)\nmodule M = coker [[x],[y]]", out=io.StringIO()) == 2
    err = json.loads(capsys.readouterr().err)
    assert err["parse_error"]["line"] == 2


def test_reports_are_byte_identical():
    text = (FIXTURES / "all_commands.txt").read_text()
    a, b = io.StringIO(), io.StringIO()
    run(text, seed=3, out=a)
    run(text, seed=3, out=b)
    assert a.getvalue() == b.getvalue()


def test_text_mode_renders_same_commands():
    buf = io.StringIO()
    assert run((FIXTURES / "r3_session.txt").read_text(), fmt="text", out=buf) == 0
    assert buf.getvalue().startswith("gcdim M bound 20")


def test_main_entry_point(tmp_path, capsys):
    f = tmp_path / "s.txt"
    f.write_text("ring R = poly(101, [x,y], grevlex)\nmodule K = coker [[x, y]]\ngcdim K bound 6")
    assert main([str(f), "--bound", "6"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["verdict"] == 2 and report["bound"] == 6


def test_module_entry_point_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "gradedhom", str(FIXTURES / "r3_session.txt")],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert len(proc.stdout.splitlines()) == 2


def test_command_ast():
    s = parse_session("ring R = poly(101, [x], grevlex)\nmodule M = coker [[x]]\next M M index 1")
    c = s.commands[0]
    assert isinstance(c, Command) and c.args == ("M", "M") and c.option("index") == 1
