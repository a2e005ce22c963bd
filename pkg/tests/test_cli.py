import io
import json

import pytest
from hypothesis import given, strategies as st

from qpoisson import cli
from qpoisson.cli import (
    ParseError, RunConfig, UsageError, cmd_normal_form, cmd_pair, main, parse_config,
    parse_element, run_suite,
)
from qpoisson.pbw import Uqg, Uqh, render

SL2 = RunConfig(cartan_matrix=[[2]], w0_word=[1])


def run(args):
    out = io.StringIO()
    code = main(args, out)
    return code, out.getvalue()


def test_normal_form_examples():
    assert cmd_normal_form("E*F", SL2) == "F*E + (K − K^-1)/(q − q^-1)"
    assert cmd_normal_form("1", SL2) == "1"
    assert cmd_normal_form("Fd(1)*Fd(1)", SL2) == "[2]_q Fd(2)"


def test_pair_examples():
    assert cmd_pair("pi-", "F", "E", SL2) == "1/(q^-1 − q)"
    assert cmd_pair("pi-", "1", "1", SL2) == "1"
    assert cmd_pair("rescaled-H", "F", "E", SL2) == "−1/2"


def test_parse_error_has_position():
    with pytest.raises(ParseError) as exc:
        parse_element("E*(F+", Uqg("Q"))
    assert exc.value.pos == 5
    with pytest.raises(ParseError):
        parse_element("E/F", Uqg("Q"))
    with pytest.raises(ParseError):
        parse_element("L", Uqg("Q"))


def test_config_parsing():
    cfg = parse_config("cartan_matrix = 2,-1;-1,2\nw0_word = 1,2,1\nell = 5  # odd\n")
    cfg.validate()
    assert cfg.ell == 5 and cfg.cartan.N == 3


@pytest.mark.parametrize("text", [
    "cartan_matrix = 2,1;1,2\nw0_word = 1,2,1\n",
    "cartan_matrix = 2\nw0_word = 1\ntruncation = 0\n",
    "cartan_matrix = 2\nw0_word = 1\nell = 4\n",
    "cartan_matrix = 2\nw0_word = 1\nsuites = nope\n",
    "colour = red\n",
    "cartan_matrix 2\n",
])
def test_config_errors(text):
    with pytest.raises(UsageError):
        parse_config(text).validate()


def test_exit_codes(tmp_path):
    assert run(["normal-form", "E*F"]) == (0, "F*E + (K − K^-1)/(q − q^-1)\n")
    assert run(["normal-form", "E*"])[0] == 2
    assert run(["verify", "--suite", "nope"])[0] == 2
    assert run(["--report", str(tmp_path / "none.jsonl"), "report"])[0] == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text("cartan_matrix = 2,1;1,2\nw0_word = 1,2,1\n")
    assert run(["--config", str(bad), "normal-form", "E"])[0] == 2
    assert run([])[0] == 2


def test_flags_after_subcommand():
    code, text = run(["pair", "pi-", "F", "E", "--format", "jsonl"])
    assert code == 0 and text == "1/(q^-1 − q)\n"


def test_verify_and_report(tmp_path):
    path = str(tmp_path / "r.jsonl")
    code, text = run(["--report", path, "verify", "--suite", "poisson-table"])
    assert code == 0
    assert text.count("PASS") == 9
    code, again = run(["--report", path, "report", "--format", "jsonl"])
    records = [json.loads(l) for l in again.splitlines()]
    assert len(records) == 9
    assert all(set(r) == {"id", "anchor", "params", "status", "witness"} for r in records)


def test_report_is_byte_deterministic(tmp_path):
    outs = []
    for i, jobs in enumerate((1, 3)):
        path = tmp_path / ("r%d.jsonl" % i)
        code, _ = run(["--report", str(path), "--jobs", str(jobs), "verify",
                       "--suite", "poisson-table", "--suite", "hopf-axioms"])
        assert code == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_failing_row_reports_counterexample(tmp_path, monkeypatch):
    import qpoisson.pbw as pbw
    monkeypatch.setattr(pbw, "hopf_axioms_check",
                        lambda alg, n, e: (3, [("Delta(xy)", (1, 0, 0), (0, 0, 1))]))
    path = str(tmp_path / "r.jsonl")
    code, text = run(["--report", path, "verify", "--suite", "hopf-axioms"])
    assert code == 1
    assert "first failure" in text
    rec = json.loads(open(path).readline())
    assert rec["status"] == "fail"
    assert rec["witness"]["first_failure"] == ["Delta(xy)", [1, 0, 0], [0, 0, 1]]


def test_single_row_suite():
    records = run_suite("membership", SL2)
    assert len(records) == 1 and records[0]["status"] == "pass"


ATOMS = {
    "Q": ["E", "F", "K", "K^-1", "Ed(2)", "Fd(1)", "Kt(0,1)", "Kt(1,2)", "[2]_q", "(1/2)q^-1", "q"],
    "P": ["E", "Fb", "Eb", "L", "L^-1", "K", "(3/2)", "q^2"],
}


def expressions(lattice):
    atom = st.sampled_from(ATOMS[lattice])
    return st.recursive(
        atom,
        lambda inner: st.one_of(
            st.tuples(inner, inner).map(lambda t: "%s*%s" % t),
            st.tuples(inner, inner).map(lambda t: "(%s + %s)" % t),
            st.tuples(inner, inner).map(lambda t: "(%s - %s)" % t),
            inner.map(lambda e: "(%s)^2" % e),
        ),
        max_leaves=5,
    )


@pytest.mark.parametrize("lattice", ["Q", "P"])
@pytest.mark.parametrize("ctor", [Uqg, Uqh])
@given(data=st.data())
def test_render_parse_round_trip(lattice, ctor, data):
    alg = ctor(lattice)
    expr = data.draw(expressions(lattice))
    x, _ = parse_element(expr, alg)
    y, _ = parse_element(render(x), alg)
    assert x == y
