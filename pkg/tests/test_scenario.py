import copy
import json

import pytest

from lefloc.cli import corpus_dir
from lefloc.expr import ExprError, parse_laurent, parse_ratfun
from lefloc.morse import BPoly
from lefloc.ratfun import rf_eq
from lefloc.scenario import (ScenarioError, evaluate, load_scenario, monomial_json,
                             parse_bpoly, parse_expectation, parse_monomial, parse_ratfun_json,
                             ratfun_json, scenario_from_dict, verify)


class TestExpr:
    def test_division_keeps_factors(self, vt2):
        f = parse_ratfun("(1+lambda*mu)/((1-lambda^2)*(1-mu^2))", vt2)
        assert len(f.den_factors()) == 2

    def test_powers(self, vt2):
        assert parse_ratfun("lambda**2", vt2) == parse_ratfun("lambda^2", vt2)
        assert parse_ratfun("(lambda*mu)^(1/2)", vt2) == parse_ratfun("lambda^(1/2)*mu^(1/2)", vt2)
        assert parse_ratfun("(1-lambda)^-2", vt2) == parse_ratfun("1/((1-lambda)*(1-lambda))", vt2)

    @pytest.mark.parametrize("bad", ["nu + 1", "lambda +", "lambda^0.5", "(1+lambda)^(1/2)",
                                     "1/(1+lambda+mu)", "lambda^(1/4)", "'x'"])
    def test_errors(self, vt2, bad):
        with pytest.raises(ExprError):
            parse_ratfun(bad, vt2)

    def test_laurent(self, vt2):
        p = parse_laurent("lambda^-1 + 2*mu", vt2)
        assert len(p.terms) == 2
        with pytest.raises(ExprError):
            parse_laurent("1/(1-lambda)", vt2)


class TestJson:
    def test_monomial_round_trip(self, vt2):
        m = vt2.monomial({"lambda": "-3/2", "mu": 2})
        obj = monomial_json(m)
        assert obj == {"lambda": "-3/2", "mu": 2}
        assert parse_monomial(obj, vt2) == m

    def test_ratfun_round_trip(self, vt2):
        f = parse_ratfun("-(lambda*mu)^(1/2)*(1+lambda)/((1-1/lambda)*(1-mu^2))", vt2)
        obj = json.loads(json.dumps(ratfun_json(f)))
        assert set(obj) >= {"num", "den_factors", "unit", "sign"}
        assert rf_eq(parse_ratfun_json(obj, vt2), f)
        assert rf_eq(parse_ratfun_json(obj["text"], vt2), f)

    def test_bpoly(self, vt2):
        assert parse_bpoly({"0": 1, "2": 2}, vt2) == BPoly([1, 0, 2])
        assert parse_bpoly("1+2*b^2", vt2) == BPoly([1, 0, 2])

    def test_bad_monomial(self, vt2):
        with pytest.raises(ScenarioError):
            parse_monomial({"nu": 1}, vt2)


class TestExpectations:
    def test_parse(self):
        e = parse_expectation("expand_p0[a; inside; 3] == 1 + lambda")
        assert e.quantity == "expand_p0" and e.args == ("a", "inside", "3")
        assert e.expected == "1 + lambda"

    @pytest.mark.parametrize("bad", ["global_p0", "== 1", "global p0 == 1"])
    def test_malformed(self, bad):
        with pytest.raises(ScenarioError):
            parse_expectation(bad)

    def test_unknown_quantity_fails_cleanly(self, corpus):
        out = evaluate(corpus["quadric"], parse_expectation("bogus == 1"))
        assert not out.passed and out.error


class TestLoading:
    def test_json_error_position(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"name": "x",\n "variables": [}\n')
        with pytest.raises(ScenarioError, match="line 2"):
            load_scenario(p)

    def test_missing_fields(self):
        with pytest.raises(ScenarioError):
            scenario_from_dict({"name": "x"})

    def test_two_data_kinds(self):
        d = {"name": "x", "variables": ["lambda"], "dimension": 1, "fixed_points": [
            {"name": "p", "smooth": {"weights": [{"lambda": 1}]},
             "modules": {"0": {"0": [{"gens": [{}], "ring": [{"lambda": 1}]}]}}}]}
        with pytest.raises(ScenarioError):
            scenario_from_dict(d)


def _raw_corpus():
    return {p.stem: json.loads(p.read_text()) for p in sorted(corpus_dir().glob("*.json"))}


def test_whole_corpus_verifies(corpus):
    assert len(corpus) == 10
    for name, sc in corpus.items():
        outs = verify(sc)
        assert outs and all(o.passed for o in outs), (name, [o for o in outs if not o.passed])


GLOBAL_QUANTITIES = ("global_p", "global_bfq", "spin_global", "chi_y ", "signature", "euler",
                     "morse ", "morse_euler")


def _mutations():
    for name, data in _raw_corpus().items():
        for i, fp in enumerate(data.get("fixed_points", [])):
            yield name, "fixed_points", i, fp["name"]
        for i, cp in enumerate(data.get("critical_points", [])):
            yield name, "critical_points", i, cp["name"]


@pytest.mark.parametrize("name,kind,index,label", list(_mutations()))
def test_removing_a_local_breaks_a_global(name, kind, index, label):
    data = copy.deepcopy(_raw_corpus()[name])
    del data[kind][index]
    # drop expectations that name the removed point; globals must now fail
    data["expectations"] = [e for e in data["expectations"] if f"[{label}" not in e
                            and f";{label}" not in e]
    globals_ = [e for e in data["expectations"] if e.startswith(GLOBAL_QUANTITIES)
                or e.split("==")[0].strip() in ("chi_y", "morse", "signature", "euler", "sd",
                                                "asd", "riemann_roch")]
    assert globals_, "scenario has no global expectation to break"
    sc = scenario_from_dict(data)
    outs = [evaluate(sc, parse_expectation(e)) for e in globals_]
    assert any(not o.passed for o in outs)
