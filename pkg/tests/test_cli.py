import json
import subprocess
import sys

import pytest

from tapekit import serialize as ser
from tapekit.casebook import VN_SOURCE, build_majority, build_vn, vn_fuel
from tapekit.cli import main
from tapekit.lang import Con, I, K, app, to_sexpr
from tapekit.modality import TOP, CrispLift, TestTable, check_entailment

H = Con("H")


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text if isinstance(text, str) else json.dumps(text))
        return str(p)
    return write


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out else None), out.err


def test_eval(capsys, files):
    vn = files("vn.sk", VN_SOURCE)
    assert run(capsys, "eval", vn, "01:0") == (0, {"value": "H"}, "")
    assert run(capsys, "eval", vn, ":0", "--fuel", "200")[1] == {"bottom": "fuel-exhausted"}
    k = files("k.sk", "(app (app K (con H)) (con T))")
    assert run(capsys, "eval", k, "1:0")[1] == {"value": "H"}


def test_default_fuel_from_environment(capsys, files, monkeypatch):
    vn = files("vn.sk", VN_SOURCE)
    monkeypatch.setenv("TAPEKIT_DEFAULT_FUEL", "12")
    assert run(capsys, "eval", vn, "0001:0")[1] == {"bottom": "fuel-exhausted"}
    monkeypatch.setenv("TAPEKIT_DEFAULT_FUEL", "40")
    assert run(capsys, "eval", vn, "0001:0")[1] == {"value": "H"}
    monkeypatch.setenv("TAPEKIT_DEFAULT_FUEL", "lots")
    assert run(capsys, "eval", vn, "0001:0")[0] == 2


def test_law(capsys, files):
    vn = files("vn.sk", VN_SOURCE)
    code, doc, _ = run(capsys, "law", vn, "--fuel", str(vn_fuel(2)))
    assert code == 0 and doc == {"H": "3/8", "T": "3/8", "bottom": "1/4"}
    assert run(capsys, "law", files("h.sk", "(con H)"))[1] == {"H": "1"}
    biased = files("m.json", {"default_bias": "1/3"})
    assert run(capsys, "law", files("r.sk", "(read 0 0)"), "--measure", biased)[1] == {"b0": "2/3", "b1": "1/3"}


def test_trace_round_trips(capsys, files):
    vn = files("vn.sk", VN_SOURCE)
    code, doc, _ = run(capsys, "trace", vn, "--fuel", str(vn_fuel(2)))
    assert code == 0 and ser.tree_from_json(doc) == build_vn(2).tree()


def test_entail_exit_codes(capsys, files):
    good = files("good.json", ser.judgment_spec_to_json(check_entailment(TOP, I, CrispLift({H}), [H], 10)))
    code, doc, _ = run(capsys, "entail", good)
    assert code == 0 and doc["verdict"] == "holds" and doc["counterexample"] is None
    bad_j = check_entailment(TOP, app(K, build_vn(2).code), CrispLift({H, Con("T")}), [H], vn_fuel(2) + 1)
    bad = files("bad.json", ser.judgment_spec_to_json(bad_j))
    code, doc, _ = run(capsys, "entail", bad)
    assert code == 1 and doc["verdict"] == "fails"
    assert doc["counterexample"]["pattern"] == [["0,0", 0], ["0,1", 0], ["0,2", 0], ["0,3", 0]]
    assert (doc["counterexample"]["lhs"], doc["counterexample"]["rhs"]) == ("1", "0")
    # the report is itself an acceptable input
    report = files("report.json", doc)
    assert run(capsys, "entail", report)[0] == 1


def test_malformed_inputs_exit_two(capsys, files):
    assert run(capsys, "entail", files("x.json", "{not json"))[0] == 2
    assert run(capsys, "entail", files("y.json", {"evidence": "(app"}))[0] == 2
    assert run(capsys, "entail", "/nonexistent/spec.json")[0] == 2
    assert run(capsys, "eval", files("c.sk", "(con H)"), "01:2")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "transport", files("ok.json", {"evidence": "I", "psi": {"crisp": ["H"]},
                                                       "universe": ["(con H)"]}))[0] == 2
    assert run(capsys, "casebook", "majority", "--p", "3/2")[0] == 2


def test_transport(capsys, files):
    spec = {"evidence": "I", "psi": {"crisp": ["H"]}, "universe": ["(con H)"], "fuel": 10}
    code, doc, _ = run(capsys, "transport", files("id.json", spec), "--map", "identity")
    assert code == 0 and doc["verdict"] == "holds" and doc["inputs"]["fuel"] == 13
    fx = build_vn(2)
    alpha_j = check_entailment(TestTable({H: fx.alpha(H)}), app(K, fx.code), CrispLift({H}), [H], fx.fuel + 1)
    code, doc, _ = run(capsys, "transport", files("a.json", ser.judgment_spec_to_json(alpha_j)), "--map", "flip")
    assert code == 0
    moved_phi = ser.prop_from_json(doc["inputs"]["phi"]).at(H)
    assert moved_phi == fx.alpha(Con("T"))
    maj = files("maj.json", ser.judgment_spec_to_json(build_majority(3, 2).judgment()))
    code, doc, _ = run(capsys, "transport", maj, "--map", "split:3")
    assert code == 0 and doc["inputs"]["space"] == 1 and doc["map"] == "split:3"


def test_transport_of_failing_judgment_exits_one(capsys, files):
    bad_j = check_entailment(TOP, app(K, build_vn(1).code), CrispLift({H}), [H], vn_fuel(1) + 1)
    code, doc, _ = run(capsys, "transport", files("b.json", ser.judgment_spec_to_json(bad_j)), "--map", "flip")
    assert code == 1 and "error" in doc


def test_extract(capsys, files):
    bad_j = check_entailment(TOP, app(K, build_vn(2).code), CrispLift({H, Con("T")}), [H], vn_fuel(2) + 1)
    code, doc, _ = run(capsys, "extract", files("b.json", ser.judgment_spec_to_json(bad_j)))
    assert code == 1 and doc["verdict"] == "vacuous"
    assert doc["rows"] == [{"code": to_sexpr(H), "lhs": "1", "rhs": "3/4"}]
    maj = files("maj.json", ser.judgment_spec_to_json(build_majority(3, 2).judgment()))
    code, doc, _ = run(capsys, "extract", maj, "--measure", files("m.json", {"default_bias": "2/3"}))
    assert code == 0 and doc["verdict"] == "sound" and doc["rows"][0]["rhs"] == "20/27"


def test_casebook(capsys):
    code, doc, _ = run(capsys, "casebook", "vn", "--pairs", "3")
    assert code == 0 and doc["law"] == {"H": "7/16", "T": "7/16", "bottom": "1/8"}
    code, doc, _ = run(capsys, "casebook", "majority", "--p", "2/3")
    assert code == 0 and doc["amplified"] == "20/27" == doc["oracle"] == doc["closed_form"]
    assert run(capsys, "casebook", "majority", "--p", "1/2")[1]["amplified"] == "1/2"


def test_out_flag_and_determinism(capsys, files, tmp_path):
    vn = files("vn.sk", VN_SOURCE)
    out = tmp_path / "law.json"
    assert main(["law", vn, "--fuel", "38", "--out", str(out)]) == 0
    assert capsys.readouterr().out == ""
    first = out.read_text()
    main(["law", vn, "--fuel", "38", "--out", str(out)])
    assert out.read_text() == first
    assert json.loads(first) == {"H": "7/16", "T": "7/16", "bottom": "1/8"}


def test_module_entry_point_is_byte_identical(files):
    vn = files("vn.sk", VN_SOURCE)
    cmd = [sys.executable, "-m", "tapekit", "trace", vn, "--fuel", "26"]
    a = subprocess.run(cmd, capture_output=True, text=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, text=True, check=True).stdout
    assert a == b and a.endswith("}\n")
