import json

import pytest

from cmonoids.abelian import FiniteAbelianGroup
from cmonoids.cli import main, parse_scenario, render_records, render_text, run_scenario
from cmonoids.errors import MissingField, ParseError, UnknownGroupName

R313 = """\
[monoid]
kind = remark313
[analyses]
run = class_semigroup, seminormal, seminormal_bruteforce, class_group_completion
"""

EX43 = """\
[monoid]
kind = example43
chain = 2 > 1
[analyses]
run = seminormal, half_factorial_criterion, half_factorial_bruteforce, transfer_check
[parameters]
box_cap = 6
length_cap = 3
"""

S3 = """\
[monoid]
kind = product_one
group = symmetric 3
[analyses]
run = seminormal, class_group_completion
"""

GEN = """\
[monoid]
kind = generators
units = 2
primes = 2
generators = 2 0; 3 0; 1 1 @ 1; 0 2
[analyses]
run = class_semigroup, seminormal
"""


def records(text, **kw):
    return [json.loads(line) for line in render_records(run_scenario(parse_scenario(text), **kw)).splitlines()]


def analysis(recs, name):
    return next(r for r in recs if r["type"] == "analysis" and r["analysis"] == name)


def test_parse_generators():
    s = parse_scenario(GEN)
    assert s.kind == "generators"
    assert s.monoid["units"] == FiniteAbelianGroup((2,))
    assert len(s.monoid["generators"]) == 4
    assert s.analyses == ("class_semigroup", "seminormal")


def test_parse_parameters():
    s = parse_scenario(EX43)
    assert s.box_cap == 6 and s.length_cap == 3


@pytest.mark.parametrize(
    "text,exc",
    [
        ("[monoid]\nkind = remark313\n", MissingField),
        ("[monoid]\nkind = remark313\n[analyses]\nrun =\n", MissingField),
        ("[analyses]\nrun = seminormal\n", MissingField),
        ("[monoid]\nkind = circle\n[analyses]\nrun = seminormal\n", ParseError),
        ("[monoid]\nkind = remark313\n[analyses]\nrun = everything\n", ParseError),
        ("[monoid]\nkind = product_one\ngroup = foo 3\n[analyses]\nrun = seminormal\n", UnknownGroupName),
        ("[monoid]\nkind = generators\nprimes = 2\ngenerators = 1\n[analyses]\nrun = seminormal\n", ParseError),
        ("[monoid]\nkind = remark313\n[analyses]\nrun = seminormal\n[parameters]\nbox_cap = -1\n", ParseError),
        ("not an ini file", ParseError),
    ],
)
def test_parse_errors(text, exc):
    with pytest.raises(exc):
        parse_scenario(text)


def test_unknown_group_reports_line():
    with pytest.raises(UnknownGroupName, match="line 3"):
        parse_scenario("[monoid]\nkind = product_one\ngroup = foo 3\n[analyses]\nrun = seminormal\n")


def test_remark313_records():
    recs = records(R313)
    assert recs[0]["type"] == "monoid" and recs[0]["alpha"] == 2
    assert analysis(recs, "class_semigroup")["classes"] == 9
    sn = analysis(recs, "seminormal")
    assert sn["verdict"] is False and sn["witness"] and sn["idempotents"] == 3
    bf = analysis(recs, "seminormal_bruteforce")
    assert bf["verdict"] is False and bf["witness"] == "p1^3 * p2"
    assert analysis(recs, "class_group_completion")["group"] == "trivial"
    assert recs[-1] == {"schema": "cmonoids-report/1", "type": "summary", "completed": True, "analyses": 4}


def test_example43_records():
    recs = records(EX43)
    assert analysis(recs, "seminormal")["verdict"] is True
    hf = analysis(recs, "half_factorial_criterion")
    assert hf["verdict"] is True and hf["status"] == "applicable"
    assert sorted(hf["properties"]) == ["P1", "P2", "P3", "P4"]
    assert all(p["passed"] for p in hf["properties"].values())
    assert analysis(recs, "half_factorial_bruteforce")["verdict"] is True
    tr = analysis(recs, "transfer_check")
    assert tr["verdict"] is True and [r["k"] for r in tr["per_k"]] == [0, 1]
    lengths = [r for r in recs if r["type"] == "lengths"]
    assert lengths and all(r["delta"] == [] for r in lengths)


def test_product_one_s3():
    recs = records(S3)
    assert analysis(recs, "seminormal")["verdict"] is False
    assert analysis(recs, "class_group_completion")["group"] == "Z/2"


def test_criterion_falls_back_when_not_seminormal():
    recs = records("[monoid]\nkind = generators\nprimes = 1\ngenerators = 2; 3\n[analyses]\nrun = half_factorial_criterion\n")
    hf = analysis(recs, "half_factorial_criterion")
    assert hf["status"] == "inapplicable" and hf["reason"] == "not seminormal"
    assert hf["verdict"] is False


def test_records_are_byte_identical():
    s = parse_scenario(EX43)
    a = render_records(run_scenario(s, seed=5))
    b = render_records(run_scenario(parse_scenario(EX43), seed=5))
    assert a == b
    assert "seconds" not in a
    assert "seconds" in render_records(run_scenario(parse_scenario(S3), timing=True))


def test_text_rendering():
    text = render_text(run_scenario(parse_scenario(R313)))
    assert "=== class_semigroup ===" in text and "classes: 9" in text
    assert "verdict: False" in text and text.rstrip().endswith("completed: True")


def test_build_error_record():
    # the generators of the numerical monoid <2> do not give a dense monoid
    recs = records("[monoid]\nkind = generators\nprimes = 1\ngenerators = 2\n[analyses]\nrun = seminormal\n")
    assert recs[0]["type"] == "error" and recs[0]["error"] == "NotDense"


def write(tmp_path, text, name="s.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_main_exit_codes(tmp_path, capsys):
    assert main(["--scenario", write(tmp_path, R313), "--format", "records"]) == 0
    out = capsys.readouterr().out
    assert all(json.loads(line)["schema"] == "cmonoids-report/1" for line in out.splitlines())
    # remark313 is not seminormal, so the structure check cannot run
    bad_run = R313.replace("class_group_completion", "theorem11_check")
    assert main(["--scenario", write(tmp_path, bad_run)]) == 1
    assert "PreconditionNotSeminormal" in capsys.readouterr().out
    path = write(tmp_path, "[monoid]\nkind = product_one\ngroup = foo 3\n[analyses]\nrun = seminormal\n")
    assert main(["--scenario", path]) == 2
    assert capsys.readouterr().err.strip() == f"{path}: UnknownGroupName: line 3: unknown group 'foo'"
    assert main(["--scenario", str(tmp_path / "missing.ini")]) == 2


def test_main_rejects_bad_caps(tmp_path):
    with pytest.raises(SystemExit):
        main(["--scenario", write(tmp_path, R313), "--box-cap", "0"])


def test_figures(tmp_path, capsys):
    out = tmp_path / "fig"
    out.mkdir()
    assert main(["--scenario", write(tmp_path, R313), "--figures", str(out), "--format", "records"]) == 0
    recs = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    figs = [r for r in recs if r["type"] == "figure"]
    assert {r["figure"] for r in figs} == {"cayley_heatmap", "lengths"}
    for r in figs:
        with open(r["path"], "rb") as fh:
            assert fh.read(8) == b"\x89PNG\r\n\x1a\n"
