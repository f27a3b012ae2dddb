import json
import os
import subprocess
import sys

import pytest

from necklace.cli import main


def run(*args, env=None):
    e = dict(os.environ)
    e.update(env or {})
    p = subprocess.run([sys.executable, "-m", "necklace.cli", *args], capture_output=True, text=True, env=e)
    return p.returncode, p.stdout, p.stderr


def test_survey_gasket():
    code, out, _ = run("survey", "builtin:gasket")
    assert code == 0
    js = json.loads(out)
    assert js["N2"] == 1 and js["n"] == 3


def test_output_is_byte_identical():
    a = run("survey", "builtin:good4", "--level-cap", "1")
    b = run("survey", "builtin:good4", "--level-cap", "1", "--threads", "3")
    assert a[0] == 0 and a[1] == b[1]


def test_rigid_outputs():
    code, out, _ = run("rigid", "builtin:gasket", "builtin:gasket")
    js = json.loads(out)
    assert code == 0 and js["count"] == 6 and len(js["maps"]) == 6
    code, out, _ = run("rigid", "builtin:good4", "builtin:good4")
    js = json.loads(out)
    assert code == 0 and js["count"] == "uncountable"
    assert js["tables_at_depth"] == {"1": 8, "2": 128}


def test_validate_and_goodness(tmp_path):
    assert main(["catalog", "--write", str(tmp_path)]) == 0
    code, out, _ = run("validate", str(tmp_path / "fig2.json"))
    assert code == 0 and json.loads(out)["ok"]
    code, out, _ = run("goodness", str(tmp_path / "fig2.json"))
    assert code == 0 and json.loads(out)["good"] is False


def test_components_and_uniqueness():
    code, out, _ = run("components", "builtin:gasket", "1(2)", "2(3)")
    js = json.loads(out)
    assert code == 0 and js["is_cut"] and sorted(c["ncp"] for c in js["components"]) == [0, 1]
    code, out, err = run("uniqueness", "builtin:fig2")
    assert code == 0 and "not good" in err and json.loads(out)["skipped"]


def test_extract_and_render(tmp_path):
    out_spec = tmp_path / "g.json"
    code, out, _ = run("extract", "builtin:gasket", "--out", str(out_spec))
    assert code == 0 and not json.loads(out)["rejected"] and out_spec.exists()
    svg = tmp_path / "f.svg"
    code, _, _ = run("render", "builtin:fig2", "--level", "2", "--mark", "z2=21(3)", "--cut", "321(3),3311(3)",
                     "--out", str(svg))
    assert code == 0 and svg.read_text().startswith("<?xml")
    first = svg.read_bytes()
    run("render", "builtin:fig2", "--level", "2", "--mark", "z2=21(3)", "--cut", "321(3),3311(3)", "--out", str(svg))
    assert svg.read_bytes() == first


@pytest.mark.parametrize(
    "args,env,code",
    [
        (["survey"], None, 1),
        (["frobnicate"], None, 1),
        (["render", "builtin:fig2", "--cut", "1(3)", "--out", "/tmp/x.svg"], None, 1),
        (["survey", "builtin:gasket"], {"NECKLACE_MAX_CELLS": "10"}, 2),
        (["survey", "builtin:nosuch"], None, 3),
        (["survey", "/nonexistent/spec.json"], None, 3),
        (["components", "builtin:gasket", "1(9"], None, 3),
    ],
)
def test_exit_codes(args, env, code):
    assert run(*args, env=env)[0] == code


def test_malformed_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{")
    assert run("validate", str(p))[0] == 3
    p.write_text(json.dumps({"n": 3, "glue": [{"k": 1, "u": "(", "v": "(1)"}]}))
    assert run("validate", str(p))[0] == 3
