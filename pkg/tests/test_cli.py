from __future__ import annotations

import io
import json
import subprocess
import sys

import pytest

from centext import cli
from centext.extensions import heisenberg_example, pullback_check, registry_qces
from centext.hhs import check_axioms, grid_model, model_to_doc
from centext.reports import render
from centext.triangle import verify_triangle_remark


def run(*argv):
    out = io.StringIO()
    code = cli.run(list(argv), out=out)
    return code, out.getvalue()


def no_floats(obj):
    if isinstance(obj, float):
        return False
    if isinstance(obj, dict):
        return all(no_floats(v) for v in obj.values())
    if isinstance(obj, list):
        return all(no_floats(v) for v in obj)
    return True


COMMANDS = [
    ["cocycle", "check", "--bundle", "heisenberg", "--radii", "1..2"],
    ["cocycle", "sup-norm", "--bundle", "heisenberg-mod2", "--radii", "1..3"],
    ["extension", "build", "--bundle", "trivial", "--radii", "3"],
    ["extension", "probe", "--bundle", "trivial", "--noise", "2", "--seed", "11", "--radii", "3"],
    ["qm", "defect", "--qm", "brooks:a b", "--radii", "1..2"],
    ["qm", "defect", "--qm", "chi:trivial", "--noise", "1", "--seed", "3", "--radii", "1..2"],
    ["qm", "homogenize", "--qm", "brooks:a b", "--element", "a b b"],
    ["qm", "busemann", "--shifts", "1,-2", "--elements", "a;b;a b a"],
    ["qce", "pullback", "--qce", "heisenberg", "--radius", "2"],
    ["qce", "boundary", "--qce", "twisted", "--radius", "6"],
    ["qce", "extendability", "--images", "1,2", "--radii", "1..4"],
    ["examples", "heisenberg", "--radii", "1..4"],
    ["examples", "triangle", "--orders", "20", "--radius", "3"],
    ["hhs", "check", "--model", "builtin:grid", "--delta", "2"],
    ["hhs", "min-delta", "--model", "builtin:path", "--delta", "3"],
    ["hhs", "restrict", "--model", "builtin:grid-extra", "--threshold", "2"],
    ["hhs", "quotient", "--model", "builtin:cycle", "--delta", "3"],
]


@pytest.mark.parametrize("argv", COMMANDS, ids=lambda a: " ".join(a[:2]))
def test_every_command_passes_and_emits_exact_documents(argv):
    code, text = run(*argv, "--format", "doc")
    assert code == 0, text
    assert no_floats(json.loads(text))


def test_examples_triangle_matches_library():
    code, text = run("examples", "triangle", "--format", "doc")
    assert code == 0
    assert text == render(verify_triangle_remark(100, 6), "doc")


def test_examples_heisenberg_csv_rows():
    code, text = run("examples", "heisenberg", "--radii", "1..8", "--format", "csv")
    assert code == 0
    lines = text.strip().splitlines()
    assert lines[0].split(",")[:2] == ["r", "sup_norm"]
    assert [tuple(map(int, ln.split(",")[:2])) for ln in lines[1:]] == [(r, r * r) for r in range(1, 9)]
    assert text == render(heisenberg_example(range(1, 9)), "csv")


def test_hhs_check_model_file(tmp_path):
    path = tmp_path / "grid.hhs"
    path.write_text(json.dumps(model_to_doc(grid_model())))
    code, text = run("hhs", "check", "--model", str(path), "--delta", "2", "--format", "doc")
    assert code == 0
    assert text == render(check_axioms(grid_model(), 2), "doc")


def test_qce_pullback_matches_library():
    code, text = run("qce", "pullback", "--qce", "free-cover", "--radius", "2", "--format", "doc")
    assert code == 0
    assert text == render(pullback_check(registry_qces()["free-cover"](), 2), "doc")


def test_failed_verification_exits_1_with_witness():
    code, text = run("hhs", "check", "--model", "builtin:corrupted-grid", "--delta", "2", "--format", "doc")
    assert code == 1
    doc = json.loads(text)
    proj = next(a for a in doc["axioms"] if a["index"] == "1")
    assert proj["passed"] is False and proj["witness"][0] == "lipschitz"
    code, _ = run("hhs", "min-delta", "--model", "builtin:corrupted-grid", "--delta", "3")
    assert code == 1


def test_input_errors_exit_2(tmp_path, capsys):
    assert run("hhs", "check", "--model", str(tmp_path / "missing.json"), "--delta", "1")[0] == 2
    assert run("cocycle", "check", "--bundle", "nope")[0] == 2
    assert run("qm", "defect", "--qm", "mystery:1")[0] == 2
    assert run("hhs", "restrict", "--model", "builtin:grid", "--threshold", "1", "--delta", "2")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run("hhs", "check", "--model", str(bad), "--delta", "1")[0] == 2
    assert cli.main(["hhs", "check", "--bogus-flag"]) == 2
    assert cli.main(["nonsense"]) == 2
    assert cli.main(["examples", "heisenberg", "--radii", "5..1"]) == 2


def test_resource_cap_exits_3():
    assert run("cocycle", "sup-norm", "--bundle", "trivial-free", "--radii", "6", "--cap", "50")[0] == 3


@pytest.mark.parametrize("argv", [c for c in COMMANDS if c[0] in ("cocycle", "qm", "hhs", "extension")],
                         ids=lambda a: " ".join(a[:2]))
def test_output_independent_of_jobs(argv):
    outs = {run(*argv, "--jobs", str(j), "--format", f)[1] for j in (1, 4) for f in ("doc",)}
    assert len(outs) == 1


def test_formats_render_same_rows():
    _, table = run("examples", "heisenberg", "--radii", "1..3")
    assert "sup_norm" in table and "r_squared" in table
    _, csv_text = run("hhs", "check", "--model", "builtin:path", "--delta", "1", "--format", "csv")
    assert csv_text.splitlines()[0].startswith("index,name,passed")


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "centext", "examples", "triangle", "--orders", "10", "--radius", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "passed: True" in proc.stdout
