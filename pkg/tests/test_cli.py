from __future__ import annotations

import json
import subprocess
import sys

import pytest

from pim.cli import EXIT_GUARD, EXIT_IO, EXIT_OK, EXIT_USAGE, main
from pim.eventlog import dump_variants, write_csv
from pim.tree import canonical, parse_text

from .conftest import L0_TREE


@pytest.fixture
def l0_files(tmp_path, l0):
    var = tmp_path / "l0.variants"
    var.write_text(dump_variants(l0))
    csv = tmp_path / "l0.csv"
    with csv.open("w") as fh:
        write_csv(l0, fh)
    return var, csv


def run(capsys, *argv):
    code = main(list(map(str, argv)))
    out, err = capsys.readouterr()
    return code, out, err


def test_discover_variants_and_csv(capsys, l0_files):
    var, csv = l0_files
    code, out, _ = run(capsys, "discover", var)
    assert code == EXIT_OK
    assert canonical(parse_text(out.strip())) == canonical(parse_text(L0_TREE))
    code, out2, _ = run(capsys, "discover", csv)
    assert out2 == out


@pytest.mark.parametrize("emit, marker", [("json", '"op"'), ("dot", "digraph"), ("tree-dot", "digraph"), ("bpmn-json", "gateway_pairs"), ("report", "fitness")])
def test_emit_formats(capsys, l0_files, emit, marker):
    code, out, _ = run(capsys, "discover", l0_files[0], "--emit", emit)
    assert code == EXIT_OK and marker in out


def test_verbose_prints_stats_and_trace(capsys, l0_files):
    code, _, err = run(capsys, "discover", l0_files[0], "-v")
    assert code == EXIT_OK
    assert "traces=16 events=61" in err and "cut (" in err


def test_graph_marks_removed_edges(capsys, l0_files):
    code, out, _ = run(capsys, "graph", l0_files[0], "-f", 81)
    assert code == EXIT_OK
    assert out.count("style=dashed, color=red]") == 4


def test_output_file(capsys, tmp_path, l0_files):
    target = tmp_path / "tree.txt"
    assert run(capsys, "discover", l0_files[0], "-o", target)[0] == EXIT_OK
    assert target.read_text().startswith("->(a")


def test_evaluate(capsys, tmp_path, l0_files):
    tree = tmp_path / "t.txt"
    tree.write_text(L0_TREE + "\n")
    code, out, _ = run(capsys, "evaluate", tree, l0_files[0], "--json")
    assert code == EXIT_OK
    report = json.loads(out)
    # only <a,g,c,g> deviates: two deletions against <a,g>
    assert report["fitness"] == pytest.approx(1 - (2 / 6) / 16)
    assert report["size"] > 0


def test_scores_cuts_stats(capsys, l0_files):
    code, out, _ = run(capsys, "scores", l0_files[0])
    assert code == EXIT_OK and out.startswith("a,b,xor")
    code, out, _ = run(capsys, "cuts", l0_files[0], "--top", 3)
    assert code == EXIT_OK and len(out.splitlines()) == 3
    code, out, _ = run(capsys, "stats", l0_files[0])
    assert out.splitlines()[:2] == ["traces\t16", "events\t61"]


def test_error_exit_codes(capsys, tmp_path, l0_files):
    assert run(capsys, "discover", tmp_path / "missing.csv")[0] == EXIT_IO
    bad = tmp_path / "bad.xes"
    bad.write_text("<log><trace>")
    assert run(capsys, "discover", bad)[0] == EXIT_IO
    assert run(capsys, "discover", l0_files[0], "-f", 150)[0] == EXIT_USAGE
    assert run(capsys, "discover", l0_files[1], "--activity-col", "nope")[0] == EXIT_IO
    assert run(capsys, "frobnicate")[0] == EXIT_USAGE
    tree = tmp_path / "t.txt"
    tree.write_text("/\\(a, b, c, d, e, f, g, h)")
    assert run(capsys, "evaluate", tree, l0_files[0], "--language-limit", 100)[0] == EXIT_GUARD
    tree.write_text("->(a,")
    assert run(capsys, "evaluate", tree, l0_files[0])[0] == EXIT_IO


def test_empty_file_gives_tau(capsys, tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    code, out, _ = run(capsys, "discover", empty)
    assert code == EXIT_OK and out.strip() == "tau"


def test_module_entry_point_reads_stdin(l0):
    proc = subprocess.run(
        [sys.executable, "-m", "pim", "discover", "-", "--format", "variants"],
        input=dump_variants(l0), capture_output=True, text=True, check=True,
    )
    assert proc.stdout.startswith("->(a")
