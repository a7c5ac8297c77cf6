from pathlib import Path

import pytest

from captree import parse_tree
from captree.cli import main

FIXTURES = Path(__file__).parent / "fixtures"
PATH3 = str(FIXTURES / "path_121.ctree")


@pytest.fixture
def labelling(tmp_path):
    p = tmp_path / "sigma.lab"
    p.write_text("assign a = {4}\nassign b = {2,3}\nassign c = {1}\n")
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_destinations(capsys):
    code, out, _ = run(capsys, "destinations", PATH3)
    assert code == 0
    assert out.splitlines() == ["1 a", "2 b", "3 b", "4 c"]


def test_invert_report(capsys, labelling):
    code, out, _ = run(capsys, "invert", PATH3, labelling)
    assert code == 0
    lines = out.splitlines()
    assert "LABELPAIR 4@a 1@c rule=E1" in lines
    assert "NODEPAIR a c neighbor=false" in lines
    assert "NODEPAIR a b neighbor=true" in lines


def test_sort_trace(capsys, labelling):
    code, out, _ = run(capsys, "sort", PATH3, labelling, "--strategy", "largest-potential-drop")
    assert code == 0
    assert out.splitlines()[-1].startswith("steps ")
    assert out.splitlines()[-2].endswith("a[1] b[2,3] c[4]")


def test_base_label(capsys):
    code, out, _ = run(capsys, "base-label", PATH3, "--component", "b,c", "--labels", "1,2,4")
    assert code == 0
    assert out == "assign b = {1,2}\nassign c = {4}\n"


def test_confluence_and_weak_order(capsys, tmp_path):
    code, out, _ = run(capsys, "confluence", PATH3, "--restrictions")
    assert (code, out.strip()) == (0, "CONFLUENT")
    dot = tmp_path / "w.dot"
    code, _, err = run(capsys, "weak-order", PATH3, "-o", str(dot))
    assert code == 0 and "sinks 1" in err
    assert dot.read_text().startswith("digraph")


def test_confluence_violation_exits_one(capsys):
    code, out, _ = run(capsys, "confluence", str(FIXTURES / "spider.ctree"), "--restrictions")
    assert code == 1
    assert out.startswith("VIOLATION several sinks")


def test_complex_counts(capsys):
    code, out, _ = run(capsys, "complex", PATH3)
    assert code == 0
    assert out.splitlines() == ["dim 0 faces 8", "dim 1 faces 12", "facets 12"]


def test_shell_verify(capsys):
    code, out, _ = run(capsys, "shell", str(FIXTURES / "hexagon.ctree"), "--first-children", "--verify")
    assert code == 0 and out.splitlines()[-1] == "VERIFIED"
    code, out, _ = run(capsys, "shell", str(FIXTURES / "hub_cap2.ctree"), "--full", "--verify", "--seed", "1")
    assert code == 0 and "VERIFIED" in out


def test_shell_failure_exits_one(capsys):
    code, out, _ = run(capsys, "shell", str(FIXTURES / "spider.ctree"), "--full", "--verify")
    assert code == 1 and "FAILED at facet" in out


def test_homology_formats(capsys):
    code, out, _ = run(capsys, "homology", str(FIXTURES / "chess_3_4.ctree"))
    assert code == 0 and "H~_1 = Z^2" in out
    code, out, _ = run(capsys, "homology", str(FIXTURES / "chess_3_4.ctree"), "--format", "machine")
    assert "2,1,\n" in out


def test_chessboard_emits_a_tree(capsys):
    code, out, _ = run(capsys, "chessboard", "2", "5")
    assert code == 0
    assert parse_tree(out).caps == (1, 3, 1)


def test_validate_edges(capsys):
    code, out, _ = run(capsys, "validate-edges", str(FIXTURES / "hub6_pendant.ctree"), "--half-degree")
    assert code == 0 and "VALID" in out
    code, out, _ = run(capsys, "validate-edges", str(FIXTURES / "hub6.ctree"), "--half-degree")
    assert code == 1 and "INVALID" in out


def test_obstruction(capsys):
    code, out, _ = run(capsys, "obstruction", "3", "4")
    assert code == 0 and "not shellable" in out
    code, out, _ = run(capsys, "obstruction", "3", "4", "--format", "machine")
    assert out.splitlines()[-1] == "obstructed,true"


@pytest.mark.parametrize(
    "argv",
    [
        ["destinations", "missing.ctree"],
        ["bogus"],
        ["shell", PATH3],
        ["sort", PATH3, PATH3],
        ["base-label", PATH3, "--labels", "1,x"],
        ["weak-order", PATH3, "--bound", "0"],
        ["validate-edges", PATH3, "--edges", "a"],
    ],
)
def test_input_errors_exit_two(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_thread_variable_is_validated(capsys, monkeypatch):
    monkeypatch.setenv("CAPTREE_THREADS", "zero")
    code, _, err = run(capsys, "destinations", PATH3)
    assert code == 2 and "CAPTREE_THREADS" in err
