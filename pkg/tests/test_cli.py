import pytest

from cadred import corpus
from cadred.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_tree(capsys):
    code, out, _ = run(capsys, "tree", "corpus:trousers", "--cad", "C")
    assert code == 0
    assert out.startswith("# cadred-report/1 command=tree\n")
    assert "red: {Psi_1.2}" in out


def test_seed_is_recorded(capsys):
    _, out, _ = run(capsys, "bell", "9", "--seed", "7")
    assert out.splitlines()[:2] == ["# cadred-report/1 command=bell", "# seed=7"]
    assert "coarsenings: 21146" in out


def test_reduce(capsys):
    code, out, _ = run(capsys, "reduce", "corpus:trousers", "--cad", "C", "--pivot", "1.2")
    assert code == 0
    assert "verdict: fails" in out
    assert "values -1/2 vs 0" in out


def test_confluence_exit_codes(capsys):
    code, out, _ = run(capsys, "confluence", "corpus:trousers", "--cad", "Cbar", "--expect-unique")
    assert code == 1 and "MultipleNormalForms" in out
    code, out, _ = run(capsys, "confluence", "corpus:disk", "--cad", "Csecond", "--expect-unique")
    assert code == 0 and "UniqueNormalForm" in out


def test_min1d(capsys):
    code, out, _ = run(capsys, "min1d", "[-2,0) u {1}", "[0,inf)")
    assert code == 0
    assert "sections: {-2, 0, 1}" in out
    assert "labels: ([0,0], [1,0], [1,0], [0,1], [0,1], [1,1], [0,1])" in out


def test_fiber_and_behaviour(capsys):
    _, out, _ = run(capsys, "fiber", "corpus:disk", "--at", "3/5")
    assert "fiber D: [-4/5,4/5]" in out
    _, out, _ = run(capsys, "behaviour", "corpus:halfspace0", "--at", "0")
    assert "behaviour: (0, 0, 1)" in out
    _, out, _ = run(capsys, "bpartition", "corpus:halfspace0", "--base", "Base")
    assert "constant: true" in out


def test_oracle_and_transred(capsys):
    code, out, _ = run(capsys, "oracle", "validate", "corpus:disk", "--cad", "Csecond")
    assert code == 0 and "agreement: true" in out
    _, out, _ = run(capsys, "transred", "corpus:disk", "--cad", "Csecond")
    assert "transitive_reduction: true" in out


def test_corpus_commands(capsys):
    _, out, _ = run(capsys, "corpus", "list")
    assert len(out.splitlines()) == 1 + len(corpus.names())
    code, out, _ = run(capsys, "corpus", "run", "trousers")
    assert code == 0 and "Psi_1.2=fails" in out


def test_out_directory(tmp_path, capsys):
    target = tmp_path / "run"
    code, _, _ = run(capsys, "dag", "corpus:trousers", "--cad", "Cbar", "--out", str(target), "--dot")
    assert code == 0
    report = (target / "report.txt").read_text()
    assert report.startswith("# cadred-report/1 command=dag")
    dots = list(target.glob("*.dot"))
    assert dots and "digraph" in dots[0].read_text()


def test_dot_to_stdout(capsys):
    _, out, _ = run(capsys, "tree", "corpus:trousers", "--cad", "C", "--dot")
    assert "digraph cadtree" in out


def test_file_input(tmp_path, capsys):
    path = tmp_path / "line.cadspec"
    path.write_text(corpus.fixture_text("line-family"))
    code, out, _ = run(capsys, "minimal", str(path), "--cad", "Fine")
    assert code == 0 and "level1: -2, 0, 1" in out


@pytest.mark.parametrize("argv", [
    ["tree", "missing.cadspec"],
    ["tree", "corpus:nonesuch"],
    ["reduce", "corpus:trousers", "--cad", "C", "--pivot", "2"],
    ["min1d", "[1, 0]"],
    ["tree", "corpus:trousers", "--cad", "Nope"],
])
def test_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err.startswith("error:")
