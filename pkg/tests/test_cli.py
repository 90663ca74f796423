import io

import pytest

from clusterleaf.cli import main, to_dot
from clusterleaf.groupoid import FIXTURES
from clusterleaf.quiver import Quiver, load_quiver, parse_quiver

MARKOV = str(FIXTURES / "markov.quiver")


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_mutate_prints_quiver():
    code, out, err = run("mutate", MARKOV, "-k", "1")
    assert code == 0
    assert parse_quiver(out).int_matrix() == [[0, -2, 2], [2, 0, -2], [-2, 2, 0]]
    assert "mutated at" in err


def test_double_mutation_is_byte_identical():
    code, out, _ = run("mutate", MARKOV, "-k", "x1", "-k", "x1")
    assert code == 0
    assert out == load_quiver(MARKOV).to_text()


def test_mutate_to_file(tmp_path):
    target = tmp_path / "out.quiver"
    code, out, _ = run("mutate", MARKOV, "-k", "2", "-o", str(target))
    assert code == 0 and out == ""
    assert len(load_quiver(target)) == 3


def test_unknown_vertex():
    code, _, err = run("mutate", MARKOV, "-k", "nope")
    assert code == 1 and "unknown vertex" in err


def test_parse_error_and_missing_file(tmp_path):
    bad = tmp_path / "bad.quiver"
    bad.write_text("not a quiver\n")
    assert run("mutate", str(bad), "-k", "1")[0] == 2
    assert run("export", str(tmp_path / "missing.quiver"))[0] == 2
    assert run("frobnicate")[0] == 2


def test_export_dot():
    code, out, _ = run("export", str(FIXTURES / "fg6.quiver"))
    assert code == 0
    assert out.startswith('digraph "fg6" {') and out.rstrip().endswith("}")
    assert "shape=box" in out and "->" in out


def test_export_empty_quiver():
    assert to_dot(Quiver.from_matrix([], []), "e") == 'digraph "e" {\n}\n'


def test_verify_kv_and_report(tmp_path):
    path = tmp_path / "rank.txt"
    code, out, _ = run("verify", "rank", "--n", "5", "--trials", "5", "--seed", "7",
                       "--format", "kv", "--report", str(path))
    assert code == 0
    assert "passed=true" in out.splitlines()
    assert path.read_text() == out


def test_verify_failure_exit_code():
    code, out, _ = run("verify", "weyl")
    assert code == 1 and "[FAIL]" in out


def test_missing_fixture_directory(tmp_path):
    code, _, err = run("verify", "n5", "--fixtures", str(tmp_path / "nowhere"))
    assert code == 2 and "not found" in err


def test_empty_fixture_directory(tmp_path):
    code, _, _ = run("verify", "n5", "--fixtures", str(tmp_path))
    assert code == 2
