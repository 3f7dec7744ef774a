import json

import pytest

from hardsquares.cli import main
from hardsquares.sweep import (
    BUDGET_EXCEEDED,
    COLUMNS,
    SweepRow,
    SweepSpec,
    emit_table,
    exit_code,
    in_k1_range,
    in_stable_range,
    parse_table,
    stability_sweep,
)


def row(n, w, h, k, rows):
    return next(r for r in rows if (r.n, r.w, r.h, r.k) == (n, w, h, k))


@pytest.fixture(scope="module")
def small_rows():
    return stability_sweep(SweepSpec((2, 3), 3, 3, 1))


def test_range_predicates():
    assert in_stable_range(3, 3, 3, 1)
    assert not in_stable_range(3, 3, 2, 1)
    assert in_stable_range(3, 6, 5, 2) == (5 >= 4 and 30 - 3 >= max(12, 12))
    assert in_k1_range(3, 3, 3, 1) and not in_k1_range(3, 3, 3, 2)
    assert not in_k1_range(4, 3, 3, 1)


def test_sweep_examples(small_rows):
    r = row(3, 3, 3, 1, small_rows)
    assert (r.betti_square, r.betti_point, r.stable_range, r.agrees) == (3, 3, True, True)
    r = row(3, 3, 2, 1, small_rows)
    assert not r.stable_range
    assert r.betti_square > 3  # two extra cycles on the narrow board
    r = row(2, 2, 2, 1, small_rows)
    assert r.betti_square == r.betti_point == 1
    assert exit_code(small_rows) == 0


def test_transposed_boards_agree(small_rows):
    for r in small_rows:
        t = row(r.n, r.h, r.w, r.k, small_rows)
        assert (t.betti_square, t.cells) == (r.betti_square, r.cells)


def test_table_formats(small_rows):
    assert emit_table([], "csv") == ",".join(COLUMNS) + "\n"
    one = emit_table(small_rows[:1], "csv")
    assert len(one.splitlines()) == 2
    assert parse_table(one) == small_rows[:1]
    assert parse_table(emit_table(small_rows, "csv")) == sorted(small_rows, key=lambda r: (r.n, r.w, r.h, r.k))
    doc = json.loads(emit_table(small_rows[:2], "json"))
    assert list(doc[0]) == COLUMNS
    with pytest.raises(ValueError):
        emit_table(small_rows, "xml")


def test_cache_hits_are_identical(tmp_path):
    spec = SweepSpec((2,), 3, 3, 1, cache_dir=str(tmp_path / "cache"))
    cold = stability_sweep(spec)
    assert len(list((tmp_path / "cache").glob("*.json"))) == 3
    warm = stability_sweep(spec)
    assert warm == cold
    assert emit_table(warm) == emit_table(cold)


def test_unwritable_cache(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(OSError, match="file"):
        stability_sweep(SweepSpec((2,), 2, 2, 1, cache_dir=str(blocker / "sub")))


def test_budget_rows_are_marked():
    rows = stability_sweep(SweepSpec((3,), 3, 3, 1, budget=100))
    big = row(3, 3, 3, 1, rows)
    assert big.betti_square == BUDGET_EXCEEDED and big.agrees is None and big.cells is None
    assert exit_code(rows) == 3
    assert "budget-exceeded" in emit_table(rows)


def test_violation_exit_code():
    bad = SweepRow(3, 3, 3, 1, 4, 3, True, True, False, 10, 0.1)
    assert exit_code([bad]) == 2


def test_spec_validation():
    with pytest.raises(ValueError):
        SweepSpec((), 3, 3, 1)
    with pytest.raises(ValueError):
        SweepSpec((2,), 1, 3, 1)
    with pytest.raises(ValueError):
        SweepSpec((2,), 3, 3, 1, budget=0)


def test_cli_sweep(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("HARDSQUARES_CACHE", str(tmp_path / "envcache"))
    assert main(["sweep", "--n", "2", "--w-max", "3", "--h-max", "3", "--k-max", "1"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == ",".join(COLUMNS)
    assert (tmp_path / "envcache").is_dir()
    target = tmp_path / "t.json"
    assert main(["sweep", "--n", "1-2", "--w-max", "2", "--h-max", "2", "--k-max", "0", "--format", "json", "--out", str(target)]) == 0
    assert len(json.loads(target.read_text())) == 2
    assert main(["sweep", "--n", "3", "--w-max", "3", "--h-max", "3", "--k-max", "1", "--budget", "50", "--cache-dir", str(tmp_path / "b")]) == 3


def test_cli_homology(capsys):
    assert main(["homology", "--w", "2", "--h", "2", "--n", "2"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["betti"][:3] == [1, 1, 0]
    assert main(["homology", "--w", "2", "--h", "2", "--n", "2", "--kuhn"]) == 0
    assert json.loads(capsys.readouterr().out)["betti"][:2] == [1, 1]


def test_cli_puzzle(capsys):
    assert main(["puzzle", "components", "--w", "2", "--h", "2", "--n", "3", "--parity"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["components"] == 2 and sorted(doc["parity"]) == ["even", "odd"]
    assert main(["puzzle", "path", "--from", "1,2/0,0", "--to", "2,1/0,0"]) == 0
    moves = json.loads(capsys.readouterr().out)
    assert all(set(m) == {"label", "direction"} for m in moves)
    assert main(["puzzle", "path", "--from", "1,2/0,3", "--to", "1,3/0,2"]) == 1
    capsys.readouterr()
    assert main(["puzzle", "parity", "--board", "1,2,3,4/5,6,7,8/9,10,11,12/13,15,14,0"]) == 0
    assert capsys.readouterr().out.strip() in {"even", "odd"}


def test_cli_basis(capsys):
    assert main(["basis", "wheels", "--n", "3", "--k", "2"]) == 0
    assert capsys.readouterr().out.split() == ["W(1,2,3)", "W(1,3,2)"]
    assert main(["basis", "reutenauer", "--letters", "1-3"]) == 0
    assert capsys.readouterr().out.split() == ["[[1,2],3]", "[[1,3],2]"]
    assert main(["basis", "top", "--m", "4", "--r", "3"]) == 0
    assert len(capsys.readouterr().out.split()) == 6


def test_cli_spectral(capsys):
    assert main(["spectral", "pages", "--w", "2", "--h", "2", "--n", "2"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["collapse"]["passed"]


def test_cli_reports_errors(capsys):
    assert main(["homology", "--w", "1", "--h", "2", "--n", "1"]) == 1
    assert "error" in capsys.readouterr().err
