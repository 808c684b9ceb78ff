import json
from fractions import Fraction

import pytest

from mincover.cli import main
from mincover.encoding import pair_design
from mincover.family import SetFamily
from mincover.io import parse_family, write_family


@pytest.fixture
def pair_file(tmp_path):
    path = tmp_path / "p.txt"
    write_family(SetFamily.of([{0, 1}, {1, 2}], uniformity=2), path)
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_tau(capsys, pair_file):
    code, out, _ = run(capsys, "tau", pair_file)
    assert code == 0 and out.splitlines() == ["tau 1", "cover 1"]


def test_covers_json(capsys, pair_file):
    code, out, _ = run(capsys, "--format", "json", "covers", pair_file)
    data = json.loads(out)
    assert code == 0 and data["covers"] == [[1], [0, 2]] and data["c"] == "3/4" and data["at_most_one"]


def test_covers_text_and_flag_after_command(capsys, pair_file):
    code, out, _ = run(capsys, "covers", pair_file, "--lambda", "3/2", "--threads", "2")
    assert code == 0 and "# c_3/2 = 10/9" in out


def test_weight(capsys, pair_file):
    code, out, _ = run(capsys, "weight", pair_file, "--lambda", "2", "--covers")
    assert code == 0 and out.splitlines() == ["lambda 2/1", "weight 1/2", "c 3/4"]


def test_construct_round_trip(capsys, tmp_path):
    out_path = tmp_path / "k6.txt"
    code, out, _ = run(capsys, "construct", "k6-design", "-o", str(out_path))
    assert code == 0 and "6 sets" in out
    assert parse_family(out_path.read_text()) == pair_design(6)


def test_construct_stdout(capsys):
    code, out, _ = run(capsys, "construct", "example1", "--n", "3")
    assert code == 0 and len(parse_family(out)) == 10


def test_decompose(capsys, tmp_path):
    path = tmp_path / "d.txt"
    write_family(SetFamily.of([set(range(6)), set(range(5)) | {6}, set(range(7, 13))], uniformity=6), path)
    code, out, _ = run(capsys, "--format", "json", "decompose", str(path), "--k", "2")
    assert code == 0 and json.loads(out)["classes"] == [[0, 1], [2]]


def test_spread(capsys, pair_file):
    code, out, _ = run(capsys, "spread", pair_file, "--R", "2")
    assert code == 0 and "holds" in out


def test_encode(capsys, tmp_path):
    path = tmp_path / "k6.txt"
    write_family(pair_design(6), path)
    code, out, _ = run(capsys, "encode", str(path))
    assert code == 0 and "c_n 1131/3125" in out
    code, out, _ = run(capsys, "--format", "json", "encode", str(path), "--l", "3")
    assert code == 0 and json.loads(out)["verdict"] == "holds"


def test_verify_counts_on_stderr(capsys):
    code, out, err = run(capsys, "verify", "st", "random:1", "--count", "5", "--format", "json")
    assert code == 0 and len(out.splitlines()) == 5
    assert "st: 5 holds" in err


def test_verify_exit_code_tracks_failures(capsys):
    code, out, _ = run(capsys, "verify", "pgap", "random:0", "--count", "40")
    assert code == (1 if " fails" in out else 0)


def test_search_with_ledger(capsys, tmp_path):
    ledger = tmp_path / "ledger.jsonl"
    code, out, _ = run(capsys, "search", "--n", "3", "--ledger", str(ledger), "--seed", "1")
    assert code == 0 and "min_sum_a=3" in out
    assert len(ledger.read_text().splitlines()) == 9


def test_parse_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("ground 2\n0 5\n")
    code, _, err = run(capsys, "tau", str(bad))
    assert code == 2 and "bad.txt:2:" in err


def test_missing_file(capsys, tmp_path):
    assert run(capsys, "tau", str(tmp_path / "none.txt"))[0] == 2


def test_hypothesis_error(capsys, pair_file):
    assert run(capsys, "encode", pair_file, "--l", "1")[0] == 2


def test_budget_exit_code(capsys, tmp_path):
    path = tmp_path / "e1.txt"
    run(capsys, "construct", "example1", "--n", "4", "-o", str(path))
    code, _, err = run(capsys, "--budget", "5", "covers", str(path))
    assert code == 3 and "budget" in err


def test_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2


def test_uniform_family_reports_bound(capsys, tmp_path):
    path = tmp_path / "f.txt"
    write_family(SetFamily.of([{0, 1}, {2, 3}], uniformity=2), path)
    code, out, _ = run(capsys, "covers", str(path))
    assert code == 0 and "# c_n <= 1: yes" in out


def test_spread_capture_default_rounds(capsys, pair_file):
    code, out, _ = run(capsys, "--format", "json", "spread", pair_file, "--R", "2", "--delta", "1/4", "--trials", "500")
    capture = json.loads(out.splitlines()[1])
    expected = 1 - (1 - 0.25) ** 11
    assert code == 0 and abs(float(Fraction(capture["details"]["density"])) - expected) < 1e-12
