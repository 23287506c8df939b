import re

import pytest

from motionopt.cli import main


def kv(out: str) -> dict[str, str]:
    return dict(line.split("=", 1) for line in out.splitlines() if "=" in line and not line.startswith("config:"))


@pytest.fixture
def handeye_files(tmp_path):
    inst, truth = tmp_path / "he.txt", tmp_path / "he_truth.txt"
    assert main(["gen", "handeye", "--model", "1", "--m", "8", "--seed", "4", "--out", str(inst), "--truth", str(truth)]) == 0
    return inst, truth


def test_gen_deterministic(tmp_path):
    a, b, c = tmp_path / "a.txt", tmp_path / "b.txt", tmp_path / "c.txt"
    for path, seed in ((a, 1), (b, 1), (c, 2)):
        assert main(["gen", "slam", "--n", "6", "--topology", "cycle", "--loops", "1", "--seed", str(seed), "--out", str(path)]) == 0
    assert a.read_text() == b.read_text()
    assert a.read_text() != c.read_text()


def test_gen_requires_seed(tmp_path, capsys):
    assert main(["gen", "handeye", "--m", "3", "--out", str(tmp_path / "x.txt")]) == 1


def test_eval_only_at_truth(handeye_files, capsys):
    inst, truth = handeye_files
    code = main(["solve", "handeye", "--in", str(inst), "--x0", "file", "--x0-file", str(truth), "--eval-only", "--format", "kv"])
    assert code == 0
    assert float(kv(capsys.readouterr().out)["objective"]) <= 1e-20


def test_slam_eval_only_at_truth(tmp_path, capsys):
    g, t = tmp_path / "g.txt", tmp_path / "t.txt"
    main(["gen", "slam", "--n", "7", "--topology", "grid", "--seed", "3", "--out", str(g), "--truth", str(t)])
    capsys.readouterr()
    assert main(["solve", "slam", "--in", str(g), "--x0", "file", "--x0-file", str(t), "--eval-only", "--format", "kv"]) == 0
    assert float(kv(capsys.readouterr().out)["objective"]) <= 1e-20


def test_solve_converges_and_reports(handeye_files, tmp_path, capsys):
    inst, _ = handeye_files
    report = tmp_path / "report.txt"
    code = main(["solve", "handeye", "--in", str(inst), "--sigma", "2.0", "--report", str(report), "--format", "kv"])
    assert code == 0
    values = kv(report.read_text())
    for key in ("final_objective", "iterations", "converged", "wall_time", "x0"):
        assert key in values
    assert float(values["final_objective"]) <= 1e-12
    assert len(values["x0"].split(",")) == 6
    assert "sigma=2.0" in report.read_text().splitlines()[0]


def test_max_iter_exit_code(tmp_path, capsys):
    path = tmp_path / "noisy.txt"
    main(["gen", "handeye", "--m", "6", "--seed", "1", "--rot-noise", "0.05", "--trans-noise", "0.05", "--out", str(path)])
    assert main(["solve", "handeye", "--in", str(path), "--max-iter", "1"]) == 2


def test_slam_spanning_tree(tmp_path, capsys):
    path = tmp_path / "g.txt"
    main(["gen", "slam", "--n", "10", "--topology", "cycle", "--loops", "2", "--seed", "5", "--out", str(path)])
    capsys.readouterr()
    assert main(["solve", "slam", "--in", str(path), "--x0", "spanning-tree", "--format", "kv"]) == 0
    values = kv(capsys.readouterr().out)
    assert float(values["final_objective"]) <= 1e-12
    assert "x9" in values and "x10" not in values


def test_information_note(tmp_path, capsys):
    path = tmp_path / "g.txt"
    path.write_text("EDGE_SE3:QUAT 0 1 1 0 0 0 0 0 1 " + " ".join(["1"] * 21) + "\n")
    assert main(["solve", "slam", "--in", str(path)]) == 0
    assert "information matrices are ignored" in capsys.readouterr().err


def test_malformed_input(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("A 0 0 0 0 0 0 1\nB 0 0 0 0 0 0 1\nA 0 0 0 1 0 0\n")
    assert main(["solve", "handeye", "--in", str(path)]) == 1
    assert re.search(r"line 3", capsys.readouterr().err)


def test_missing_file(tmp_path, capsys):
    assert main(["solve", "slam", "--in", str(tmp_path / "nope.txt")]) == 1


def test_spanning_tree_for_handeye_rejected(handeye_files, capsys):
    assert main(["solve", "handeye", "--in", str(handeye_files[0]), "--x0", "spanning-tree"]) == 1


def test_check(capsys):
    assert main(["check", "--samples", "200", "--seed", "3"]) == 0
    first = capsys.readouterr().out
    main(["check", "--samples", "200", "--seed", "3"])
    assert capsys.readouterr().out == first
    assert "config: command=check samples=200 seed=3" in first


def test_check_rejects_zero_samples(capsys):
    assert main(["check", "--samples", "0"]) == 1
