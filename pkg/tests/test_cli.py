import subprocess
import sys

from dplltcert.cli import run_command

UNSAT2 = "p cnft 2 3\n1 2 0\n-1 2 0\n-2 0\n"
EQ_UNSAT = ("p cnft 3 3\na 1 eq a b\na 2 eq b c\na 3 eq a c\n"
            "1 0\n2 0\n-3 0\n")


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_solve_exit_codes(tmp_path, capsys):
    assert run_command(["solve", _write(tmp_path, "u.cnft", UNSAT2)]) == 20
    assert "UNSAT" in capsys.readouterr().out
    assert run_command(["solve", _write(tmp_path, "s.cnft", "p cnft 2 1\n1 -2 0\n")]) == 10
    out = capsys.readouterr().out
    assert out.startswith("SAT") and out.rstrip().endswith("0")
    assert run_command(["solve", _write(tmp_path, "e.cnft", EQ_UNSAT)]) == 20
    assert run_command(["solve", "--theory", "empty", str(tmp_path / "e.cnft")]) == 10


def test_certify_check_translate(tmp_path, capsys):
    prob = _write(tmp_path, "u.cnft", UNSAT2)
    lkd, lkt = str(tmp_path / "p.lkd"), str(tmp_path / "p.lkt")
    assert run_command(["certify", prob, "--out", lkd, "--lkt", lkt]) == 0
    report = capsys.readouterr().out
    assert "0 step-bound violations" in report and "0 translation-bound violations" in report
    assert (tmp_path / "p.lkd.sizes.jsonl").read_text().strip()
    for cert in (lkd, lkt):
        assert run_command(["check", cert, "--problem", prob]) == 0
        assert run_command(["check", cert, "--problem", prob, "--strict"]) == 0
        assert "ACCEPTED" in capsys.readouterr().out
    again = str(tmp_path / "again.lkt")
    assert run_command(["translate", lkd, "--problem", prob, "--out", again]) == 0
    assert (tmp_path / "again.lkt").read_text() == (tmp_path / "p.lkt").read_text()


def test_check_rejects_corruption_and_wrong_problem(tmp_path):
    prob = _write(tmp_path, "u.cnft", UNSAT2)
    lkd = str(tmp_path / "p.lkd")
    assert run_command(["certify", prob, "--out", lkd]) == 0
    text = (tmp_path / "p.lkd").read_text()
    lines = text.splitlines()
    corrupted = _write(tmp_path, "bad.lkd", "\n".join(lines[:-3] + lines[-1:]) + "\n")
    assert run_command(["check", corrupted, "--problem", prob]) != 0
    other = _write(tmp_path, "o.cnft", "p cnft 2 3\n1 2 0\n-1 2 0\n-2 1 0\n")
    assert run_command(["check", lkd, "--problem", other]) != 0
    assert run_command(["check", str(tmp_path / "missing.lkd"), "--problem", prob]) != 0


def test_certify_refuses_sat(tmp_path, capsys):
    prob = _write(tmp_path, "s.cnft", "p cnft 1 1\n1 0\n")
    assert run_command(["certify", prob, "--out", str(tmp_path / "x")]) == 1
    assert "SAT" in capsys.readouterr().err


def test_trace_replay_and_certify_from_trace(tmp_path):
    prob = _write(tmp_path, "e.cnft", EQ_UNSAT)
    trace = str(tmp_path / "t.trace")
    assert run_command(["solve", prob, "--trace", trace, "--strategy", "learning"]) == 20
    assert run_command(["replay", prob, trace]) == 20
    lkd = str(tmp_path / "e.lkd")
    assert run_command(["certify", prob, "--trace", trace, "--out", lkd]) == 0
    assert run_command(["check", lkd, "--problem", prob]) == 0
    lines = (tmp_path / "t.trace").read_text().splitlines()
    _write(tmp_path, "short.trace", "\n".join(lines[1:]) + "\n")
    assert run_command(["replay", prob, str(tmp_path / "short.trace")]) == 1


def test_seeded_solve_is_reproducible(tmp_path):
    prob = _write(tmp_path, "u.cnft", "p cnft 3 4\n1 2 3 0\n-1 2 0\n-2 3 0\n-3 -1 0\n")
    a, b = str(tmp_path / "a"), str(tmp_path / "b")
    run_command(["solve", prob, "--seed", "5", "--trace", a])
    run_command(["solve", prob, "--seed", "5", "--trace", b])
    assert (tmp_path / "a").read_text() == (tmp_path / "b").read_text()


def test_module_entry_point(tmp_path):
    prob = _write(tmp_path, "u.cnft", UNSAT2)
    done = subprocess.run([sys.executable, "-m", "dplltcert", "solve", prob],
                          capture_output=True, text=True)
    assert done.returncode == 20 and "UNSAT" in done.stdout
