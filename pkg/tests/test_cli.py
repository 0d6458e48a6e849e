import csv
import io
import random
import subprocess
import sys

import pytest

from pmcbce.cli import CSV_HEADER, EXIT_MISMATCH, EXIT_OK, EXIT_TIMEOUT, RunConfig, benchmark, main, run
from pmcbce import parse_dimacs
from pmcbce.counter import BceMode, Counter

from _data import EXAMPLE1_DIMACS


@pytest.fixture
def example_file(tmp_path):
    p = tmp_path / "example1.cnf"
    p.write_text(EXAMPLE1_DIMACS)
    return p


def big_random(path, n=300, m=1200, seed=7):
    rng = random.Random(seed)
    lines = [f"p cnf {n} {m}", "c p show " + " ".join(map(str, range(1, n // 2))) + " 0"]
    for _ in range(m):
        vs = rng.sample(range(1, n + 1), 3)
        lines.append(" ".join(str(v if rng.random() < 0.5 else -v) for v in vs) + " 0")
    path.write_text("\n".join(lines) + "\n")
    return path


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(RunConfig(*argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("mode", list(BceMode))
def test_running_example_count_line(example_file, mode):
    code, out, _ = invoke(str(example_file), mode)
    assert code == EXIT_OK
    assert out.splitlines()[:2] == ["c s type pmc", "c s exact arb int 4"]


def test_missing_file(tmp_path):
    code, out, err = invoke(str(tmp_path / "nope.cnf"))
    assert code != 0
    assert "exact" not in out
    assert "nope.cnf" in err


def test_malformed_file(tmp_path):
    p = tmp_path / "bad.cnf"
    p.write_text("p cnf 2 1\n1 7 0\n")
    code, out, err = invoke(str(p))
    assert code != 0
    assert out == ""
    assert "line 2" in err


def test_stats_lines(example_file):
    code, out, _ = invoke(str(example_file), BceMode.DYN, True)
    assert code == EXIT_OK
    keys = [l.split()[2] for l in out.splitlines() if l.startswith("c stat ")]
    assert keys == ["decisions", "blocked_removed", "cache_hits", "max_depth"]
    removed = next(l for l in out.splitlines() if "blocked_removed" in l)
    assert int(removed.split()[-1]) >= 4


def test_oracle_check(example_file):
    code, out, _ = invoke(str(example_file), BceMode.DYN, False, True)
    assert code == EXIT_OK
    assert "c oracle ok" in out


def test_oracle_mismatch_is_loud(example_file, monkeypatch):
    monkeypatch.setattr("pmcbce.cli.brute_force_projected_count", lambda f: 5)
    code, _, err = invoke(str(example_file), BceMode.DYN, False, True)
    assert code == EXIT_MISMATCH
    assert "MISMATCH" in err


def test_oracle_skipped_beyond_bound(tmp_path):
    code, out, _ = invoke(str(big_random(tmp_path / "big.cnf", n=60, m=20)), BceMode.DYN, False, True)
    assert code == EXIT_OK
    assert "c oracle skipped" in out


def test_timeout_exit(tmp_path):
    code, out, _ = invoke(str(big_random(tmp_path / "big.cnf")), BceMode.DYN, False, False, None, 0.2)
    assert code == EXIT_TIMEOUT
    assert "exact" not in out


def test_repeated_runs_identical(example_file, tmp_path):
    big = big_random(tmp_path / "mid.cnf", n=40, m=120, seed=3)
    for path in (example_file, big):
        for mode in BceMode:
            outs = {invoke(str(path), mode, True)[1] for _ in range(3)}
            assert len(outs) == 1


def test_main_flags(example_file, capsys):
    assert main([str(example_file), "--bce", "off", "--cache-cap", "2"]) == EXIT_OK
    assert "c s exact arb int 4" in capsys.readouterr().out
    assert main([]) != 0
    assert main(["--bench", str(example_file)]) != 0
    assert main(["--bench", str(example_file.parent), "--modes", "sideways"]) != 0


def test_module_entry_point(example_file):
    proc = subprocess.run([sys.executable, "-m", "pmcbce", str(example_file), "--bce", "pre"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "c s exact arb int 4" in proc.stdout


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_benchmark_running_example(example_file):
    out = io.StringIO()
    assert benchmark(str(example_file.parent), [BceMode.OFF, BceMode.DYN], out) == EXIT_OK
    header, off, dyn = rows(out.getvalue())
    assert header == CSV_HEADER
    assert off[:3] == ["example1.cnf", "off", "OK"] and dyn[:3] == ["example1.cnf", "dyn", "OK"]
    assert off[3] == dyn[3] == "4"
    assert int(off[6]) == 0
    assert int(dyn[6]) >= 4


def test_benchmark_empty_directory(tmp_path):
    out = io.StringIO()
    benchmark(str(tmp_path), list(BceMode), out)
    assert rows(out.getvalue()) == [CSV_HEADER]


def test_benchmark_timeout_and_error_rows(tmp_path):
    big_random(tmp_path / "a_big.cnf")
    (tmp_path / "b_bad.cnf").write_text("not dimacs\n")
    (tmp_path / "c_ok.cnf").write_text(EXAMPLE1_DIMACS)
    out = io.StringIO()
    benchmark(str(tmp_path), [BceMode.DYN], out, timeout=1.0)
    body = rows(out.getvalue())[1:]
    assert [r[0] for r in body] == ["a_big.cnf", "b_bad.cnf", "c_ok.cnf"]
    assert [r[2] for r in body] == ["TIMEOUT", "ERROR", "OK"]
    assert body[2][3] == "4"


def test_benchmark_parallel_matches_serial(tmp_path):
    (tmp_path / "e1.cnf").write_text(EXAMPLE1_DIMACS)
    big_random(tmp_path / "e2.cnf", n=30, m=90, seed=1)
    serial, parallel = io.StringIO(), io.StringIO()
    benchmark(str(tmp_path), list(BceMode), serial)
    benchmark(str(tmp_path), list(BceMode), parallel, jobs=2)

    def stable(text):
        return [r[:4] + r[5:] for r in rows(text)]

    assert stable(serial.getvalue()) == stable(parallel.getvalue())


def test_off_mode_never_removes(tmp_path):
    big = big_random(tmp_path / "mid.cnf", n=30, m=90, seed=2)
    assert Counter(parse_dimacs(big.read_text()), BceMode.OFF).count().stats.blocked_removed == 0
