import csv
import io
import json
import subprocess
import sys
from fractions import Fraction
from math import comb

import pytest

from illume.certify import IlluminationCertificate, verify_certificate
from illume.cli import main
from illume.directions import read_directions


def write_body(path, **spec):
    path.write_text(json.dumps(spec), encoding="utf-8")
    return str(path)


@pytest.fixture
def bodies(tmp_cwd):
    return {
        "cube3": write_body(tmp_cwd / "cube3.json", n=3, family="cube"),
        "ell1_3": write_body(tmp_cwd / "ell1_3.json", n=3, family="ell1"),
        "ell1_6": write_body(tmp_cwd / "ell1_6.json", n=6, family="ell1"),
        "topk2_3": write_body(tmp_cwd / "topk2_3.json", n=3, family="topk", k=2),
        "cap": write_body(tmp_cwd / "cap.json", n=3, family="cube_cap_l1", r="2"),
        "bad": write_body(tmp_cwd / "bad.json", n=3, family="dual_orbit", weights=[["0", "1", "1"]]),
    }


class TestIlluminate:
    def test_cube(self, bodies, tmp_cwd, capsys):
        assert main(["illuminate", "--body", bodies["cube3"]]) == 0
        out = capsys.readouterr().out
        assert "directions: 8" in out and "status: Certified" in out
        cert = (tmp_cwd / "cube3.cert.json").read_text()
        assert IlluminationCertificate.from_json(cert).certified
        assert len(read_directions(tmp_cwd / "cube3.dirs.txt")) == 8

    def test_t2_uncovered(self, bodies, capsys):
        assert main(["illuminate", "--body", bodies["ell1_3"], "--directions", "T2"]) == 1
        lines = [ln for ln in capsys.readouterr().out.splitlines() if ln.startswith("uncovered")]
        assert sorted(lines) == sorted(
            ["uncovered: -1 0 0", "uncovered: 1 0 0", "uncovered: 0 -1 0", "uncovered: 0 1 0"]
        )

    def test_adaptive_far(self, bodies, tmp_cwd, capsys):
        assert main(["illuminate", "--body", bodies["ell1_6"], "--seed", "42", "--mode", "adaptive"]) == 0
        out = capsys.readouterr().out
        count = int(next(ln for ln in out.splitlines() if ln.startswith("directions:")).split()[1])
        assert count < 64
        assert verify_certificate((tmp_cwd / "ell1_6.cert.json").read_text())

    def test_byte_identical(self, bodies, tmp_cwd):
        for tag in ("a", "b"):
            main(["illuminate", "--body", bodies["ell1_6"], "--seed", "7",
                  "--out", f"{tag}.json", "--directions-out", f"{tag}.txt"])
        assert (tmp_cwd / "a.json").read_bytes() == (tmp_cwd / "b.json").read_bytes()
        assert (tmp_cwd / "a.txt").read_bytes() == (tmp_cwd / "b.txt").read_bytes()

    def test_directions_file(self, bodies, tmp_cwd):
        (tmp_cwd / "d.txt").write_text("# ok\n-1 -1 -1\n1 1 1\n-1 0 0\n")
        assert main(["illuminate", "--body", bodies["cube3"], "--directions", "d.txt"]) == 1

    def test_bad_spec(self, bodies):
        assert main(["illuminate", "--body", bodies["bad"]]) == 2

    def test_missing_file(self, tmp_cwd):
        assert main(["illuminate", "--body", "nope.json"]) == 2

    def test_cap_exceeded(self, tmp_cwd):
        big = write_body(tmp_cwd / "big.json", n=12, family="ell1")
        assert main(["illuminate", "--body", big, "--cap", "8"]) == 2

    def test_unknown_flag(self, bodies):
        assert main(["illuminate", "--body", bodies["cube3"], "--colour"]) == 2


class TestAudit:
    def test_cube(self, bodies, capsys):
        assert main(["audit", "--body", bodies["cube3"], "--samples", "500"]) == 0
        rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
        assert {r["check"] for r in rows} >= {"always_positive", "ordering", "norm_implication", "triangle"}
        assert all(r["violations"] == "0" for r in rows)

    def test_topk_json(self, bodies, capsys):
        assert main(["audit", "--body", bodies["topk2_3"], "--samples", "2000", "--seed", "7", "--format", "json"]) == 0
        rows = json.loads(capsys.readouterr().out)
        assert sum(r["violations"] for r in rows) == 0

    def test_bad(self, bodies):
        assert main(["audit", "--body", bodies["bad"]]) == 2


class TestSimulate:
    def test_table(self, tmp_cwd):
        assert main(["simulate", "--n", "12", "--k", "2", "--trials", "100000", "--seed", "1", "--out", "t.csv"]) == 0
        row = next(csv.DictReader(open(tmp_cwd / "t.csv")))
        assert row["q"] == str(Fraction(comb(10, 1), 4 * comb(12, 3)))
        assert row["mc_within_3sigma"] == "1"

    def test_chain(self, capsys):
        assert main(["simulate", "--chain", "--n-max", "40"]) == 0
        rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
        assert len(rows) == sum((n + 1) // 2 for n in range(2, 41))
        assert all(r["chain_holds"] == "1" for r in rows)

    def test_threshold(self, capsys):
        assert main(["simulate", "--threshold", "--n-max", "80"]) == 0
        err = capsys.readouterr().err
        assert "minimal n0 =" in err

    def test_ek_and_identical(self, tmp_cwd):
        args = ["simulate", "--n", "6", "--ek-seeds", "3", "--count", "40"]
        main(args + ["--out", "a.csv"])
        main(args + ["--out", "b.csv"])
        assert (tmp_cwd / "a.csv").read_bytes() == (tmp_cwd / "b.csv").read_bytes()

    def test_nothing_requested(self):
        assert main(["simulate"]) == 2


class TestSmallCommands:
    def test_vertices(self, bodies, tmp_cwd):
        assert main(["vertices", "--body", bodies["cap"], "--out", "v.txt"]) == 0
        lines = (tmp_cwd / "v.txt").read_text().splitlines()
        assert lines[0].endswith("count=12") and len(lines) == 13
        # the vertex list re-parses as a directions file
        assert len(read_directions(tmp_cwd / "v.txt")) == 12

    def test_norm(self, bodies, capsys):
        assert main(["norm", "--body", bodies["topk2_3"], "--x", "3 -1 2"]) == 0
        assert capsys.readouterr().out.strip() == "5"

    def test_distance(self, bodies, capsys):
        assert main(["distance", "--body", bodies["cap"]]) == 0
        assert capsys.readouterr().out.strip() == "3/2"

    def test_min_ill(self, bodies, tmp_cwd, capsys):
        assert main(["min-ill", "--body", bodies["ell1_3"], "--out", "m.json"]) == 0
        assert "minimum pool cover: 6" in capsys.readouterr().out
        assert verify_certificate((tmp_cwd / "m.json").read_text())

    def test_console_script(self, bodies):
        res = subprocess.run([sys.executable, "-m", "illume.cli", "distance", "--body", bodies["cube3"]],
                             capture_output=True, text=True)
        assert res.returncode == 0 and res.stdout.strip() == "1"
