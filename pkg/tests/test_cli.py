import csv
import io
import json

import pytest
from click.testing import CliRunner

from wgopuc.cli import RunConfig, cli, moments_table, poly_document, spectrum_table, verblunsky_table
from wgopuc.qseries import PrecisionContext, q_pochhammer, qmono, UnitPhase


@pytest.fixture
def runner():
    return CliRunner()


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def run(runner, *args):
    return runner.invoke(cli, [str(a) for a in args])


class TestMoments:
    def test_zeroth_row(self, runner):
        res = run(runner, "moments", "--n-min", 0, "--n-max", 0)
        assert res.exit_code == 0
        (row,) = rows_of(res.stdout)
        ctx = PrecisionContext()
        assert ctx.mp.mpf(row["re"]) == 1 and ctx.mp.mpf(row["im"]) == 0

    def test_conjugate_symmetry(self, runner):
        mp = PrecisionContext().mp
        rows = {int(r["n"]): r for r in rows_of(run(runner, "moments", "--n-min", -6, "--n-max", 6).stdout)}
        for n in range(1, 7):
            plus = mp.mpc(rows[n]["re"], rows[n]["im"])
            minus = mp.mpc(rows[-n]["re"], rows[-n]["im"])
            assert abs(plus - mp.conj(minus)) < 1e-70

    def test_k2_bruteforce_column(self, runner):
        ctx = PrecisionContext()
        res = run(runner, "moments", "--k", 2, "--n-min", -3, "--n-max", 3, "--bruteforce")
        assert res.exit_code == 0
        phase = UnitPhase.golden()
        p = ctx.real("0.5")
        for r in rows_of(res.stdout):
            n = int(r["n"])
            closed = ctx.mp.mpc(r["re"], r["im"])
            assert abs(closed - 1 / q_pochhammer(qmono(p, n), 2, phase, ctx)) < 1e-70
            assert abs(ctx.mp.mpc(r["bf_re"], r["bf_im"]) - closed) < 1e-29

    def test_json(self, runner):
        doc = json.loads(run(runner, "moments", "--n-min", 1, "--n-max", 2, "--format", "json").stdout)
        assert [d["n"] for d in doc] == [1, 2]
        assert all(isinstance(d["re"], str) for d in doc)


class TestVerblunsky:
    def test_rows(self, runner):
        res = run(runner, "verblunsky", "--n-max", 40)
        assert res.exit_code == 0
        rows = rows_of(res.stdout)
        ctx = PrecisionContext()
        assert rows[0]["n"] == "-1" and ctx.mp.mpf(rows[0]["re"]) == -1
        for r in rows[1:]:
            mod = ctx.mp.mpf(r["abs"])
            assert ctx.mp.mpf(r["band_lo"]) < mod < 1
            assert ctx.mp.mpf(r["defect"]) < ctx.tol_rel

    def test_rotated_defect(self):
        header, rows = verblunsky_table(RunConfig(rotation_phi="0.4"), 10)
        ctx = PrecisionContext()
        assert all(ctx.mp.mpf(r[-1]) < ctx.tol_rel for r in rows[1:])

    def test_k2_rejected(self, runner):
        assert run(runner, "verblunsky", "--k", 2).exit_code == 2


class TestPoly:
    def test_degree_one(self, runner):
        ctx = PrecisionContext()
        doc = json.loads(run(runner, "poly", "--n", 1).stdout)
        assert doc["degree"] == 1 and doc["kind"] == "opuc"
        sigma1 = (1 - ctx.real("0.5")) / (1 - ctx.real("0.5") * UnitPhase.golden().q(ctx))
        c0 = ctx.mp.mpc(*doc["coeffs"][0])
        assert abs(c0 + sigma1) < 1e-70
        assert ctx.mp.mpf(doc["coeffs"][1][0]) == 1
        assert doc["params"] == {"p": "0.5", "chi": "golden", "k": 1, "phi": "0"}

    def test_all_paths(self, runner):
        doc = json.loads(run(runner, "poly", "--n", 8, "--all-paths").stdout)
        assert set(doc["paths"]) == {"recurrence", "hyper", "toeplitz"}
        assert float(doc["max_disagreement"]) < 2.0**-100 * 100

    @pytest.mark.parametrize("path", ["recurrence", "hyper", "toeplitz"])
    def test_single_path(self, runner, path):
        res = run(runner, "poly", "--n", 4, "--path", path, "--chi", "2/7")
        assert res.exit_code == 0
        assert json.loads(res.stdout)["path"] == path

    def test_pastro_k2(self, runner):
        res = run(runner, "poly", "--n", 3, "--k", 2, "--pastro", "--all-paths")
        assert res.exit_code == 0
        doc = json.loads(res.stdout)
        assert doc["kind"] == "biorthogonal"
        assert set(doc["paths"]) == {"hyper", "toeplitz"}
        assert float(doc["max_disagreement"]) < 1e-60

    def test_k2_without_pastro(self, runner):
        assert run(runner, "poly", "--n", 3, "--k", 2).exit_code == 2

    def test_rotated_paths_agree(self):
        doc = poly_document(RunConfig(rotation_phi="1.3"), 5, all_paths=True)
        assert float(doc["max_disagreement"]) < 1e-60

    def test_limits(self, runner):
        assert run(runner, "poly", "--n", 33, "--path", "toeplitz").exit_code == 2
        assert run(runner, "poly", "--n", 70).exit_code == 2
        assert run(runner, "poly", "--n", 5, "--chi", "1/5").exit_code == 2


class TestVerify:
    def test_default_passes(self, runner, tmp_path):
        out = tmp_path / "r.json"
        res = run(runner, "verify", "--format", "json", "--out", out)
        assert res.exit_code == 0, res.stderr
        reports = json.loads(out.read_text())
        assert reports and all(r["passed"] for r in reports)
        assert "0 failed" in res.stderr

    def test_ngon(self, runner):
        res = run(runner, "verify", "--suite", "ngon", "--chi", "1/5")
        assert res.exit_code == 0
        rows = rows_of(res.stdout)
        assert len(rows) == 25 and all(r["pass"] == "pass" for r in rows)

    def test_ngon_needs_rational(self, runner):
        assert run(runner, "verify", "--suite", "ngon").exit_code == 2

    def test_masssum(self, runner):
        res = run(runner, "verify", "--suite", "masssum", "--s", 0, "--budget", 500, "--format", "json")
        assert res.exit_code == 0
        (rep,) = json.loads(res.stdout)
        assert rep["details"]["monotone"] and rep["details"]["bounded"]
        assert rep["status"] == "pass"

    def test_inconclusive_and_strict(self, runner):
        args = ["verify", "--suite", "masssum", "--s", 2, "--budget", 3]
        res = run(runner, *args)
        assert res.exit_code == 0
        assert rows_of(res.stdout)[0]["pass"] == "inconclusive"
        assert run(runner, *args, "--strict").exit_code == 1

    def test_failure_exit(self, runner):
        res = run(runner, "verify", "--suite", "duality", "--n-max", 3, "--tol-rel", "1e-200")
        assert res.exit_code == 1

    def test_guard_exit(self, runner):
        res = run(runner, "moments", "--tol-div", "0.9")
        assert res.exit_code == 3
        assert "SmallDivisor" in res.stderr


class TestSpectrum:
    def test_quarter_turn(self, runner):
        ctx = PrecisionContext()
        rows = rows_of(run(runner, "spectrum", "--chi", "1/4", "--S", 3).stdout)
        thetas = [ctx.mp.mpf(r["theta"]) for r in rows]
        pi = ctx.mp.pi
        assert max(abs(a - b) for a, b in zip(thetas, [0, pi / 2, pi])) < 1e-70
        assert [ctx.mp.mpf(r["mass_re"]) for r in rows] == [ctx.mp.mpf(1) / 2, ctx.mp.mpf(1) / 4, ctx.mp.mpf(1) / 8]

    def test_mass_sum(self):
        ctx = PrecisionContext()
        header, rows = spectrum_table(RunConfig(p="0.7"), 25)
        total = ctx.mp.fsum(ctx.mp.mpf(r[4]) for r in rows)
        assert abs(total - (1 - ctx.real("0.7") ** 25)) < 1e-70
        assert ctx.mp.mpf(rows[0][6]) == ctx.real("0.7") ** 25

    def test_rational_distinct_angles(self, runner):
        rows = rows_of(run(runner, "spectrum", "--chi", "1/5", "--S", 10).stdout)
        assert len({r["theta"] for r in rows}) == 5


class TestConfig:
    @pytest.mark.parametrize("args", [
        ["--p", "1.5"],
        ["--p", "abc"],
        ["--chi", "2/4"],
        ["--chi", "1.5"],
        ["--k", "0"],
        ["--phi", "7"],
        ["--precision-bits", "16"],
        ["--truncation-tol", "-1"],
    ])
    def test_bad_values(self, runner, args):
        res = run(runner, "moments", *args)
        assert res.exit_code == 2

    def test_digits_follow_precision(self):
        _, lo = moments_table(RunConfig(precision_bits=128), 1, 1)
        _, hi = moments_table(RunConfig(precision_bits=512), 1, 1)
        assert len(hi[0][1]) > len(lo[0][1])

    def test_deterministic_file(self, runner, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for f in (a, b):
            assert run(runner, "verify", "--suite", "saalschutz", "--seed", 11, "--out", f).exit_code == 0
        assert a.read_bytes() == b.read_bytes()
        assert b"\r\n" not in a.read_bytes()
