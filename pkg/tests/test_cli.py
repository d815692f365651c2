import json
import math
import subprocess
import sys

import pytest

from sl2cover import circle, cli, finite_cp, sampling


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_rotation(capsys):
    code, out, _ = run(capsys, "classify", "rho:1.0472", "--k", "0", "--grid", "1024")
    d = json.loads(out)
    assert code == 0
    assert d["class"]["kind"] == "Elliptic" and d["class"]["theta"] == pytest.approx(math.pi / 3, abs=1e-4)
    assert d["tau_exact"] == pytest.approx(1 / 3, abs=1e-4) and d["trace_category"] == "lt2"


def test_classify_central(capsys):
    code, out, _ = run(capsys, "classify", "1", "0", "0", "1", "--k", "-2", "--grid", "1024")
    d = json.loads(out)
    assert code == 0 and d["label"] == "Central(-2)"
    assert d["ell_sharp"] == "[2]" and d["tau_exact"] == -2 and d["direction"] == "Backward"


def test_classify_unipotent(capsys):
    code, out, _ = run(capsys, "classify", "u:1", "--grid", "1024")
    d = json.loads(out)
    assert d["label"] == "ParabolicPlus(0)" and d["direction"] == "SemiBackward"
    assert d["numeric"]["consistent"]


def test_classify_pretty_and_dump(capsys, tmp_path):
    path = tmp_path / "lift.bin"
    code, out, _ = run(capsys, "classify", "a:2", "--k", "1", "--pretty", "--dump-lift", str(path), "--grid", "256")
    assert code == 0 and "Hyperbolic" in out
    lift = circle.read_lift(path)
    assert len(lift.values) == 256
    assert lift(0.0) == pytest.approx(1.0, abs=1e-12)


def test_parse_errors(capsys):
    assert run(capsys, "classify", "foo:1")[0] == cli.EXIT_PARSE
    assert run(capsys, "classify", "1", "2", "3")[0] == cli.EXIT_PARSE
    code, _, err = run(capsys, "classify", "0", "1", "1", "0")
    assert code == cli.EXIT_PARSE and "error" in err
    assert run(capsys, "classify", "u:1", "--grid", "10")[0] == cli.EXIT_PARSE
    assert run(capsys, "table", "--theta", "4")[0] == cli.EXIT_PARSE


def test_cocycle_exit(capsys, monkeypatch):
    from sl2cover.errors import CocycleNotIntegral

    def boom(*a, **k):
        raise CocycleNotIntegral(0.5, 1e-6)

    monkeypatch.setattr(cli.cover, "classify", boom)
    assert run(capsys, "classify", "u:1")[0] == cli.EXIT_COCYCLE


def test_near_parabolic_warning(capsys):
    code, _, err = run(capsys, "classify", "1.00001", "0", "0", "0.99999", "--grid", "256")
    assert code == 0 and "warning" in err


def test_number_parser():
    assert cli._number("3*pi/4") == pytest.approx(3 * math.pi / 4)
    assert cli._float_list("pi/6, 2") == pytest.approx([math.pi / 6, 2.0])
    with pytest.raises(cli.UsageError):
        cli._float_list("pi/0")


@pytest.mark.parametrize("n_max,expected", [(0, 6), (1, 16)])
def test_table_row_counts(capsys, n_max, expected):
    code, out, _ = run(capsys, "table", "--theta", "pi/2", "--lambda", "2", "--n-max", str(n_max), "--grid", "512", "--tau-iters", "2000")
    rows = json.loads(out)
    assert code == 0 and len(rows) == expected
    assert all(r["numeric"]["consistent"] for r in rows)


def test_table_shift_zero_rows(capsys):
    _, out, _ = run(capsys, "table", "--theta", "pi/2", "--lambda", "2", "--n-max", "0", "--grid", "512")
    dirs = sorted(r["direction"] for r in json.loads(out))
    assert dirs == sorted(["Forward", "Backward", "SemiForward", "SemiBackward", "Identity", "Alternating"])


def test_table_default_counts():
    labels = cli.table_labels([1, 2, 3], [1.5, 2, 5], 3)
    assert len(labels) == 3 * 8 + 14 + 7 + 3 * 7
    assert len({str(x) for x in labels}) == len(labels)


def test_table_mismatch_exit(capsys, monkeypatch):
    real = cli.cover.table_invariants

    def wrong(label):
        row = real(label)
        return type(row)(row.trace_category, row.direction.mirror, row.ell_sharp, row.tau)

    monkeypatch.setattr(cli.cover, "table_invariants", wrong)
    code, _, err = run(capsys, "table", "--theta", "pi/2", "--lambda", "2", "--n-max", "0", "--grid", "256")
    assert code == cli.EXIT_TABLE and "mismatch" in err


def test_verify_suites(capsys):
    code, out, _ = run(capsys, "verify", "finite")
    assert code == 0 and "Q8" in out
    code, out, _ = run(capsys, "verify", "quasi", "--scale", "0.2", "--grid", "512")
    assert code == 0 and "properties passed" in out
    code, out, _ = run(capsys, "verify", "cover", "--scale", "0.2", "--grid", "512")
    assert code == 0


def test_verify_failure_exit(capsys, monkeypatch):
    from sl2cover import suites

    monkeypatch.setitem(suites.SUITES, "finite", lambda rng, s: [suites.Check("broken", False, 1, 1.0)])
    code, _, err = run(capsys, "verify", "finite")
    assert code == cli.EXIT_VERIFY and "broken" in err


def test_seed_env_and_determinism(capsys, monkeypatch):
    monkeypatch.setenv(sampling.SEED_ENV, "77")
    assert sampling.seed_from_env() == 77
    _, a, _ = run(capsys, "verify", "quasi", "--scale", "0.1", "--grid", "256")
    _, b, _ = run(capsys, "verify", "quasi", "--scale", "0.1", "--grid", "256")
    assert a == b and "seed 77" in a
    _, c, _ = run(capsys, "verify", "quasi", "--scale", "0.1", "--grid", "256", "--seed", "5")
    assert "seed 5" in c


def test_finite_verify(capsys, tmp_path):
    path = tmp_path / "q8.txt"
    finite_cp.write_table(path, finite_cp.quaternion())
    code, out, _ = run(capsys, "finite", "verify", str(path), "--normal", "0,1")
    d = json.loads(out)
    assert code == 0 and d["cp"] is False and d["class_count"] == 5
    assert d["witness"]["commutator"] == 1
    code, out, err = run(capsys, "finite", "verify", str(path), "--normal", "0,1,2,3")
    assert code == 0 and "not central" in err and json.loads(out)["central"] is False
    assert run(capsys, "finite", "verify", str(path), "--normal", "0,2")[0] == cli.EXIT_PARSE
    assert run(capsys, "finite", "verify", str(path), "--normal", "0,5")[0] == cli.EXIT_PARSE
    assert run(capsys, "finite", "verify", str(tmp_path / "missing"), "--normal", "0")[0] == cli.EXIT_PARSE


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "sl2cover", "classify", "rho:0.5", "--grid", "256"], capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["class"]["kind"] == "Elliptic"
