import numpy as np
import pytest

from qcss import qcodefile
from qcss.cli import _bits_to_hex, _hex_to_bits, main
from qcss.decoder import compute_syndromes


def run_cli(*args):
    return main([str(a) for a in args])


class TestHex:
    def test_round_trip(self, rng):
        bits = rng.integers(0, 2, 37).astype(np.uint8)
        assert np.array_equal(_hex_to_bits(_bits_to_hex(bits), 37), bits)

    def test_overflow_rejected(self):
        with pytest.raises(ValueError):
            _hex_to_bits("ff", 4)


class TestConstruct:
    def test_small_apm(self, tmp_path, capsys):
        out = tmp_path / "p.qcode"
        rc = run_cli("construct", "--P", 9, "--L", 4, "--girth-target", 8,
                     "--kind", "apm", "--seed", 5, "--out", out)
        assert rc == 0
        assert "girth=8" in capsys.readouterr().out
        qf = qcodefile.load(out)
        assert qf.P == 9 and qf.L == 4 and not qf.extended
        # reload round-trips to the identical pair
        text1 = out.read_text()
        qcodefile.dump_proto(out, qf.arrays(), comments=[c.lstrip("# ") for c in qf.comments])
        assert out.read_text() == text1

    def test_exhaustion_exit_code(self, tmp_path):
        rc = run_cli("construct", "--P", 2, "--L", 8, "--girth-target", 16,
                     "--kind", "apm", "--out", tmp_path / "x.qcode")
        assert rc == 3

    def test_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            run_cli("construct", "--L", 4, "--out", "x")
        assert exc.value.code == 2


@pytest.fixture()
def proto_file(tmp_path):
    out = tmp_path / "proto.qcode"
    assert run_cli("construct", "--P", 9, "--L", 4, "--girth-target", 8,
                   "--kind", "apm", "--seed", 1, "--out", out) == 0
    return out


@pytest.fixture()
def code_file(proto_file, tmp_path):
    out = tmp_path / "code.qcode"
    assert run_cli("extend", "--in", proto_file, "--e", 3, "--poly", "1101",
                   "--seed", 2, "--out", out) == 0
    return out


class TestExtendVerify:
    def test_extend_and_verify(self, code_file, capsys):
        rc = run_cli("verify", "--in", code_file, "--girth-target", 8)
        out = capsys.readouterr().out
        assert rc == 0
        assert out.count("PASS") == 6 and "FAIL" not in out

    def test_trivial_flag(self, proto_file, tmp_path):
        out = tmp_path / "t.qcode"
        assert run_cli("extend", "--in", proto_file, "--e", 3, "--seed", 0,
                       "--trivial", "--out", out) == 0
        qf = qcodefile.load(out)
        assert not qf.log_labels.any() and not qf.z_exponents.any()

    def test_e8_default_poly_string(self, proto_file, tmp_path):
        out = tmp_path / "e8.qcode"
        assert run_cli("extend", "--in", proto_file, "--e", 8,
                       "--poly", "101110001", "--seed", 0, "--out", out) == 0
        assert run_cli("verify", "--in", out) == 0

    def test_corrupted_labels_fail_verify(self, code_file, capsys):
        text = code_file.read_text()
        lines = text.splitlines()
        for i, line in enumerate(lines):
            if line.startswith("delta:"):
                parts = line.split()
                parts[1] = str((int(parts[1]) + 1) % 7)
                lines[i] = " ".join(parts)
        code_file.write_text("\n".join(lines) + "\n")
        rc = run_cli("verify", "--in", code_file)
        out = capsys.readouterr().out
        assert rc == 1
        assert "FAIL lifted-orthogonal-Fq" in out

    def test_broken_commutativity_fails_verify(self, code_file, capsys):
        text = code_file.read_text().replace("qcode 1", "qcode 1", 1)
        lines = text.splitlines()
        # replace the first f permutation with a non-commuting map
        for i, line in enumerate(lines):
            if line.startswith("f:"):
                lines[i] = "f: apm 2 0"
                break
        code_file.write_text("\n".join(lines) + "\n")
        rc = run_cli("verify", "--in", code_file)
        out = capsys.readouterr().out
        assert rc == 1
        assert "FAIL condition-a" in out

    def test_parse_error_exit(self, tmp_path, capsys):
        bad = tmp_path / "bad.qcode"
        bad.write_text("qcode 2\n")
        assert run_cli("girth", "--in", bad) == 2
        assert "line 1" in capsys.readouterr().err


class TestOtherCommands:
    def test_girth(self, proto_file, capsys):
        assert run_cli("girth", "--in", proto_file) == 0
        assert capsys.readouterr().out.strip() == "8"

    def test_hashing_bound(self, capsys):
        assert run_cli("hashing-bound", "--pd-grid", "0.0:0.06:0.03") == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "p_d,f_m,R"
        assert len(lines) == 4
        p, f, r = (float(v) for v in lines[1].split(","))
        assert (p, f, r) == (0.0, 0.0, 1.0)

    def test_decode_one_error(self, code_file, capsys):
        qf = qcodefile.load(code_file)
        code = qf.css_code()
        x = np.zeros(code.n, dtype=np.uint8)
        x[7] = 1
        z = np.zeros(code.n, dtype=np.uint8)
        xhex = _bits_to_hex(x)
        zhex = _bits_to_hex(z)
        rc = run_cli("decode-one", "--code", code_file, "--pd", 0.05,
                     "--error", f"{xhex},{zhex}")
        out = capsys.readouterr().out
        assert rc == 0
        assert "status: success" in out
        assert f"x_hat: {xhex}" in out
        assert f"z_hat: {zhex}" in out

    def test_decode_one_syndrome(self, code_file, capsys):
        qf = qcodefile.load(code_file)
        code = qf.css_code()
        s, t = compute_syndromes(code, np.zeros(code.n, np.uint8),
                                 np.zeros(code.n, np.uint8))
        rc = run_cli("decode-one", "--code", code_file, "--pd", 0.05,
                     "--syndrome", f"{_bits_to_hex(s)},{_bits_to_hex(t)}")
        out = capsys.readouterr().out
        assert rc == 0 and "status: success" in out and "iterations: 1" in out

    def test_simulate_and_threshold(self, code_file, tmp_path, capsys):
        csv1 = tmp_path / "c.csv"
        rc = run_cli("simulate", "--code", code_file, "--fm-grid", "0.02:0.04:0.02",
                     "--trials", 6, "--max-iter", 8, "--seed", 3, "--out", csv1)
        assert rc == 0
        from qcss.sim import read_csv
        curve = read_csv(csv1)
        assert len(curve) == 2 and curve.records[0].trials == 6

        # threshold on synthetic curve files
        from qcss.sim import write_csv
        from test_sim import _synthetic_curve
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        write_csv(a, _synthetic_curve(128, 20.0, 0.05, [0.03, 0.04, 0.06]))
        write_csv(b, _synthetic_curve(1024, 60.0, 0.05, [0.03, 0.04, 0.06]))
        assert run_cli("threshold", "--curves", a, b) == 0
        out = capsys.readouterr().out
        star = float(out.split("f_m_star=")[1].split()[0])
        assert star == pytest.approx(0.05, abs=1e-9)

    def test_threshold_no_crossing_exit(self, tmp_path):
        from qcss.sim import write_csv
        from test_sim import _synthetic_curve
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        write_csv(a, _synthetic_curve(128, 20.0, 0.05, [0.03, 0.04]))
        write_csv(b, _synthetic_curve(1024, 20.0, 0.05, [0.03, 0.04]))
        assert run_cli("threshold", "--curves", a, b) == 3
