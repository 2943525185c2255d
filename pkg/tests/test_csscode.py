import numpy as np
import pytest

from qcss.csscode import CssCode, expand, to_alist, to_coords
from qcss.extend import ExtendedPair, extend_pair
from qcss.field import GF2e
from qcss.protograph import assemble, search_arrays
from qcss import qcodefile


class TestExpand:
    def test_sizes(self, gf256):
        arrays = search_arrays(32, 8, 8, kind="cpm", rng_seed=1)
        code = expand(extend_pair(assemble(arrays), gf256, rng_seed=0), gf256)
        assert code.binary("hx").shape == (512, 2048)
        assert code.binary("hz").shape == (512, 2048)
        assert code.n == 2048

    def test_field_mismatch_rejected(self, small_code):
        with pytest.raises(ValueError, match="field mismatch"):
            expand(small_code.ext, GF2e(4))

    def test_e1_reduces_to_protograph(self, arrays_p9_a):
        gf2 = GF2e(1)
        pair = assemble(arrays_p9_a)
        code = expand(extend_pair(pair, gf2, rng_seed=0), gf2)
        assert (code.binary("hx") != pair.binary("hx")).nnz == 0
        assert (code.binary("hz") != pair.binary("hz")).nnz == 0

    def test_orthogonality(self, small_code):
        assert small_code.verify_orthogonal()

    def test_trivial_lift_orthogonal(self, arrays_p9_a, gf8):
        ext = extend_pair(assemble(arrays_p9_a), gf8, trivial=True)
        assert expand(ext, gf8).verify_orthogonal()

    def test_corrupted_block_breaks_orthogonality(self, small_code, gf8):
        z = small_code.ext.z_exponents.copy()
        z[0, 0] = (z[0, 0] + 1) % (gf8.q - 1)
        bad = CssCode(ExtendedPair(small_code.proto, gf8,
                                   small_code.ext.log_labels, z))
        assert not bad.verify_orthogonal()

    def test_block_probes_match_binary(self, small_code, rng):
        dense = small_code.binary("hx").toarray()
        dense_z = small_code.binary("hz").toarray()
        rows, cols = dense.shape
        for _ in range(100):
            i, j = int(rng.integers(rows)), int(rng.integers(cols))
            assert small_code.entry("hx", i, j) == dense[i, j]
            assert small_code.entry("hz", i, j) == dense_z[i, j]

    def test_rates(self, gf8):
        for L, rate in ((8, 0.50), (10, 0.60), (16, 0.75)):
            arrays = search_arrays(32, L, 8, kind="cpm", rng_seed=2)
            code = expand(extend_pair(assemble(arrays), gf8, rng_seed=0), gf8)
            assert code.rate == rate


class TestQcodeFormat:
    def test_proto_round_trip(self, arrays_p9_a, tmp_path):
        path = tmp_path / "p.qcode"
        qcodefile.dump_proto(path, arrays_p9_a, comments=["construct test"])
        qf = qcodefile.load(path)
        assert not qf.extended
        assert qf.P == 9 and qf.L == 4
        for a, b in zip(qf.f + qf.g, arrays_p9_a.f + arrays_p9_a.g):
            assert a == b

    def test_extended_round_trip(self, small_code, tmp_path):
        path = tmp_path / "c.qcode"
        qcodefile.dump_extended(path, small_code.ext)
        qf = qcodefile.load(path)
        assert qf.extended
        code = qf.css_code()
        assert np.array_equal(code.ext.log_labels, small_code.ext.log_labels)
        assert np.array_equal(code.ext.z_exponents, small_code.ext.z_exponents)
        assert code.verify_orthogonal()

    def test_parse_errors_carry_line_numbers(self):
        with pytest.raises(qcodefile.QCodeParseError, match="line 1"):
            qcodefile.loads("not a qcode file\n")
        text = "qcode 1\nproto J=2 L=4 P=9\nf: cpm 1\nf: rot 9\ng: cpm 1\ng: cpm 2\n"
        with pytest.raises(qcodefile.QCodeParseError, match="line 4"):
            qcodefile.loads(text)

    def test_missing_lines_rejected(self):
        with pytest.raises(qcodefile.QCodeParseError, match="proto"):
            qcodefile.loads("qcode 1\n")
        text = ("qcode 1\nproto J=2 L=4 P=9\n"
                "f: cpm 1\nf: cpm 2\ng: cpm 3\ng: cpm 4\nlambda: 0 0\n")
        with pytest.raises(qcodefile.QCodeParseError, match="together"):
            qcodefile.loads(text)

    def test_label_length_validated(self, arrays_p9_a, gf8):
        text = qcodefile.dumps(arrays_p9_a, gf8,
                               np.zeros(72, dtype=np.int64),
                               np.zeros(72, dtype=np.int64))
        bad = text.replace("lambda: 0", "lambda:", 1)
        with pytest.raises(qcodefile.QCodeParseError, match="lambda"):
            qcodefile.loads(bad)


class TestExports:
    def test_alist_round_trip(self, small_code):
        m = small_code.binary("hx")
        text = to_alist(m)
        lines = text.strip().splitlines()
        n, rows = (int(v) for v in lines[0].split())
        assert (n, rows) == (m.shape[1], m.shape[0])
        wc, wr = (int(v) for v in lines[1].split())
        col_w = [int(v) for v in lines[2].split()]
        row_w = [int(v) for v in lines[3].split()]
        assert len(col_w) == n and len(row_w) == rows
        # rebuild the support from the per-column lists
        rebuilt = np.zeros(m.shape, dtype=np.uint8)
        for j in range(n):
            entries = [int(v) for v in lines[4 + j].split()]
            assert len(entries) == wc
            for r in entries:
                if r:
                    rebuilt[r - 1, j] = 1
        assert np.array_equal(rebuilt, m.toarray())

    def test_coords(self, small_code):
        m = small_code.binary("hz")
        lines = to_coords(m).strip().splitlines()
        rows, cols, nnz = (int(v) for v in lines[0].split())
        assert (rows, cols) == m.shape and nnz == m.nnz
        assert len(lines) == 1 + nnz
        r, c, v = (int(x) for x in lines[1].split())
        assert v == 1 and m[r, c] == 1
