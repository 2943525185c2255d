import math

import numpy as np
import pytest

from qcss.perms import Perm
from qcss.protograph import (PermArrays, SearchExhausted, _word_bfs_girth,
                             assemble, check_condition_a, check_condition_b,
                             check_condition_c, condition_b_violation, girth,
                             search_arrays)


def _random_cpm_arrays(P, L, rng):
    half = L // 2
    return PermArrays(
        f=tuple(Perm.cpm(P, int(rng.integers(P))) for _ in range(half)),
        g=tuple(Perm.cpm(P, int(rng.integers(P))) for _ in range(half)),
        P=P, L=L)


class TestConditions:
    def test_a_worked_example(self, arrays_p9_a):
        assert check_condition_a(arrays_p9_a)

    def test_a_all_cpm(self, rng):
        assert check_condition_a(_random_cpm_arrays(17, 8, rng))

    def test_a_counterexample(self):
        arrays = PermArrays(
            f=(Perm.apm(5, 2, 0), Perm.identity(5)),
            g=(Perm.cpm(5, 1), Perm.identity(5)), P=5, L=4)
        assert not check_condition_a(arrays)

    def test_b_worked_example(self, arrays_p9_b):
        assert check_condition_b(arrays_p9_b)

    def test_b_identity_collision(self):
        ident = Perm.identity(9)
        arrays = PermArrays(f=(ident, ident), g=(ident, ident), P=9, L=4)
        assert not check_condition_b(arrays)
        assert condition_b_violation(arrays) is not None

    def test_b_big_apm(self, big_apm_arrays):
        assert check_condition_b(big_apm_arrays)

    def test_c_reference_girth(self, arrays_p9_a):
        assert check_condition_c(arrays_p9_a, 8)
        assert not check_condition_c(arrays_p9_a, 10)

    def test_c_big_apm(self, big_apm_arrays):
        assert check_condition_c(big_apm_arrays, 16)

    def test_c_target_validation(self, arrays_p9_a):
        with pytest.raises(ValueError):
            check_condition_c(arrays_p9_a, 7)
        with pytest.raises(ValueError):
            check_condition_c(arrays_p9_a, 2)


class TestAssemble:
    def test_shapes_and_weights(self, arrays_p9_a):
        pair = assemble(arrays_p9_a)
        for side in ("hx", "hz"):
            m = pair.binary(side)
            assert m.shape == (18, 36)
            assert (np.asarray(m.sum(axis=0)).ravel() == 2).all()
            assert (np.asarray(m.sum(axis=1)).ravel() == 4).all()

    def test_orthogonality(self, arrays_p9_a):
        assert assemble(arrays_p9_a).orthogonal()

    def test_row1_is_cyclic_shift(self, arrays_p9_a):
        pair = assemble(arrays_p9_a)
        # hx row block 1, left half is (F_1, F_0)
        assert pair.eff_x[1][0] == arrays_p9_a.f[1]
        assert pair.eff_x[1][1] == arrays_p9_a.f[0]
        assert pair.eff_x[0][0] == arrays_p9_a.f[0]

    def test_random_cpm_orthogonality(self, rng):
        # commutativity alone is enough for orthogonality; ~50 random
        # constructions across the parameter grid
        for P in (9, 32, 128):
            for L in (4, 8):
                for _ in range(8):
                    pair = assemble(_random_cpm_arrays(P, L, rng))
                    assert pair.orthogonal()

    def test_validation(self):
        with pytest.raises(ValueError, match="even"):
            PermArrays(f=(Perm.cpm(5, 1),), g=(Perm.cpm(5, 2),), P=5, L=2)
        with pytest.raises(ValueError, match="L/2"):
            PermArrays(f=(Perm.cpm(5, 1),), g=(Perm.cpm(5, 2),), P=5, L=4)
        with pytest.raises(ValueError, match="modulus"):
            PermArrays(f=(Perm.cpm(5, 1), Perm.cpm(7, 1)),
                       g=(Perm.cpm(5, 2), Perm.cpm(5, 3)), P=5, L=4)


class TestGirth:
    def test_reference_examples(self, arrays_p9_a, arrays_p9_b):
        assert girth(assemble(arrays_p9_a)) == 8
        assert girth(assemble(arrays_p9_b)) == 8

    def test_big_apm(self, big_apm_arrays):
        assert girth(assemble(big_apm_arrays)) == 16

    def test_smallest_cycle(self):
        # two identical block columns over a single point: a 4-cycle
        ident = np.zeros(1, dtype=np.int64)
        assert _word_bfs_girth([ident, ident], 1) == 4

    def test_single_column_acyclic(self):
        assert _word_bfs_girth([np.arange(5)], 5) == math.inf

    def test_girth_at_most_2l(self, rng):
        for L in (4, 8):
            for _ in range(5):
                arrays = _random_cpm_arrays(17, L, rng)
                assert girth(assemble(arrays)) <= 2 * L

    def test_witness_cycle(self, arrays_p9_a, arrays_p9_b, big_apm_arrays, rng):
        for arrays in (arrays_p9_a, arrays_p9_b, big_apm_arrays):
            assert assemble(arrays).witness_cycle_closes()
        for _ in range(5):
            assert assemble(_random_cpm_arrays(13, 8, rng)).witness_cycle_closes()

    def test_stop_above(self, arrays_p9_a):
        pair = assemble(arrays_p9_a)
        assert pair.girth(stop_above=7) == math.inf  # girth 8 exceeds 7
        assert pair.girth(stop_above=8) == 8


class TestSearch:
    def test_search_cpm(self):
        arrays = search_arrays(32, 8, 8, kind="cpm", rng_seed=1)
        assert check_condition_a(arrays)
        assert check_condition_b(arrays)
        assert check_condition_c(arrays, 8)

    def test_search_apm(self):
        arrays = search_arrays(32, 8, 8, kind="apm", rng_seed=3)
        assert all(p.kind == "apm" for p in (*arrays.f, *arrays.g))
        assert check_condition_a(arrays)
        assert check_condition_b(arrays)
        assert check_condition_c(arrays, 8)

    def test_deterministic(self):
        a1 = search_arrays(32, 8, 8, kind="cpm", rng_seed=7)
        a2 = search_arrays(32, 8, 8, kind="cpm", rng_seed=7)
        assert [p.to_text() for p in a1.f + a1.g] == [p.to_text() for p in a2.f + a2.g]

    def test_exhaustion(self):
        with pytest.raises(SearchExhausted):
            search_arrays(2, 8, 16, kind="apm", rng_seed=0,
                          tries_per_slot=20, max_restarts=5)
