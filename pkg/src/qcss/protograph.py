"""Orthogonal binary protograph pairs built from commuting permutation arrays.

A pair of parity-check matrices (hx, hz) of size PJ x PL with J = 2 is
assembled from two arrays of permutations on Z_P, f = (f_0..f_{L/2-1}) and
g = (g_0..g_{L/2-1}).  hx places the permutation matrices of f on the left
half and of g on the right half, each row a cyclic shift of the block
indices; hz places transposed g and f blocks so that every hx row and hz
row overlap in an even number of columns and the product hx @ hz^T
vanishes over F_2 whenever every f_i commutes with every g_j.

Three predicates gate a usable pair:

  (a) commutativity   : f_i o g_j = g_j o f_i for all i, j;
  (b) overlap pairing : the composites f_l o g_{k-l} (subscripts mod L/2,
        k in {0, +1, -1}) are pairwise pointwise-distinct, which makes
        every (hx row, hz row) overlap exactly 0 or 2 columns — the
        structure the field extension relies on;
  (c) girth           : the Tanner graphs of hx and hz have no cycle
        shorter than a requested target.

Every column has weight 2, so cycles of either Tanner graph correspond to
cycles of the multigraph whose vertices are the check rows and whose edges
are the columns.  Girth is computed by a non-backtracking breadth-first
search over block-column words that carries all P base points at once as
integer arrays; this is exact, covers general/cpm/apm permutations
uniformly, and stays fast at P in the thousands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .perms import Perm


class SearchExhausted(Exception):
    """Raised when the incremental array search runs out of restarts."""


class GirthBudgetExceeded(Exception):
    """Raised when exact girth would need more memory than the word budget."""


# Word-BFS levels are (num_words, P) int32 arrays; cap their total size.
_WORD_BUDGET = 2 * 10**8


@dataclass(frozen=True)
class PermArrays:
    """The permutation arrays (f, g) plus the block parameters."""

    f: tuple
    g: tuple
    P: int
    L: int

    J = 2  # column weight is fixed by the construction

    def __post_init__(self):
        if self.L < 4 or self.L % 2 != 0:
            raise ValueError(f"row weight L must be even and >= 4, got {self.L}")
        half = self.L // 2
        if len(self.f) != half or len(self.g) != half:
            raise ValueError(f"need L/2={half} permutations in each of f and g")
        for p in (*self.f, *self.g):
            if p.P != self.P:
                raise ValueError("all permutations must share the modulus P")

    @property
    def half(self) -> int:
        return self.L // 2


def check_condition_a(arrays: PermArrays) -> bool:
    """Every f_i commutes with every g_j (checked pointwise)."""
    return all(fi.commutes(gj) for fi in arrays.f for gj in arrays.g)


def condition_b_violation(arrays: PermArrays):
    """First violating tuple (k, l, l2, x) of the overlap condition, or None.

    Checks for k in {0, +1, -1} and l != l2 that the composites
    f_l o g_{(k-l) mod L/2} and f_{l2} o g_{(k-l2) mod L/2} disagree at
    every point x.
    """
    half = arrays.half
    xs = np.arange(arrays.P, dtype=np.int64)
    for k in (0, 1, -1):
        composites = [
            arrays.f[l].apply(arrays.g[(k - l) % half].apply(xs)) for l in range(half)
        ]
        for l in range(half):
            for l2 in range(l + 1, half):
                hits = np.nonzero(composites[l] == composites[l2])[0]
                if hits.size:
                    return (k, l, l2, int(hits[0]))
    return None


def check_condition_b(arrays: PermArrays) -> bool:
    return condition_b_violation(arrays) is None


def check_condition_c(arrays: PermArrays, girth_target: int) -> bool:
    """True iff both assembled Tanner graphs have girth >= girth_target.

    Targets above the 2L ceiling are accepted and simply come back false
    for any pair that attains a cycle (every commuting pair does).
    """
    if girth_target % 2 != 0 or girth_target < 4:
        raise ValueError(f"girth target must be even and >= 4, got {girth_target}")
    pair = assemble(arrays)
    return pair.girth(stop_above=girth_target - 1) >= girth_target


class ProtoPair:
    """The assembled pair: block grids of permutations plus derived views.

    Block (j, c) of hx is the permutation matrix of f_{(c-j) mod L/2} on
    the left half and g_{(c') mod ...} on the right; hz holds transposed
    blocks.  Internally each block is kept as its *effective* permutation
    pi with a 1 at (pi(x), x), transposition already folded in, so both
    matrices share one materialization path.
    """

    def __init__(self, arrays: PermArrays):
        self.arrays = arrays
        self.P, self.L = arrays.P, arrays.L
        self.J = PermArrays.J
        half = arrays.half

        def hx_named(j, c):
            if c < half:
                return arrays.f[(c - j) % half]
            return arrays.g[(c - half - j) % half]

        def hz_named(k, c):
            if c < half:
                return arrays.g[(k - c) % half]
            return arrays.f[(k - (c - half)) % half]

        self.eff_x = [[hx_named(j, c) for c in range(self.L)] for j in range(2)]
        self.eff_z = [[hz_named(k, c).inverse() for c in range(self.L)] for k in range(2)]

    # -- materialization ------------------------------------------------
    def _effective(self, side: str):
        return self.eff_x if side == "hx" else self.eff_z

    def binary(self, side: str) -> sp.csr_matrix:
        """The PJ x PL binary matrix of one side as sparse CSR."""
        eff = self._effective(side)
        P, L = self.P, self.L
        xs = np.arange(P, dtype=np.int64)
        rows, cols = [], []
        for j in range(2):
            for c in range(L):
                rows.append(j * P + eff[j][c].apply(xs))
                cols.append(c * P + xs)
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        data = np.ones(len(rows), dtype=np.uint8)
        return sp.csr_matrix((data, (rows, cols)), shape=(2 * P, L * P))

    def support_columns(self, side: str) -> np.ndarray:
        """(2P, L) array: column index of row r's nonzero in block column c."""
        eff = self._effective(side)
        P, L = self.P, self.L
        out = np.empty((2 * P, L), dtype=np.int64)
        ys = np.arange(P, dtype=np.int64)
        for j in range(2):
            for c in range(L):
                out[j * P:(j + 1) * P, c] = c * P + eff[j][c].inverse().apply(ys)
        return out

    def orthogonal(self) -> bool:
        """Exact check of hx @ hz^T = 0 over F_2."""
        prod = (self.binary("hx").astype(np.int64) @ self.binary("hz").T.astype(np.int64))
        prod.data %= 2
        prod.eliminate_zeros()
        return prod.nnz == 0

    # -- girth ------------------------------------------------------------
    def _composites(self, side: str):
        """Per block column c, the map sigma_c = pi_{1c} o pi_{0c}^{-1}."""
        eff = self._effective(side)
        sigmas = []
        for c in range(self.L):
            sigmas.append(eff[1][c].compose(eff[0][c].inverse()).table)
        return sigmas

    def girth_of_side(self, side: str, stop_above: int | None = None):
        return _word_bfs_girth(self._composites(side), self.P, stop_above)

    def girth(self, stop_above: int | None = None):
        """Exact girth, the minimum over the two Tanner graphs.

        With stop_above set, returns math.inf as soon as both girths are
        known to exceed it (used by condition (c), where only the
        comparison matters).
        """
        gx = self.girth_of_side("hx", stop_above)
        gz = self.girth_of_side("hz", stop_above)
        return min(gx, gz)

    def witness_cycle_closes(self) -> bool:
        """Walk the explicit length-2L block-column path on both graphs.

        The path interleaves left and right block columns,
        (L/2-1, L/2, L/2-2, L/2+1, ..., 0, L-1), alternating check rows;
        under condition (a) the composite of the traversal telescopes to
        the identity, so the walk closes for every start row.
        """
        half = self.L // 2
        path = []
        for i in range(half):
            path.append(half - 1 - i)
            path.append(half + i)
        for side in ("hx", "hz"):
            sigmas = self._composites(side)
            pos = np.arange(self.P, dtype=np.int64)
            for step, c in enumerate(path):
                table = sigmas[c]
                if step % 2 == 0:
                    pos = table[pos]
                else:
                    inv = np.empty_like(table)
                    inv[table] = np.arange(self.P, dtype=np.int64)
                    pos = inv[pos]
            if not np.array_equal(pos, np.arange(self.P, dtype=np.int64)):
                return False
        return True

    def __repr__(self):
        return f"ProtoPair(P={self.P}, L={self.L}, J=2)"


def assemble(arrays: PermArrays) -> ProtoPair:
    return ProtoPair(arrays)


def girth(pair: ProtoPair):
    return pair.girth()


def _word_bfs_girth(sigmas, P: int, stop_above: int | None = None):
    """Exact Tanner girth from the column-contracted check multigraph.

    sigmas are the per-block-column composite maps (full image arrays).
    A Tanner cycle with 2k nodes contracts to a multigraph cycle with k
    edges; the multigraph is bipartite, so k = 2m and the cycle splits at
    its midpoint into two distinct non-backtracking column words of length
    m that land on the same vertex from the same start.  The first level m
    at which two distinct words collide therefore gives girth 4m exactly.

    Returns math.inf when no cycle exists (fewer than two columns).
    With stop_above set, returns math.inf once girth > stop_above is
    certain.
    """
    Lc = len(sigmas)
    if Lc < 2:
        return math.inf

    tables = [np.asarray(s, dtype=np.int32) for s in sigmas]
    inverses = []
    for t in tables:
        inv = np.empty_like(t)
        inv[t] = np.arange(P, dtype=np.int32)
        inverses.append(inv)

    positions = np.vstack(tables)          # level 1: one word per column
    last = np.arange(Lc, dtype=np.int32)
    m = 1
    # Any two columns guarantee a closed non-backtracking walk, so a
    # collision must occur; 2P+1 levels is a safe hard ceiling.
    while m <= 2 * P + 1:
        srt = np.sort(positions, axis=0)
        if positions.shape[0] > 1 and bool((srt[1:] == srt[:-1]).any()):
            return 4 * m
        if stop_above is not None and 4 * (m + 1) > stop_above:
            return math.inf
        n_next = positions.shape[0] * (Lc - 1)
        if n_next * P > _WORD_BUDGET:
            raise GirthBudgetExceeded(
                f"girth search needs {n_next} words of length {P} at level {m + 1}"
            )
        maps = inverses if (m % 2 == 1) else tables  # step m+1 direction
        next_positions = np.empty((n_next, P), dtype=np.int32)
        next_last = np.empty(n_next, dtype=np.int32)
        offset = 0
        for c in range(Lc):
            keep = last != c
            cnt = int(keep.sum())
            if cnt == 0:
                continue
            next_positions[offset:offset + cnt] = maps[c][positions[keep]]
            next_last[offset:offset + cnt] = c
            offset += cnt
        positions = next_positions[:offset]
        last = next_last[:offset]
        m += 1
    return math.inf


# ----------------------------------------------------------------------
# Incremental randomized search for (f, g)
# ----------------------------------------------------------------------

def _partial_composites(f, g, L, P):
    """Composite maps for the block columns already fully determined.

    With only a prefix of f and g fixed, a block column contributes to the
    cycle check as soon as both of its two permutations exist (indices wrap
    mod L/2, so column 0 completes only when the last array entry lands).
    Returns (sigmas_hx, sigmas_hz).
    """
    half = L // 2
    nf, ng = len(f), len(g)

    def have_f(i):
        return (i % half) < nf

    def have_g(i):
        return (i % half) < ng

    out = []
    for side in ("hx", "hz"):
        sigmas = []
        for c in range(L):
            if side == "hx":
                idx = [(c - j) % half for j in range(2)]
                ok = all(have_f(i) for i in idx) if c < half else all(
                    have_g((c - half - j) % half) for j in range(2))
                if not ok:
                    continue
                if c < half:
                    p0, p1 = f[idx[0]], f[idx[1]]
                else:
                    p0, p1 = g[(c - half) % half], g[(c - half - 1) % half]
            else:
                if c < half:
                    idx = [(k - c) % half for k in range(2)]
                    if not all(have_g(i) for i in idx):
                        continue
                    p0, p1 = g[idx[0]].inverse(), g[idx[1]].inverse()
                else:
                    idx = [(k - (c - half)) % half for k in range(2)]
                    if not all(have_f(i) for i in idx):
                        continue
                    p0, p1 = f[idx[0]].inverse(), f[idx[1]].inverse()
            sigmas.append(p1.compose(p0.inverse()).table)
        out.append(sigmas)
    return out


def _partial_b_ok(f, g, half, P):
    """Overlap condition restricted to tuples whose entries all exist."""
    xs = np.arange(P, dtype=np.int64)
    for k in (0, 1, -1):
        composites = {}
        for l in range(half):
            gi = (k - l) % half
            if l < len(f) and gi < len(g):
                composites[l] = f[l].apply(g[gi].apply(xs))
        keys = sorted(composites)
        for i, l in enumerate(keys):
            for l2 in keys[i + 1:]:
                if bool((composites[l] == composites[l2]).any()):
                    return False
    return True


def _partial_a_ok(f, g):
    return all(fi.commutes(gj) for fi in f for gj in g)


def _sample_perm(kind: str, P: int, rng, units) -> Perm:
    if kind == "cpm":
        return Perm.cpm(P, int(rng.integers(P)))
    if kind == "apm":
        a = int(units[rng.integers(len(units))])
        return Perm.apm(P, a, int(rng.integers(P)))
    raise ValueError(f"search kind must be 'cpm' or 'apm', got {kind!r}")


def search_arrays(
    P: int,
    L: int,
    girth_target: int,
    kind: str = "cpm",
    rng_seed: int = 0,
    tries_per_slot: int = 200,
    max_restarts: int = 60,
) -> PermArrays:
    """Greedy incremental search for arrays passing (a), (b), and (c).

    Permutations are sampled one slot at a time, alternating f and g; a
    candidate is kept if commutativity, the overlap condition, and the
    partial-girth check all still pass.  After tries_per_slot rejections
    the whole state restarts; after max_restarts restarts the search gives
    up, which signals that P is too small for the requested girth.
    Deterministic for a given seed.
    """
    if L % 2 != 0 or L < 4:
        raise ValueError(f"L must be even and >= 4, got {L}")
    if girth_target > 2 * L:
        raise ValueError(f"girth target {girth_target} exceeds the 2L bound {2 * L}")
    rng = np.random.default_rng(rng_seed)
    units = [a for a in range(1, P) if math.gcd(a, P) == 1] or [0]
    half = L // 2

    def partial_ok(f, g):
        if not _partial_a_ok(f, g):
            return False
        if not _partial_b_ok(f, g, half, P):
            return False
        for sigmas in _partial_composites(f, g, L, P):
            if len(sigmas) >= 2:
                if _word_bfs_girth(sigmas, P, stop_above=girth_target - 1) < girth_target:
                    return False
        return True

    for _restart in range(max_restarts):
        f: list[Perm] = []
        g: list[Perm] = []
        failed = False
        for slot in range(L):
            target = f if slot % 2 == 0 else g
            for _try in range(tries_per_slot):
                cand = _sample_perm(kind, P, rng, units)
                target.append(cand)
                if partial_ok(f, g):
                    break
                target.pop()
            else:
                failed = True
                break
        if failed:
            continue
        arrays = PermArrays(f=tuple(f), g=tuple(g), P=P, L=L)
        if check_condition_a(arrays) and check_condition_b(arrays) \
                and check_condition_c(arrays, girth_target):
            return arrays
    raise SearchExhausted(
        f"no (f, g) with girth >= {girth_target} found at P={P}, L={L}, kind={kind} "
        f"after {max_restarts} restarts"
    )
