"""Lift a binary protograph pair to an orthogonal GF(2^e)-valued pair.

The nonzero entries of the lifted hx-side matrix are column-tied: every
column j carries one label in check block row 0 (exponent log_labels[j])
and one in block row 1 (exponent log_labels[j + P*L]).  Orthogonality over
F_q reduces to one congruence per hz row over Z_{q-1}: under the overlap
condition, each hz row shares exactly two columns with each of L hx rows,
the two shared cells force exponent differences between the hz row's L
unknown labels, and those differences close consistently around the row's
class cycle iff the congruence holds.

Two builders produce that system: the block form (signed halves of the hz
support) and an independent derivation straight from the row-overlap
structure; they are equivalent and cross-checked by tests, and the lift
falls back to the derived system if the block form ever fails the
orthogonality oracle.

The homogeneous system is solved over the (composite) ring Z_{q-1} in
Howell echelon form using gcd row operations only — no division — and a
solution is drawn uniformly at random from the full solution set.  The
hz-side labels then follow per row by propagating exponent differences
from a random base, which can never produce a zero label.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .field import GF2e
from .protograph import ProtoPair, condition_b_violation


class NoNonzeroSolutionError(Exception):
    """No all-nonzero labeling exists for this pair.

    Raised when the row-overlap structure the solver relies on is broken,
    which signals a violation of the overlap condition (b).
    """


# ----------------------------------------------------------------------
# Linear algebra over Z_m (m may be composite; gcd row operations only)
# ----------------------------------------------------------------------

def _leading(row) -> int:
    nz = np.nonzero(row)[0]
    return int(nz[0]) if nz.size else -1


def howell_form(matrix, m: int) -> np.ndarray:
    """Row-reduce an integer matrix mod m to Howell echelon form.

    Row operations are unimodular over Z_m (xgcd-based two-row combines),
    so the row span — and the solution set of the homogeneous system — is
    preserved exactly.  Besides echelon shape, the Howell property is
    enforced: for every row with leading entry p, the annihilated multiple
    (m/gcd(p,m))·row reduces to zero against the rows below it.  That
    property is what makes bottom-up back-substitution never dead-end when
    m is composite.
    """
    if m < 1:
        raise ValueError(f"modulus must be >= 1, got {m}")
    matrix = np.atleast_2d(np.asarray(matrix, dtype=np.int64)) % m
    ncols = matrix.shape[1]
    if m == 1:
        return np.zeros((0, ncols), dtype=np.int64)

    pivots: dict[int, np.ndarray] = {}

    def reduce_in(row):
        row = row % m
        while True:
            j = _leading(row)
            if j < 0:
                return
            if j not in pivots:
                pivots[j] = row
                ann = ((m // math.gcd(int(row[j]), m)) * row) % m
                if _leading(ann) >= 0:
                    reduce_in(ann)
                return
            prow = pivots[j]
            p, v = int(prow[j]), int(row[j])
            if v % p == 0:
                row = (row - (v // p) * prow) % m
            else:
                g, u, w = _xgcd(p, v)
                new_pivot = (u * prow + w * row) % m
                row = ((p // g) * row - (v // g) * prow) % m
                pivots[j] = new_pivot
                ann = ((m // math.gcd(g, m)) * new_pivot) % m
                if _leading(ann) >= 0:
                    reduce_in(ann)

    for r in matrix:
        reduce_in(r.copy())

    # Fixpoint: replacing pivot rows above can strand an annihilator, so
    # re-check membership until stable.
    changed = True
    while changed:
        changed = False
        for j in sorted(pivots):
            row = pivots[j]
            ann = ((m // math.gcd(int(row[j]), m)) * row) % m
            if _leading(ann) >= 0 and not _is_member(ann, pivots, m):
                reduce_in(ann)
                changed = True
                break

    if not pivots:
        return np.zeros((0, ncols), dtype=np.int64)
    return np.vstack([pivots[j] for j in sorted(pivots)])


def _xgcd(a: int, b: int):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def _is_member(vec, pivots, m):
    vec = vec.copy() % m
    while True:
        j = _leading(vec)
        if j < 0:
            return True
        if j not in pivots:
            return False
        p = int(pivots[j][j])
        g = math.gcd(p, m)
        if int(vec[j]) % g:
            return False
        t = (int(vec[j]) // g) * pow(p // g, -1, m // g) % (m // g)
        vec = (vec - t * pivots[j]) % m


def sample_solution(echelon, m: int, ncols: int, rng) -> np.ndarray:
    """Uniform random solution x of (echelon) x = 0 over Z_m.

    Free columns draw uniformly from Z_m; each pivot column with leading
    entry p admits exactly gcd(p, m) residues given the assignment to its
    right, one of which is drawn uniformly.  On Howell-form input the
    per-pivot congruence is always solvable.
    """
    x = np.zeros(ncols, dtype=np.int64)
    if m == 1:
        return x
    pivot_cols = [(_leading(r), r) for r in echelon]
    pivot_set = {j for j, _ in pivot_cols}
    for j in range(ncols):
        if j not in pivot_set:
            x[j] = int(rng.integers(m))
    for j, row in sorted(pivot_cols, reverse=True):
        rhs = int((-(row[j + 1:] @ x[j + 1:])) % m)
        p = int(row[j])
        g = math.gcd(p, m)
        if rhs % g:
            raise AssertionError("non-Howell echelon input: pivot congruence unsolvable")
        base = (rhs // g) * pow(p // g, -1, m // g) % (m // g)
        x[j] = base + (m // g) * int(rng.integers(g))
    return x


# ----------------------------------------------------------------------
# The congruence system on the hx-side label exponents
# ----------------------------------------------------------------------

@dataclass
class CongruenceSystem:
    """Homogeneous system  matrix @ log_labels = 0  over Z_{modulus}."""

    matrix: np.ndarray  # (rows, 2PL) int64, entries in [0, modulus)
    modulus: int

    @property
    def unknowns(self) -> int:
        return self.matrix.shape[1]

    def residual(self, x) -> np.ndarray:
        if self.modulus == 1:
            return np.zeros(self.matrix.shape[0], dtype=np.int64)
        return (self.matrix @ np.asarray(x, dtype=np.int64)) % self.modulus


def build_system(proto: ProtoPair, q: int) -> CongruenceSystem:
    """The block-form congruence system on the 2PL label exponents.

    Splits the hz support into left and right column halves and
    concatenates the four signed copies [-left | right | left | -right]
    acting on the block-row-0 and block-row-1 exponent segments.
    """
    P, L = proto.P, proto.L
    m = q - 1
    n = P * L
    supp = proto.support_columns("hz")  # (2P, L)
    rows = 2 * P
    mat = np.zeros((rows, 2 * n), dtype=np.int64)
    minus = (-1) % m if m > 1 else 0
    half_cols = n // 2
    r = np.arange(rows)[:, None]
    left = supp[:, :L // 2]
    right = supp[:, L // 2:]
    if m > 1:
        mat[r, left] = minus
        mat[r, right] = 1
        mat[r, left + n] = 1
        mat[r, right + n] = minus
    assert (left < half_cols).all() and (right >= half_cols).all()
    return CongruenceSystem(matrix=mat, modulus=m)


def derive_system(proto: ProtoPair, q: int) -> CongruenceSystem:
    """The same constraint set derived directly from row overlaps.

    For every hz row, each overlapping hx row shares exactly two columns,
    which ties the exponent difference of the hz row's two labels there to
    a difference of column exponents; one cycle-consistency condition per
    independent cycle of the per-row pairing graph results.  Built without
    reference to the half-split reading, so it cross-checks build_system.
    """
    P, L = proto.P, proto.L
    m = q - 1
    n = P * L
    supp_z = proto.support_columns("hz")
    rows = []
    if m == 1:
        return CongruenceSystem(matrix=np.zeros((0, 2 * n), dtype=np.int64), modulus=m)
    for r in range(2 * P):
        edges = _row_pairing(proto, supp_z[r])
        # potentials over lambda: pot[c] is an integer row vector
        pot = {0: np.zeros(2 * n, dtype=np.int64)}
        adj: dict[int, list] = {c: [] for c in range(L)}
        for (c1, c2, weight) in edges:
            adj[c1].append((c2, weight, +1))
            adj[c2].append((c1, weight, -1))
        stack, seen_edges = [0], set()
        tree_reached = {0}
        conditions = []
        while stack:
            c = stack.pop()
            for (c2, weight, sign) in adj[c]:
                key = (min(c, c2), max(c, c2), weight.tobytes())
                if key in seen_edges:
                    continue
                seen_edges.add(key)
                # d_c1 - d_c2 = weight  =>  pot[c2] = pot[c1] - weight
                delta = (pot[c] - sign * weight) % m
                if c2 in tree_reached:
                    conditions.append((pot[c2] - delta) % m)
                else:
                    pot[c2] = delta
                    tree_reached.add(c2)
                    stack.append(c2)
        rows.extend(conditions)
    mat = np.vstack(rows) if rows else np.zeros((0, 2 * n), dtype=np.int64)
    return CongruenceSystem(matrix=mat, modulus=m)


def _row_pairing(proto: ProtoPair, supp_row):
    """Pairing edges (c1, c2, lambda-coefficient row) for one hz row.

    For each hx block row j, the L overlap points group the hz row's
    support columns into pairs hitting the same hx row.  Groups of any
    size other than two break the two-term equation structure and raise
    NoNonzeroSolutionError with the violating overlap-condition tuple.
    """
    P, L = proto.P, proto.L
    n = P * L
    edges = []
    for j in range(2):
        landing = {}
        for c in range(L):
            col = int(supp_row[c])
            x = col % P
            y = proto.eff_x[j][c](x)
            landing.setdefault(y, []).append(c)
        for y, group in landing.items():
            if len(group) != 2:
                viol = condition_b_violation(proto.arrays)
                raise NoNonzeroSolutionError(
                    f"hz row overlaps an hx row in {len(group)} columns (expected 2); "
                    f"overlap condition violated at (k, l, l', x) = {viol}"
                )
            c1, c2 = group
            w = np.zeros(2 * n, dtype=np.int64)
            # label exponents are column-tied: column col, block row j
            t1 = int(supp_row[c1]) + j * n
            t2 = int(supp_row[c2]) + j * n
            # equation: lam[t1] + d_c1 = lam[t2] + d_c2, i.e.
            # d_c1 - d_c2 = lam[t2] - lam[t1]
            w[t2] += 1
            w[t1] -= 1
            edges.append((c1, c2, w))
    return edges


def solve_system(system: CongruenceSystem, rng_seed: int) -> np.ndarray:
    """A uniform random solution of the congruence system (seeded)."""
    rng = np.random.default_rng(rng_seed)
    ech = howell_form(system.matrix, system.modulus)
    return sample_solution(ech, system.modulus, system.unknowns, rng)


# ----------------------------------------------------------------------
# Label placement
# ----------------------------------------------------------------------

class ExtendedPair:
    """The F_q-valued orthogonal pair as exponent labels on the supports.

    log_labels holds the 2PL column-tied hx-side exponents; z_exponents is
    a (2P, L) grid, one exponent per hz row and block column.  Entries are
    exponents of the primitive element, so every label is nonzero by
    construction.
    """

    def __init__(self, proto: ProtoPair, field: GF2e, log_labels, z_exponents):
        self.proto = proto
        self.field = field
        self.log_labels = np.asarray(log_labels, dtype=np.int64)
        self.z_exponents = np.asarray(z_exponents, dtype=np.int64)
        n = proto.P * proto.L
        if self.log_labels.shape != (2 * n,):
            raise ValueError(f"need {2 * n} label exponents, got {self.log_labels.shape}")
        if self.z_exponents.shape != (2 * proto.P, proto.L):
            raise ValueError("z_exponents must be (2P, L)")
        self.supp_x = proto.support_columns("hx")
        self.supp_z = proto.support_columns("hz")
        # (2P, L) exponent grid on the hx side, derived from column tying
        block_row = (np.arange(2 * proto.P)[:, None] >= proto.P).astype(np.int64)
        self.x_exponents = self.log_labels[self.supp_x + block_row * n]

    # -- element views ---------------------------------------------------
    def labels_x(self) -> np.ndarray:
        """(2P, L) field elements on the hx support."""
        return self.field.antilog[self.x_exponents % (self.field.q - 1)]

    def labels_z(self) -> np.ndarray:
        return self.field.antilog[self.z_exponents % (self.field.q - 1)]

    def dense_fq(self, side: str) -> np.ndarray:
        """Dense (2P, PL) matrix of field elements (small instances only)."""
        P, L = self.proto.P, self.proto.L
        out = np.zeros((2 * P, P * L), dtype=np.int64)
        supp = self.supp_x if side == "hx" else self.supp_z
        vals = self.labels_x() if side == "hx" else self.labels_z()
        out[np.arange(2 * P)[:, None], supp] = vals
        return out

    def orthogonal_fq(self) -> bool:
        """Exact check of the F_q product via the overlap structure."""
        P, L = self.proto.P, self.proto.L
        gf = self.field
        lx = self.labels_x()
        lz = self.labels_z()
        # map each column to its two (hx row, label) incidences
        col_rows = np.zeros((P * L, 2), dtype=np.int64)
        col_vals = np.zeros((P * L, 2), dtype=np.int64)
        for j in range(2):
            cols = self.supp_x[j * P:(j + 1) * P]
            col_rows[cols, j] = np.arange(j * P, (j + 1) * P)[:, None]
            col_vals[cols, j] = lx[j * P:(j + 1) * P]
        mul = gf.mul_table
        for r in range(2 * P):
            acc: dict[int, int] = {}
            for c in range(L):
                col = int(self.supp_z[r, c])
                dv = int(lz[r, c])
                for j in range(2):
                    i = int(col_rows[col, j])
                    acc[i] = acc.get(i, 0) ^ int(mul[int(col_vals[col, j]), dv])
            if any(v != 0 for v in acc.values()):
                return False
        return True

    def __repr__(self):
        return (f"ExtendedPair(P={self.proto.P}, L={self.proto.L}, "
                f"e={self.field.e})")


def lift_gamma(proto: ProtoPair, log_labels) -> np.ndarray:
    """The (2P, L) hx-side exponent grid from the column-tied labels."""
    n = proto.P * proto.L
    log_labels = np.asarray(log_labels, dtype=np.int64)
    supp = proto.support_columns("hx")
    block_row = (np.arange(2 * proto.P)[:, None] >= proto.P).astype(np.int64)
    return log_labels[supp + block_row * n]


def solve_delta(proto: ProtoPair, field: GF2e, log_labels, rng_seed: int,
                randomize: bool = True) -> np.ndarray:
    """Solve for the hz-side exponents given valid hx-side labels.

    Per hz row, the pairing edges fix all exponent differences around the
    row's class cycle; a base exponent (random, or zero when randomize is
    False) then determines every label.  Inconsistent cycles mean the
    given labels do not solve the congruence system.
    """
    P, L = proto.P, proto.L
    m = field.q - 1
    n = P * L
    rng = np.random.default_rng(rng_seed)
    log_labels = np.asarray(log_labels, dtype=np.int64)
    supp_z = proto.support_columns("hz")
    out = np.zeros((2 * P, L), dtype=np.int64)
    for r in range(2 * P):
        edges = _row_pairing(proto, supp_z[r])
        adj: dict[int, list] = {c: [] for c in range(L)}
        for (c1, c2, w) in edges:
            diff = int(w @ log_labels) % m if m > 1 else 0
            adj[c1].append((c2, diff, +1))
            adj[c2].append((c1, diff, -1))
        d = {}
        for root in range(L):
            if root in d:
                continue
            d[root] = int(rng.integers(m)) if (randomize and m > 1) else 0
            stack = [root]
            while stack:
                c = stack.pop()
                for (c2, diff, sign) in adj[c]:
                    # d[c1] - d[c2] = diff along orientation sign
                    val = (d[c] - sign * diff) % m if m > 1 else 0
                    if c2 in d:
                        if d[c2] != val:
                            raise NoNonzeroSolutionError(
                                f"inconsistent label cycle in hz row {r}: "
                                f"the given exponents do not solve the system"
                            )
                    else:
                        d[c2] = val
                        stack.append(c2)
        out[r] = [d[c] for c in range(L)]
    return out


def extend_pair(proto: ProtoPair, field: GF2e, rng_seed: int = 0,
                trivial: bool = False) -> ExtendedPair:
    """Full lift: solve the congruence system, place labels, solve hz side.

    With trivial=True all exponents are zero, embedding the binary pair in
    F_q.  The block-form system is used first; if the lifted pair ever
    failed the exact orthogonality oracle the derived row-overlap system
    would be used instead (the two are equivalent; the fallback is a
    safety net).
    """
    q = field.q
    for builder in (build_system, derive_system):
        if trivial:
            lam = np.zeros(2 * proto.P * proto.L, dtype=np.int64)
        else:
            lam = solve_system(builder(proto, q), rng_seed)
        z_exp = solve_delta(proto, field, lam, rng_seed + 1, randomize=not trivial)
        ext = ExtendedPair(proto, field, lam, z_exp)
        if ext.orthogonal_fq():
            return ext
    raise NoNonzeroSolutionError("no orthogonal all-nonzero lift found")
