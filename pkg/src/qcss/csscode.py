"""Binary CSS pair from a lifted protograph pair via companion matrices.

Each nonzero F_q entry of the lifted pair becomes an e x e binary block:
the hx side uses the plain companion matrix of its label, the hz side the
transposed one.  Products of blocks then mirror field products, so the
exact F_q orthogonality of the lifted pair carries to H_X H_Z^T = 0 over
F_2.  The binary matrices are ePJ x ePL but are never stored dense — the
code object keeps the block-label form and materializes sparse matrices
(or single entries) on demand.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .extend import ExtendedPair
from .field import GF2e


class CssCode:
    """A CSS code in block-label form with on-demand binary views."""

    def __init__(self, ext: ExtendedPair, code_id: str = ""):
        self.ext = ext
        self.field = ext.field
        self.proto = ext.proto
        self.e = self.field.e
        self.q = self.field.q
        self.P = self.proto.P
        self.L = self.proto.L
        self.J = 2
        self.num_segments = self.P * self.L          # variable segments per side
        self.num_checks = 2 * self.P                 # check segments per side
        self.n = self.e * self.num_segments          # physical qubits
        self.code_id = code_id or f"e{self.e}_P{self.P}_L{self.L}"

    @property
    def rate(self) -> float:
        return (self.L - 2 * self.J) / self.L

    # -- binary views ------------------------------------------------------
    def _companion_blocks(self, transposed: bool) -> np.ndarray:
        """(q, e, e) array of companion matrices for every field element."""
        gf = self.field
        out = np.zeros((self.q, self.e, self.e), dtype=np.uint8)
        for x in range(self.q):
            out[x] = gf.companion(x, transposed=transposed)
        return out

    def binary(self, side: str) -> sp.csr_matrix:
        """The e*2P x e*PL binary matrix of one side ("hx" or "hz")."""
        if side == "hx":
            supp, labels = self.ext.supp_x, self.ext.labels_x()
            blocks = self._companion_blocks(transposed=False)
        elif side == "hz":
            supp, labels = self.ext.supp_z, self.ext.labels_z()
            blocks = self._companion_blocks(transposed=True)
        else:
            raise ValueError(f"side must be 'hx' or 'hz', got {side!r}")
        e = self.e
        rows, cols = [], []
        for r in range(self.num_checks):
            for c in range(self.L):
                col = int(supp[r, c])
                br, bc = np.nonzero(blocks[int(labels[r, c])])
                rows.append(r * e + br)
                cols.append(col * e + bc)
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        data = np.ones(len(rows), dtype=np.uint8)
        shape = (e * self.num_checks, e * self.num_segments)
        return sp.csr_matrix((data, (rows, cols)), shape=shape)

    def entry(self, side: str, i: int, j: int) -> int:
        """Single bit of the binary matrix, from the block-label form."""
        e = self.e
        r, br = divmod(i, e)
        col, bc = divmod(j, e)
        supp = self.ext.supp_x if side == "hx" else self.ext.supp_z
        labels = self.ext.labels_x() if side == "hx" else self.ext.labels_z()
        hits = np.nonzero(supp[r] == col)[0]
        if hits.size == 0:
            return 0
        label = int(labels[r, int(hits[0])])
        block = self.field.companion(label, transposed=(side == "hz"))
        return int(block[br, bc])

    def verify_orthogonal(self) -> bool:
        """Exact sparse F_2 test of H_X H_Z^T = 0."""
        prod = self.binary("hx").astype(np.int64) @ self.binary("hz").T.astype(np.int64)
        prod.data %= 2
        prod.eliminate_zeros()
        return prod.nnz == 0

    def __repr__(self):
        return (f"CssCode(id={self.code_id!r}, n={self.n}, e={self.e}, "
                f"P={self.P}, L={self.L}, R={self.rate:g})")


def expand(ext: ExtendedPair, field: GF2e, code_id: str = "") -> CssCode:
    """Expand a lifted pair with the given field tables.

    The field must be the one the pair was lifted over (same degree and
    reduction polynomial); a mismatch is an error because the companion
    blocks would not reproduce the F_q products.
    """
    if field.e != ext.field.e or field.poly != ext.field.poly:
        raise ValueError(
            f"field mismatch: pair lifted over {ext.field!r}, expand called with {field!r}"
        )
    return CssCode(ext, code_id=code_id)


def verify_orthogonal(code: CssCode) -> bool:
    return code.verify_orthogonal()


# ----------------------------------------------------------------------
# Export adapters
# ----------------------------------------------------------------------

def to_alist(matrix: sp.spmatrix) -> str:
    """MacKay alist text for a binary sparse matrix.

    Layout: "n m" (columns, rows), max column/row weights, the per-column
    and per-row weights, then 1-based row indices per column and column
    indices per row, zero-padded to the maxima.
    """
    csc = matrix.tocsc()
    csr = matrix.tocsr()
    m, n = matrix.shape
    col_w = np.diff(csc.indptr)
    row_w = np.diff(csr.indptr)
    wc, wr = int(col_w.max(initial=0)), int(row_w.max(initial=0))
    lines = [f"{n} {m}", f"{wc} {wr}",
             " ".join(map(str, col_w.tolist())),
             " ".join(map(str, row_w.tolist()))]
    for j in range(n):
        idx = (csc.indices[csc.indptr[j]:csc.indptr[j + 1]] + 1).tolist()
        idx += [0] * (wc - len(idx))
        lines.append(" ".join(map(str, idx)))
    for i in range(m):
        idx = (csr.indices[csr.indptr[i]:csr.indptr[i + 1]] + 1).tolist()
        idx += [0] * (wr - len(idx))
        lines.append(" ".join(map(str, idx)))
    return "\n".join(lines) + "\n"


def to_coords(matrix: sp.spmatrix) -> str:
    """Coordinate triplets "row col 1", one per nonzero, with a shape header."""
    coo = matrix.tocoo()
    lines = [f"{coo.shape[0]} {coo.shape[1]} {coo.nnz}"]
    order = np.lexsort((coo.col, coo.row))
    for r, c in zip(coo.row[order], coo.col[order]):
        lines.append(f"{r} {c} 1")
    return "\n".join(lines) + "\n"
