"""Joint X/Z sum-product decoding over the q-ary segment alphabet.

Both error components are estimated at once from the syndromes.  Each side
has its own constraint graph over field symbols — the X side constrains
the symbols xi_j (with x_j = w(xi_j)) through the hz-side labels, the Z
side the symbols zeta_j (z_j = v(zeta_j)) through the hx-side labels —
and the depolarizing prior couples the two sides segment-wise through a
q x q kernel.

Message vectors are length-q probability vectors in the linear domain,
indexed by the symbol's polynomial-basis bit pattern, and are renormalized
after every update.  Check updates run in the Walsh-Hadamard domain of the
additive group F_2^e: incoming messages are index-permuted by their edge
labels, transformed, combined by leave-one-out products (prefix/suffix, no
division), transformed back, and shifted by the syndrome symbol.  The
prior coupling is the naive q^2 kernel as a matrix product; a per-bit
factorized variant with O(q log q) work per segment is available behind
the same contract.

Hard decisions take, per segment, the symbol maximizing the product of
incoming check messages (ties toward the smaller index), and decoding
succeeds at the first iteration whose decision reproduces both syndromes
exactly.
"""

from __future__ import annotations

from collections import namedtuple
from dataclasses import dataclass

import numpy as np

from .channel import build_prior
from .csscode import CssCode
from .field import GF2e

_FLOOR = 1e-300


def pack_segments(bits, e: int) -> np.ndarray:
    """e-bit segments of a bit vector as integers (bit k -> 2^k)."""
    bits = np.asarray(bits, dtype=np.int64)
    if bits.size % e:
        raise ValueError(f"bit vector length {bits.size} not a multiple of e={e}")
    return bits.reshape(-1, e) @ (1 << np.arange(e, dtype=np.int64))


def unpack_segments(symbols, e: int) -> np.ndarray:
    symbols = np.asarray(symbols, dtype=np.int64)
    return ((symbols[:, None] >> np.arange(e, dtype=np.int64)) & 1).astype(np.uint8).ravel()


def _normalize(a: np.ndarray) -> np.ndarray:
    np.maximum(a, _FLOOR, out=a)
    a /= a.sum(axis=-1, keepdims=True)
    return a


_HADAMARD_CACHE: dict[int, np.ndarray] = {}

# Above this size the dense Hadamard matmul stops paying for itself.
_WHT_MATMUL_MAX = 1024


def _hadamard(n: int) -> np.ndarray:
    if n not in _HADAMARD_CACHE:
        idx = np.arange(n)
        pc = np.array([bin(v).count("1") for v in range(n)], dtype=np.int64)
        _HADAMARD_CACHE[n] = np.where(pc[idx[:, None] & idx[None, :]] % 2, -1.0, 1.0)
    return _HADAMARD_CACHE[n]


def wht(a: np.ndarray) -> np.ndarray:
    """Walsh-Hadamard transform along the last axis (length a power of two).

    Returns a new array.  For the small alphabets used here a dense
    Hadamard matmul runs on BLAS and beats a strided butterfly; the
    butterfly handles larger sizes.
    """
    n = a.shape[-1]
    if n & (n - 1):
        raise ValueError(f"transform length must be a power of two, got {n}")
    if n <= _WHT_MATMUL_MAX:
        return a @ _hadamard(n)
    out = np.array(a, dtype=np.float64, copy=True)
    flat = out.reshape(-1, n)
    h = 1
    while h < n:
        view = flat.reshape(-1, n // (2 * h), 2, h)
        top = view[:, :, 0, :].copy()
        view[:, :, 0, :] += view[:, :, 1, :]
        view[:, :, 1, :] = top - view[:, :, 1, :]
        h *= 2
    return out


def _except_products(t: np.ndarray) -> np.ndarray:
    """Leave-one-out products along axis 1, via prefix/suffix (no division)."""
    d = t.shape[1]
    if d == 1:
        return np.ones_like(t)
    if d == 2:
        return t[:, ::-1, :]
    pre = np.empty_like(t)
    pre[:, 0] = 1.0
    for k in range(1, d):
        np.multiply(pre[:, k - 1], t[:, k - 1], out=pre[:, k])
    suf = np.empty_like(t[:, 0])
    suf[:] = t[:, d - 1]
    for k in range(d - 2, 0, -1):
        np.multiply(pre[:, k], suf, out=pre[:, k])
        suf *= t[:, k]
    np.multiply(pre[:, 0], suf, out=pre[:, 0])
    return pre


CheckGroup = namedtuple("CheckGroup",
                        "degree checks eids flat_in out_base perm_mult labels vars")
VarGroup = namedtuple("VarGroup", "degree vars eids")


class DecoderGraph:
    """One side's constraint graph: per check, its variable segments and labels.

    check_vars[i] and check_labels[i] list the neighbors and the (nonzero)
    edge labels of check i.  Checks and variables are grouped by degree so
    updates run as dense batched array operations per group.
    """

    def __init__(self, field: GF2e, n_vars: int, check_vars, check_labels):
        self.field = field
        self.q = field.q
        self.n_vars = n_vars
        self.n_checks = len(check_vars)

        edge_check, edge_var, edge_label = [], [], []
        for i, (vs, ls) in enumerate(zip(check_vars, check_labels)):
            if len(vs) != len(ls):
                raise ValueError(f"check {i}: {len(vs)} neighbors vs {len(ls)} labels")
            for v, lab in zip(vs, ls):
                if not 0 <= v < n_vars:
                    raise ValueError(f"check {i}: variable {v} out of range")
                if not 0 < lab < self.q:
                    raise ValueError(f"check {i}: label {lab} must be a nonzero element")
                edge_check.append(i)
                edge_var.append(v)
                edge_label.append(lab)
        self.edge_check = np.array(edge_check, dtype=np.int64)
        self.edge_var = np.array(edge_var, dtype=np.int64)
        self.edge_label = np.array(edge_label, dtype=np.int64)
        self.n_edges = len(edge_check)

        mul = field.mul_table
        inv_labels = np.array([field.inv(int(l)) for l in self.edge_label], dtype=np.int64)
        # index maps: incoming relabel eta -> inv(label)*eta, outgoing label*xi
        self.perm_in = mul[inv_labels].astype(np.int64)
        self.perm_mult = mul[self.edge_label].astype(np.int64)

        # degree groups; index tensors are grouped once so the decode loop
        # only gathers floats
        self.check_groups = []
        degrees = np.array([len(vs) for vs in check_vars], dtype=np.int64)
        order = np.argsort(self.edge_check, kind="stable")
        bounds = np.searchsorted(self.edge_check[order], np.arange(self.n_checks + 1))
        for d in sorted(set(degrees.tolist())):
            if d == 0:
                continue
            checks = np.nonzero(degrees == d)[0]
            eids = np.stack([order[bounds[c]:bounds[c + 1]] for c in checks])
            # flat gather indices fuse the edge gather with the label
            # relabeling: flat_in[c, k, eta] reads mu[eids[c,k], inv*eta]
            flat_in = (eids[:, :, None] * self.q + self.perm_in[eids]).astype(np.int32)
            base = (np.arange(eids.size, dtype=np.int32) * self.q
                    ).reshape(eids.shape[0], d, 1)
            self.check_groups.append(CheckGroup(
                degree=d, checks=checks, eids=eids, flat_in=flat_in,
                out_base=base,
                perm_mult=np.ascontiguousarray(self.perm_mult[eids], dtype=np.int32),
                labels=self.edge_label[eids], vars=self.edge_var[eids]))

        self.var_groups = []
        var_deg = np.bincount(self.edge_var, minlength=n_vars)
        vorder = np.argsort(self.edge_var, kind="stable")
        vbounds = np.searchsorted(self.edge_var[vorder], np.arange(n_vars + 1))
        for d in sorted(set(var_deg.tolist())):
            if d == 0:
                continue
            vars_ = np.nonzero(var_deg == d)[0]
            eids = np.stack([vorder[vbounds[v]:vbounds[v + 1]] for v in vars_])
            self.var_groups.append(VarGroup(degree=d, vars=vars_, eids=eids))

    def syndrome_of(self, symbols) -> np.ndarray:
        """Check values sum_j label_ij * sym_j as symbol integers."""
        mul = self.field.mul_table
        syms = np.asarray(symbols, dtype=np.int64)
        out = np.zeros(self.n_checks, dtype=np.int64)
        for g in self.check_groups:
            out[g.checks] = np.bitwise_xor.reduce(mul[g.labels, syms[g.vars]], axis=1)
        return out


def build_graphs(code: CssCode) -> tuple[DecoderGraph, DecoderGraph]:
    """The (X-side, Z-side) graphs of a code.

    X-side checks come from the hz support with its labels (transposed
    companions in the binary picture), Z-side checks from the hx support.
    """
    ext = code.ext
    gx = DecoderGraph(code.field, code.num_segments,
                      ext.supp_z.tolist(), ext.labels_z().tolist())
    gz = DecoderGraph(code.field, code.num_segments,
                      ext.supp_x.tolist(), ext.labels_x().tolist())
    return gx, gz


@dataclass
class DecodeResult:
    success: bool
    iterations: int
    x_symbols: np.ndarray
    z_symbols: np.ndarray
    e: int
    w_table: np.ndarray

    @property
    def x_bits(self) -> np.ndarray:
        return unpack_segments(self.w_table[self.x_symbols], self.e)

    @property
    def z_bits(self) -> np.ndarray:
        return unpack_segments(self.z_symbols, self.e)


class JointDecoder:
    """Flooding-schedule joint decoder bound to a pair of constraint graphs."""

    def __init__(self, graph_x: DecoderGraph, graph_z: DecoderGraph,
                 factorized_coupling: bool = False):
        if graph_x.n_vars != graph_z.n_vars:
            raise ValueError("both sides must share the segment count")
        if graph_x.field is not graph_z.field and graph_x.field.poly != graph_z.field.poly:
            raise ValueError("both sides must share the field")
        self.gx, self.gz = graph_x, graph_z
        self.field = graph_x.field
        self.q = graph_x.q
        self.n_vars = graph_x.n_vars
        self.factorized_coupling = factorized_coupling

    @classmethod
    def for_code(cls, code: CssCode, **kwargs) -> "JointDecoder":
        gx, gz = build_graphs(code)
        return cls(gx, gz, **kwargs)

    # -- update steps ------------------------------------------------------
    @staticmethod
    def _out_indices(graph: DecoderGraph, syndrome: np.ndarray):
        """Per check group: flat gather index for eta = syndrome xor label*xi."""
        syn32 = syndrome.astype(np.int32)
        return [g.out_base + (g.perm_mult ^ syn32[g.checks][:, None, None])
                for g in graph.check_groups]

    def _check_update(self, graph: DecoderGraph, mu: np.ndarray,
                      out_indices, nu: np.ndarray):
        for g, idx in zip(graph.check_groups, out_indices):
            m = mu.ravel()[g.flat_in]  # gather + relabel in one pass
            s = wht(_except_products(wht(m)))
            s /= self.q
            out = s.ravel()[idx]
            _normalize(out)
            nu[g.eids] = out
        return nu

    def _var_gather(self, graph: DecoderGraph, nu: np.ndarray):
        """Per-variable incoming messages plus the resulting check beliefs."""
        gathered = [nu[g.eids] for g in graph.var_groups]
        lam = np.full((self.n_vars, self.q), 1.0 / self.q)
        for g, m in zip(graph.var_groups, gathered):
            lam[g.vars] = m.prod(axis=1)
        return _normalize(lam), gathered

    def _couple(self, lam_other: np.ndarray, prior: np.ndarray, kbit: np.ndarray,
                transpose: bool) -> np.ndarray:
        """kappa from the opposite side's beliefs through the channel kernel."""
        if not self.factorized_coupling:
            kappa = lam_other @ (prior.T if transpose else prior)
        else:
            kappa = _factorized_kernel(lam_other, kbit, transpose, self.field)
        return _normalize(kappa)

    def _var_messages(self, graph: DecoderGraph, gathered,
                      kappa: np.ndarray, mu: np.ndarray):
        for g, m in zip(graph.var_groups, gathered):
            out = _except_products(m) * kappa[g.vars][:, None, :]
            _normalize(out)
            mu[g.eids] = out
        return mu

    # -- main loop -----------------------------------------------------------
    def decode(self, sigma, tau, p_d: float, max_iter: int = 90) -> DecodeResult:
        """Estimate both error components from syndrome symbols.

        sigma and tau are the X-side and Z-side syndromes as symbol
        integers.  Returns at the first iteration whose hard decision
        satisfies both syndrome equations; declares failure after
        max_iter.
        """
        result, _ = self._run(sigma, tau, p_d, max_iter, early_exit=True)
        return result

    def run_beliefs(self, sigma, tau, p_d: float, iterations: int):
        """Converged posterior beliefs (check products times channel coupling).

        Runs a fixed number of iterations with no early exit and returns
        the per-segment normalized belief tables for both sides; on an
        acyclic instance these equal the exact posterior marginals.
        """
        _, beliefs = self._run(sigma, tau, p_d, iterations, early_exit=False)
        return beliefs

    def _run(self, sigma, tau, p_d, max_iter, early_exit):
        if max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {max_iter}")
        sigma = np.asarray(sigma, dtype=np.int64)
        tau = np.asarray(tau, dtype=np.int64)
        if sigma.shape != (self.gx.n_checks,) or tau.shape != (self.gz.n_checks,):
            raise ValueError("syndrome length mismatch")
        prior = build_prior(p_d, self.field)
        kbit = np.array([[1.0 - p_d, p_d / 3.0], [p_d / 3.0, p_d / 3.0]])

        q = self.q
        mu_x = np.full((self.gx.n_edges, q), 1.0 / q)
        mu_z = np.full((self.gz.n_edges, q), 1.0 / q)
        nu_x = np.empty_like(mu_x)
        nu_z = np.empty_like(mu_z)
        out_idx_x = self._out_indices(self.gx, sigma)
        out_idx_z = self._out_indices(self.gz, tau)

        xh = np.zeros(self.n_vars, dtype=np.int64)
        zh = np.zeros(self.n_vars, dtype=np.int64)
        lam_x = lam_z = kap_x = kap_z = None
        success = False
        it = 0
        for it in range(1, max_iter + 1):
            self._check_update(self.gx, mu_x, out_idx_x, nu_x)
            self._check_update(self.gz, mu_z, out_idx_z, nu_z)
            lam_x, gath_x = self._var_gather(self.gx, nu_x)
            lam_z, gath_z = self._var_gather(self.gz, nu_z)
            kap_x = self._couple(lam_z, prior, kbit, transpose=True)
            kap_z = self._couple(lam_x, prior, kbit, transpose=False)
            self._var_messages(self.gx, gath_x, kap_x, mu_x)
            self._var_messages(self.gz, gath_z, kap_z, mu_z)

            xh = np.argmax(lam_x, axis=1)
            zh = np.argmax(lam_z, axis=1)
            if early_exit or it == max_iter:
                ok = (np.array_equal(self.gx.syndrome_of(xh), sigma)
                      and np.array_equal(self.gz.syndrome_of(zh), tau))
                if ok:
                    success = True
                    break
                if not early_exit:
                    break

        result = DecodeResult(success=success, iterations=it,
                              x_symbols=xh, z_symbols=zh,
                              e=self.field.e, w_table=self.field.w_table)
        beliefs = None
        if lam_x is not None:
            beliefs = (_normalize(lam_x * kap_x), _normalize(lam_z * kap_z))
        return result, beliefs


def _factorized_kernel(lam: np.ndarray, kbit: np.ndarray, transpose: bool,
                       field: GF2e) -> np.ndarray:
    """Channel coupling via the per-bit factorization of the prior.

    The q x q kernel is a tensor product of e copies of the 2x2 bit kernel
    kbit[x_bit, z_bit] in (w-bits, v-bits) coordinates, so the contraction
    runs one bit axis at a time in O(q log q) per segment instead of q^2.
    """
    q, e = field.q, field.e
    if transpose:
        # kappa_x[xi] = sum_zeta prior[xi, zeta] lam[zeta]: the zeta axis
        # is plain (v) indexed; contracting every bit with kbit leaves an
        # axis indexed by the w-bit pattern of xi.
        res = lam
        for bit in range(e):
            r = res.reshape(res.shape[0], 2 ** (e - 1 - bit), 2, 2 ** bit)
            res = np.einsum("ab,ncbk->ncak", kbit, r).reshape(res.shape[0], q)
        return res[:, field.w_table]
    # kappa_z[zeta] = sum_xi prior[xi, zeta] lam[xi]: express lam over
    # w-bit patterns, contract, and the result is plain (v) indexed.
    res = lam[:, field.w_inv_table]
    for bit in range(e):
        r = res.reshape(res.shape[0], 2 ** (e - 1 - bit), 2, 2 ** bit)
        res = np.einsum("ab,ncak->ncbk", kbit, r).reshape(res.shape[0], q)
    return res


def check_update(incoming, incoming_labels, out_label: int, syndrome_symbol: int,
                 field: GF2e) -> np.ndarray:
    """One check-to-variable message from the other edges' messages.

    incoming is a (d-1, q) array of normalized messages, incoming_labels
    their edge labels, out_label the label of the addressed edge.  The
    output at value xi is the total probability that the label-weighted
    sum of the other neighbors equals syndrome - out_label*xi, normalized.
    """
    q = field.q
    incoming = np.asarray(incoming, dtype=np.float64).reshape(-1, q)
    mul = field.mul_table
    relab = np.empty_like(incoming)
    for k, lab in enumerate(incoming_labels):
        relab[k] = incoming[k][mul[field.inv(int(lab))]]
    s = wht(wht(relab).prod(axis=0)) / q
    idx = mul[int(out_label)] ^ int(syndrome_symbol)
    return _normalize(s[idx].reshape(1, q)).ravel()


def check_update_bruteforce(incoming, incoming_labels, out_label: int,
                            syndrome_symbol: int, field: GF2e) -> np.ndarray:
    """Direct enumeration of the check constraint (test oracle).

    Walks every configuration of the other neighbors explicitly; no
    transform involved, so it is independent of the WHT path it checks.
    """
    import itertools

    q = field.q
    incoming = np.asarray(incoming, dtype=np.float64).reshape(-1, q)
    d1 = incoming.shape[0]
    mul = field.mul_table
    configs = np.array(list(itertools.product(range(q), repeat=d1)), dtype=np.int64)
    acc = np.zeros(len(configs), dtype=np.int64)
    weights = np.ones(len(configs))
    for k, lab in enumerate(incoming_labels):
        acc ^= mul[int(lab), configs[:, k]]
        weights *= incoming[k, configs[:, k]]
    out = np.zeros(q)
    for xi in range(q):
        target = int(syndrome_symbol) ^ field.mul(int(out_label), xi)
        out[xi] = weights[acc == target].sum()
    return _normalize(out.reshape(1, q)).ravel()


# ----------------------------------------------------------------------
# Syndromes of a code from binary error vectors
# ----------------------------------------------------------------------

def symbols_from_bits(code: CssCode, x_bits, z_bits):
    """Field symbols (xi, zeta) of the e-bit error segments."""
    e = code.e
    x_seg = pack_segments(x_bits, e)
    z_seg = pack_segments(z_bits, e)
    if x_seg.size != code.num_segments or z_seg.size != code.num_segments:
        raise ValueError(f"error vectors must have {code.n} bits")
    xi = code.field.w_inv_table[x_seg]
    zeta = z_seg
    return xi, zeta


def compute_syndromes_fq(code: CssCode, xi, zeta, graphs=None):
    """Syndrome symbols (sigma, tau) from error symbols."""
    gx, gz = graphs if graphs is not None else build_graphs(code)
    return gx.syndrome_of(xi), gz.syndrome_of(zeta)


def compute_syndromes(code: CssCode, x_bits, z_bits, graphs=None):
    """Binary syndromes s = H_Z x and t = H_X z, evaluated blockwise.

    Internally works in the field picture (one symbol per e-bit segment);
    tests check bit-exact agreement with the sparse binary products.
    """
    xi, zeta = symbols_from_bits(code, x_bits, z_bits)
    sigma, tau = compute_syndromes_fq(code, xi, zeta, graphs=graphs)
    s_bits = unpack_segments(code.field.w_table[sigma], code.e)
    t_bits = unpack_segments(tau, code.e)
    return s_bits, t_bits


def syndrome_symbols_from_bits(code: CssCode, s_bits, t_bits):
    """Convert binary syndromes to the symbol form the decoder consumes."""
    e = code.e
    s_seg = pack_segments(s_bits, e)
    t_seg = pack_segments(t_bits, e)
    sigma = code.field.w_inv_table[s_seg]
    tau = t_seg
    return sigma, tau
