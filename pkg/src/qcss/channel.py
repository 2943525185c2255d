"""Depolarizing channel: error sampling, the joint segment prior, hashing bound.

Each qubit independently stays clean with probability 1 - p_d or takes one
of the three Pauli errors with probability p_d/3 each, so the (x, z) bit
pair is (0,0) w.p. 1 - p_d and (0,1), (1,0), (1,1) w.p. p_d/3.  The
marginal flip probability of either bit is f_m = 2 p_d / 3.

The decoder couples the two error components through a q x q prior over
(x-segment, z-segment) pairs indexed by the field symbols xi, zeta with
x = w(xi), z = v(zeta); the channel factorizes over bit positions, so the
table entry is (1-p_d)^z00 (p_d/3)^(e-z00) with z00 the number of
positions where both bits are zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .field import GF2e


@dataclass(frozen=True)
class ChannelParams:
    p_d: float

    def __post_init__(self):
        if not 0.0 <= self.p_d < 1.0:
            raise ValueError(f"depolarizing probability must be in [0, 1), got {self.p_d}")

    @property
    def f_m(self) -> float:
        return 2.0 * self.p_d / 3.0

    @staticmethod
    def from_f_m(f_m: float) -> "ChannelParams":
        return ChannelParams(p_d=1.5 * f_m)


def sample_error(n_segments: int, e: int, p_d: float, rng) -> tuple:
    """IID (x, z) bit vectors of length e * n_segments.

    rng may be a seed or a numpy Generator.  Categories are drawn by a
    single uniform per position against the cumulative thresholds, so the
    draw is reproducible for a given generator state.
    """
    if not 0.0 <= p_d < 1.0:
        raise ValueError(f"depolarizing probability must be in [0, 1), got {p_d}")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    n = n_segments * e
    u = rng.random(n)
    thresholds = np.array([1.0 - p_d, 1.0 - 2.0 * p_d / 3.0, 1.0 - p_d / 3.0])
    cat = np.searchsorted(thresholds, u, side="right")  # 0: clean, 1..3: (0,1),(1,0),(1,1)
    x = (cat >= 2).astype(np.uint8)
    z = ((cat == 1) | (cat == 3)).astype(np.uint8)
    return x, z


_POPCOUNT_CACHE: dict[int, np.ndarray] = {}


def _popcount_table(q: int) -> np.ndarray:
    if q not in _POPCOUNT_CACHE:
        _POPCOUNT_CACHE[q] = np.array([bin(v).count("1") for v in range(q)], dtype=np.int64)
    return _POPCOUNT_CACHE[q]


def build_prior(p_d: float, field: GF2e) -> np.ndarray:
    """(q, q) table prior[xi][zeta] = p(x = w(xi), z = v(zeta))."""
    if not 0.0 <= p_d < 1.0:
        raise ValueError(f"depolarizing probability must be in [0, 1), got {p_d}")
    q, e = field.q, field.e
    pc = _popcount_table(q)
    wbits = field.w_table  # (q,) packed w-bit patterns
    zbits = np.arange(q, dtype=np.int64)
    nonzero_positions = pc[wbits[:, None] | zbits[None, :]]
    return (1.0 - p_d) ** (e - nonzero_positions) * (p_d / 3.0) ** nonzero_positions


def hashing_rate(p_d: float, convention: str = "standard") -> float:
    """Hashing-bound rate at depolarizing probability p_d.

    "standard": R = 1 + (1-p) log2(1-p) + p log2(p/3), the convention in
    which the no-error mass is 1-p and each Pauli has p/3 (consistent with
    f_m = 2p/3).  "printed" is the variant with per-Pauli mass p_d and
    total error 3 p_d, valid for p_d <= 1/3.
    """
    if convention == "standard":
        if not 0.0 <= p_d <= 0.75:
            raise ValueError(f"p_d must be in [0, 3/4], got {p_d}")
        r = 1.0
        if p_d > 0.0:
            r += p_d * math.log2(p_d / 3.0)
        if p_d < 1.0:
            r += (1.0 - p_d) * math.log2(1.0 - p_d)
        return r
    if convention == "printed":
        if not 0.0 <= p_d <= 0.25:
            raise ValueError(f"p_d must be in [0, 1/4] for the printed variant, got {p_d}")
        r = 1.0
        if p_d > 0.0:
            r += 3.0 * p_d * math.log2(p_d)
        if 3.0 * p_d < 1.0:
            r += (1.0 - 3.0 * p_d) * math.log2(1.0 - 3.0 * p_d)
        return r
    raise ValueError(f"convention must be 'standard' or 'printed', got {convention!r}")


def hashing_threshold(rate: float, convention: str = "standard",
                      tol: float = 1e-10) -> float:
    """The p_d at which the hashing rate equals the given coding rate.

    The rate is strictly decreasing in p_d on the valid range, so the root
    is unique; found by bisection to |dp| <= tol.
    """
    if not 0.0 < rate < 1.0:
        raise ValueError(f"rate must be in (0, 1), got {rate}")
    lo, hi = 0.0, 0.75 if convention == "standard" else 0.25
    if hashing_rate(hi, convention) > rate:
        raise ValueError(f"rate {rate} not reached on the valid range")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if hashing_rate(mid, convention) > rate:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
