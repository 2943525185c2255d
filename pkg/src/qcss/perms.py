"""Permutations on Z_P in three flavors: general table, shift, and affine.

Text forms used in code files: "cpm b", "apm a b", "gen i0 i1 ... i(P-1)".
A shift x -> x+b is the special affine map with a = 1; affine maps require
gcd(a, P) = 1 so they are bijections.
"""

from __future__ import annotations

import math

import numpy as np


class Perm:
    """A permutation of {0, ..., P-1}.

    kind is one of "cpm" (x -> x+b), "apm" (x -> a*x+b with gcd(a,P)=1),
    or "gen" (explicit image table).  Instances are immutable.
    """

    __slots__ = ("P", "kind", "a", "b", "_table")

    def __init__(self, P: int, kind: str, a: int = 1, b: int = 0, table=None):
        if P < 1:
            raise ValueError(f"modulus must be >= 1, got {P}")
        self.P = P
        self.kind = kind
        if kind == "cpm":
            self.a, self.b = 1, b % P
            self._table = None
        elif kind == "apm":
            a %= P
            if math.gcd(a, P) != 1:
                raise ValueError(f"apm coefficient a={a} not coprime to P={P}")
            self.a, self.b = a, b % P
            self._table = None
        elif kind == "gen":
            t = np.asarray(table, dtype=np.int64)
            if t.shape != (P,) or not np.array_equal(np.sort(t), np.arange(P)):
                raise ValueError("general permutation table must be a bijection on Z_P")
            self.a, self.b = 0, 0
            self._table = t
            self._table.setflags(write=False)
        else:
            raise ValueError(f"unknown permutation kind {kind!r}")

    # Constructors ------------------------------------------------------
    @staticmethod
    def cpm(P: int, b: int) -> "Perm":
        return Perm(P, "cpm", b=b)

    @staticmethod
    def apm(P: int, a: int, b: int) -> "Perm":
        return Perm(P, "apm", a=a, b=b)

    @staticmethod
    def general(P: int, table) -> "Perm":
        return Perm(P, "gen", table=table)

    @staticmethod
    def identity(P: int) -> "Perm":
        return Perm(P, "cpm", b=0)

    # Evaluation --------------------------------------------------------
    def __call__(self, x: int) -> int:
        if not 0 <= x < self.P:
            raise ValueError(f"argument {x} out of range [0, {self.P})")
        if self._table is not None:
            return int(self._table[x])
        return (self.a * x + self.b) % self.P

    def apply(self, xs):
        """Vectorized evaluation on an integer array."""
        xs = np.asarray(xs, dtype=np.int64)
        if self._table is not None:
            return self._table[xs]
        return (self.a * xs + self.b) % self.P

    @property
    def table(self):
        """The full image array (computed once for cpm/apm)."""
        if self._table is None:
            t = (self.a * np.arange(self.P, dtype=np.int64) + self.b) % self.P
            t.setflags(write=False)
            self._table = t
        return self._table

    # Algebra -----------------------------------------------------------
    def compose(self, other: "Perm") -> "Perm":
        """self after other: (self.compose(other))(x) = self(other(x))."""
        if self.P != other.P:
            raise ValueError(f"modulus mismatch: {self.P} vs {other.P}")
        P = self.P
        if self._table is None and other._table is None:
            a = (self.a * other.a) % P
            b = (self.a * other.b + self.b) % P
            if self.kind == "cpm" and other.kind == "cpm":
                return Perm.cpm(P, b)
            return Perm.apm(P, a, b)
        return Perm.general(P, self.apply(other.table))

    def inverse(self) -> "Perm":
        P = self.P
        if self.kind == "cpm":
            return Perm.cpm(P, -self.b)
        if self.kind == "apm":
            ainv = pow(self.a, -1, P)
            return Perm.apm(P, ainv, (-ainv * self.b) % P)
        inv = np.empty(P, dtype=np.int64)
        inv[self._table] = np.arange(P)
        return Perm.general(P, inv)

    def commutes(self, other: "Perm") -> bool:
        """Exhaustive pointwise check of self∘other = other∘self."""
        if self.P != other.P:
            raise ValueError(f"modulus mismatch: {self.P} vs {other.P}")
        xs = np.arange(self.P, dtype=np.int64)
        return bool(np.array_equal(self.apply(other.apply(xs)), other.apply(self.apply(xs))))

    def __eq__(self, other):
        if not isinstance(other, Perm):
            return NotImplemented
        if self.P != other.P:
            return False
        return bool(np.array_equal(self.table, other.table))

    def __hash__(self):
        return hash((self.P, self.table.tobytes()))

    # Text form ---------------------------------------------------------
    def to_text(self) -> str:
        if self.kind == "cpm":
            return f"cpm {self.b}"
        if self.kind == "apm":
            return f"apm {self.a} {self.b}"
        return "gen " + " ".join(str(int(v)) for v in self._table)

    @staticmethod
    def from_text(text: str, P: int) -> "Perm":
        parts = text.split()
        if not parts:
            raise ValueError("empty permutation text")
        kind, args = parts[0], parts[1:]
        if kind == "cpm":
            if len(args) != 1:
                raise ValueError(f"cpm takes one offset, got {text!r}")
            return Perm.cpm(P, int(args[0]))
        if kind == "apm":
            if len(args) != 2:
                raise ValueError(f"apm takes two coefficients, got {text!r}")
            return Perm.apm(P, int(args[0]), int(args[1]))
        if kind == "gen":
            if len(args) != P:
                raise ValueError(f"gen needs {P} images, got {len(args)}")
            return Perm.general(P, [int(v) for v in args])
        raise ValueError(f"unknown permutation kind {kind!r}")

    def __repr__(self):
        return f"Perm(P={self.P}, {self.to_text()})"


def compose(p1: Perm, p2: Perm) -> Perm:
    return p1.compose(p2)


def commutes(p1: Perm, p2: Perm) -> bool:
    return p1.commutes(p2)
