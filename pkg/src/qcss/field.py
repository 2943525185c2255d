"""GF(2^e) arithmetic with companion matrices and the v/w bit representations.

Elements are integers in [0, 2^e) whose binary digits are the coefficients
of the polynomial basis {1, alpha, ..., alpha^{e-1}}: bit k of the integer
is the coefficient of alpha^k.  Multiplication and inversion go through
log/antilog tables built from a primitive polynomial, so they are O(1);
addition is XOR.

Two binary vector representations of an element are used when translating
between e-bit blocks and field symbols:

  v(x) : the polynomial-basis coefficients of x (the bits of the integer);
  w(x) : the first column of the transposed companion matrix of x.

Both are additive group isomorphisms F_q -> F_2^e and satisfy
A(y) v(x) = v(yx) and A(y)^T w(x) = w(yx), which is what lets a binary
parity-check product be evaluated symbol-wise.
"""

from __future__ import annotations

import numpy as np

# Default primitive polynomials, low-degree-first coefficient tuples
# (a_0, ..., a_e).  e=8 is 1+x^2+x^3+x^4+x^8.  Primitivity is re-verified
# at construction, so a bad entry cannot slip through silently.
DEFAULT_POLYS = {
    1: (1, 1),
    2: (1, 1, 1),
    3: (1, 1, 0, 1),
    4: (1, 1, 0, 0, 1),
    5: (1, 0, 1, 0, 0, 1),
    6: (1, 1, 0, 0, 0, 0, 1),
    7: (1, 0, 0, 1, 0, 0, 0, 1),
    8: (1, 0, 1, 1, 1, 0, 0, 0, 1),
    9: (1, 0, 0, 0, 1, 0, 0, 0, 0, 1),
    10: (1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1),
    11: (1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    12: (1, 1, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0, 1),
    13: (1, 1, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    14: (1, 1, 0, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1),
    15: (1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    16: (1, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 1),
}

MAX_E = 16


def poly_from_string(s: str) -> tuple[int, ...]:
    """Parse a low-degree-first bit string "a_0 a_1 ... a_e" (no spaces).

    Example: "101110001" is 1 + x^2 + x^3 + x^4 + x^8.
    """
    if not s or any(c not in "01" for c in s):
        raise ValueError(f"polynomial bit string must be nonempty 0/1, got {s!r}")
    return tuple(int(c) for c in s)


def poly_to_string(poly) -> str:
    return "".join(str(int(c)) for c in poly)


class GF2e:
    """The field GF(2^e) for a given primitive polynomial.

    Parameters
    ----------
    e : extension degree, 1 <= e <= 16.
    poly : coefficient sequence (a_0, ..., a_e), low degree first, with
        a_0 = a_e = 1.  Defaults to a standard primitive polynomial.

    Raises ValueError if the polynomial is not primitive (the powers of
    alpha = x must cycle with period exactly 2^e - 1; this also rules out
    reducible polynomials).
    """

    def __init__(self, e: int, poly=None):
        if not 1 <= e <= MAX_E:
            raise ValueError(f"extension degree must be in [1, {MAX_E}], got {e}")
        if poly is None:
            poly = DEFAULT_POLYS[e]
        poly = tuple(int(c) for c in poly)
        if len(poly) != e + 1:
            raise ValueError(f"polynomial must have e+1={e + 1} coefficients, got {len(poly)}")
        if poly[0] != 1 or poly[e] != 1:
            raise ValueError("polynomial must have a_0 = a_e = 1")

        self.e = e
        self.q = 1 << e
        self.poly = poly
        # Bits of the reduction polynomial as an int (bit k = a_k).
        self._poly_int = sum(c << k for k, c in enumerate(poly))

        # Power cycle of alpha = x.  Primitive iff the orbit of 1 under
        # multiplication by x has length exactly q-1.
        q = self.q
        antilog = np.zeros(q - 1 if q > 2 else 1, dtype=np.int64)
        log = np.full(q, -1, dtype=np.int64)
        val = 1
        for i in range(q - 1):
            if log[val] != -1:
                raise ValueError(
                    f"polynomial {poly_to_string(poly)} is not primitive: "
                    f"power cycle closes after {i} < {q - 1} steps"
                )
            antilog[i] = val
            log[val] = i
            val = self._times_x(val)
        if val != 1:
            raise ValueError(f"polynomial {poly_to_string(poly)} is not primitive")
        self.antilog = antilog  # exponent -> element
        self.log = log          # element -> exponent (log[0] = -1 sentinel)

        # Full q x q multiplication table (decoder hot path); kept lazy and
        # size-guarded, since q^2 entries stop being a table at large e.
        self._mul_table = None
        if e <= 10:
            self._mul_table = self._build_mul_table()

        # w(x) for all x, as bit-pattern ints: first column of A^T(x), i.e.
        # first row of A(x); bit j of w(x) is the constant term of x*alpha^j.
        self._w_table = self._build_w_table()
        self._w_inv = np.zeros(self.q, dtype=np.int64)
        self._w_inv[self._w_table] = np.arange(self.q)

    # ------------------------------------------------------------------
    def _times_x(self, a: int) -> int:
        a <<= 1
        if a & self.q:
            a ^= self._poly_int
        return a

    def _build_mul_table(self):
        q = self.q
        idx = (self.log[1:, None] + self.log[None, 1:]) % (q - 1)
        table = np.zeros((q, q), dtype=np.int64)
        table[1:, 1:] = self.antilog[idx]
        return table

    def _build_w_table(self):
        w = np.zeros(self.q, dtype=np.int64)
        logs = self.log[1:]
        for j in range(self.e):
            prod = self.antilog[(logs + j) % (self.q - 1)]
            w[1:] |= (prod & 1) << j
        return w

    # ------------------------------------------------------------------
    # Arithmetic
    # ------------------------------------------------------------------
    def add(self, a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.antilog[(self.log[a] + self.log[b]) % (self.q - 1)])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse in GF(2^e)")
        return int(self.antilog[(-self.log[a]) % (self.q - 1)])

    def pow(self, a: int, n: int) -> int:
        if a == 0:
            if n == 0:
                return 1
            if n < 0:
                raise ZeroDivisionError("negative power of zero")
            return 0
        return int(self.antilog[(self.log[a] * n) % (self.q - 1)])

    def exp(self, i: int) -> int:
        """alpha^i as an element (exponent taken mod q-1)."""
        return int(self.antilog[i % (self.q - 1)])

    @property
    def alpha(self) -> int:
        """The primitive element x, bit pattern 0b10 (or 1 when e = 1)."""
        return int(self.antilog[1 % (self.q - 1)])

    @property
    def mul_table(self):
        if self._mul_table is None:
            if self.e > 13:
                raise MemoryError(
                    f"q x q multiplication table at e={self.e} would hold "
                    f"{self.q ** 2} entries; use mul() instead"
                )
            self._mul_table = self._build_mul_table()
        return self._mul_table

    # ------------------------------------------------------------------
    # Companion matrices and vector representations
    # ------------------------------------------------------------------
    def companion(self, x: int, transposed: bool = False):
        """e x e binary matrix of multiplication by x in the polynomial basis.

        Column j is v(x * alpha^j); the zero element maps to the zero
        matrix.  With transposed=True returns the transpose, which equals
        (A(alpha)^T)^i for x = alpha^i.
        """
        e = self.e
        mat = np.zeros((e, e), dtype=np.uint8)
        for j in range(e):
            col = self.mul(x, 1 << j)
            for k in range(e):
                mat[k, j] = (col >> k) & 1
        return mat.T.copy() if transposed else mat

    def vec(self, x: int, kind: str = "v"):
        """Length-e bit vector v(x) or w(x)."""
        if kind == "v":
            bits = x
        elif kind == "w":
            bits = int(self._w_table[x])
        else:
            raise ValueError(f"kind must be 'v' or 'w', got {kind!r}")
        return np.array([(bits >> k) & 1 for k in range(self.e)], dtype=np.uint8)

    def w_int(self, x: int) -> int:
        """w(x) packed as an integer (bit k = component k)."""
        return int(self._w_table[x])

    def w_inv_int(self, bits: int) -> int:
        """The symbol x with w(x) equal to the given packed bit pattern."""
        return int(self._w_inv[bits])

    @property
    def w_table(self):
        return self._w_table

    @property
    def w_inv_table(self):
        return self._w_inv

    def __repr__(self):
        return f"GF2e(e={self.e}, poly={poly_to_string(self.poly)})"


def bits_to_int(bits) -> int:
    """Pack a bit vector (component k -> bit k) into an integer."""
    return int(np.sum(np.asarray(bits, dtype=np.int64) << np.arange(len(bits))))


def int_to_bits(value: int, width: int):
    return np.array([(value >> k) & 1 for k in range(width)], dtype=np.uint8)
