"""Moebius matrices over the trace field and the triangle-group generators.

The group is generated by a parabolic translation A of width tau = 1 + lambda,
an order-n elliptic B, and the order-3 elliptic C = -AB; the parabolic
W = A^-1 B^-2 A^-1 B^-1 fixes -tau and drives the accelerated interval map.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import mpmath

from .errors import DomainError
from .field import FieldElement, NumberField


class _Infinity:
    """The point at infinity of the projective line."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"


INFINITY = _Infinity()


class Mobius:
    """Determinant-one 2x2 matrix over K acting projectively on R u {oo}."""

    __slots__ = ("field", "a", "b", "c", "d")

    def __init__(self, field: NumberField, a, b, c, d, check: bool = True):
        self.field = field
        self.a = field.coerce(a)
        self.b = field.coerce(b)
        self.c = field.coerce(c)
        self.d = field.coerce(d)
        if check:
            det = self.a * self.d - self.b * self.c
            if not (det - 1).is_zero():
                raise ValueError(f"matrix determinant is not 1: {det!r}")

    @staticmethod
    def identity(field: NumberField) -> "Mobius":
        return Mobius(field, 1, 0, 0, 1, check=False)

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def __repr__(self):
        return (
            f"Mobius(n={self.field.n}, [[{self.a.to_json()}, {self.b.to_json()}], "
            f"[{self.c.to_json()}, {self.d.to_json()}]])"
        )

    def __mul__(self, other: "Mobius") -> "Mobius":
        if not isinstance(other, Mobius):
            return NotImplemented
        return Mobius(
            self.field,
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
            check=False,
        )

    def __neg__(self) -> "Mobius":
        return Mobius(self.field, -self.a, -self.b, -self.c, -self.d, check=False)

    def inverse(self) -> "Mobius":
        # adjugate; valid because det = 1
        return Mobius(self.field, self.d, -self.b, -self.c, self.a, check=False)

    def __pow__(self, k: int) -> "Mobius":
        if not isinstance(k, int):
            return NotImplemented
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        out = Mobius.identity(self.field)
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def trace(self) -> FieldElement:
        return self.a + self.d

    def det(self) -> FieldElement:
        return self.a * self.d - self.b * self.c

    def canonical(self) -> "Mobius":
        """Projective normal form: first nonzero entry has positive sign."""
        for e in (self.a, self.b, self.c, self.d):
            s = e.sign()
            if s:
                return -self if s < 0 else self
        raise ValueError("zero matrix cannot be normalized")

    def proj_eq(self, other: "Mobius") -> bool:
        p, q = self.canonical(), other.canonical()
        return all(
            (x - y).is_zero() for x, y in zip(p.entries(), q.entries())
        )

    def __eq__(self, other):
        if not isinstance(other, Mobius):
            return NotImplemented
        return all((x - y).is_zero() for x, y in zip(self.entries(), other.entries()))

    def __hash__(self):
        return hash((self.field.n,) + tuple(e.coeffs for e in self.entries()))

    def apply(self, x):
        """Projective action (ax+b)/(cx+d); exact on field-like values."""
        if x is INFINITY:
            if self.c.is_zero():
                return INFINITY
            return self.a / self.c
        if isinstance(x, (int, Fraction)):
            x = self.field.from_fraction(x)
        num = self.a * x + self.b
        den = self.c * x + self.d
        if _generic_is_zero(den):
            return INFINITY
        return num / den

    def conjugate_by_rotation(self) -> "Mobius":
        """Conjugation by [[0,-1],[1,0]], used to pair x- and y-matrices."""
        e = Mobius(self.field, 0, -1, 1, 0, check=False)
        return e * self * e.inverse()

    def to_json(self):
        return [
            [self.a.to_json(), self.b.to_json()],
            [self.c.to_json(), self.d.to_json()],
        ]


def _generic_is_zero(v):
    if isinstance(v, FieldElement):
        return v.is_zero()
    if hasattr(v, "is_zero"):
        return v.is_zero()
    return v == 0


class Generators(NamedTuple):
    A: Mobius
    B: Mobius
    C: Mobius
    W: Mobius


@lru_cache(maxsize=None)
def generators(field: NumberField) -> Generators:
    """Standard-form generators: cusps at 0, 1 and infinity.

    A = [[1, tau], [0, 1]], B = [[lambda, 1], [-1, 0]], C = [[1, -1], [1, 0]],
    and the parabolic W = [[tau^2+1, tau^3], [-tau, -tau^2+1]] fixing -tau.
    """
    tau = field.tau
    A = Mobius(field, 1, tau, 0, 1)
    B = Mobius(field, field.lam, 1, -1, 0)
    C = Mobius(field, 1, -1, 1, 0)
    t2 = tau * tau
    W = Mobius(field, t2 + 1, t2 * tau, -tau, -t2 + 1)
    return Generators(A, B, C, W)


def digit_matrix(field: NumberField, k: int) -> Mobius:
    """Branch matrix of the accelerated map: A^-k C for k >= 1, W^j for k = -j."""
    if k == 0:
        raise DomainError("digit 0 does not exist")
    g = generators(field)
    if k >= 1:
        # A^-k C = [[1 - k tau, -1], [1, 0]]
        return Mobius(field, 1 - field.tau * k, -1, 1, 0, check=False)
    j = -k
    # W^j = [[1 + j tau^2, j tau^3], [-j tau, 1 - j tau^2]]
    tau = field.tau
    t2 = tau * tau
    return Mobius(field, 1 + t2 * j, t2 * tau * j, -tau * j, 1 - t2 * j, check=False)


def y_matrix(field: NumberField, k: int) -> Mobius:
    """Second-coordinate matrix: the rotation conjugate of digit_matrix.

    For k >= 1 this is N_k = [[0, -1], [1, 1 - k tau]].
    """
    if k >= 1:
        return Mobius(field, 0, -1, 1, 1 - field.tau * k, check=False)
    j = -k
    tau = field.tau
    t2 = tau * tau
    # conjugate of W^j by [[0,-1],[1,0]]
    return Mobius(field, 1 - t2 * j, tau * j, -t2 * tau * j, 1 + t2 * j, check=False)


def power_B(field: NumberField, j: int) -> Mobius:
    """B^j by repeated multiplication (the closed form is a test oracle)."""
    return generators(field).B ** j


@lru_cache(maxsize=None)
def _b_sequence_cache(field: NumberField, k: int) -> FieldElement:
    if k == 0:
        return field.zero
    if k == 1:
        return field.one
    return field.lam * _b_sequence_cache(field, k - 1) - _b_sequence_cache(field, k - 2)


def b_sequence(field: NumberField, k: int) -> FieldElement:
    """Recurrence B_0 = 0, B_1 = 1, B_{k+1} = lambda B_k - B_{k-1}.

    Equals sin(k pi/n)/sin(pi/n) under the real embedding; B^j has entries
    [[B_{j+1}, B_j], [-B_j, -B_{j-1}]].
    """
    if k < 0:
        raise DomainError("b_sequence index must be >= 0")
    return _b_sequence_cache(field, k)


def unconjugated_generators(n: int, dps: int = 40):
    """Rotation-form generators (numeric): the translation by
    cot(pi/2n) + cot(pi/n) and the rotation by pi/n."""
    with mpmath.workdps(dps):
        t = mpmath.pi / n
        sigma = mpmath.matrix([[1, mpmath.cot(t / 2) + mpmath.cot(t)], [0, 1]])
        beta = mpmath.matrix([[mpmath.cos(t), mpmath.sin(t)], [-mpmath.sin(t), mpmath.cos(t)]])
        return sigma, beta


def rotation_conjugation_check(field: NumberField, precision: int = 53) -> dict:
    """Numerically confirm that conjugating the rotation-form generators by
    [[1, cos(pi/n)], [0, sin(pi/n)]] yields A and B entrywise.

    Returns a report with the maximum entrywise deviation; the tolerance is
    2^(-precision/2).
    """
    n = field.n
    dps = max(20, int(precision * 0.35) + 10)
    with mpmath.workdps(dps):
        t = mpmath.pi / n
        P = mpmath.matrix([[1, mpmath.cos(t)], [0, mpmath.sin(t)]])
        Pinv = P ** -1
        sigma, beta = unconjugated_generators(n, dps)
        conj_sigma = Pinv * sigma * P
        conj_beta = Pinv * beta * P
        g = generators(field)
        max_dev = mpmath.mpf(0)
        for M_num, M_exact in ((conj_sigma, g.A), (conj_beta, g.B)):
            for idx, e in zip(
                ((0, 0), (0, 1), (1, 0), (1, 1)), M_exact.entries()
            ):
                enc = e.embed(precision)
                dev = abs(M_num[idx] - mpmath.mpf(enc.mid().numerator) / enc.mid().denominator)
                max_dev = max(max_dev, dev)
        ident = Pinv * mpmath.eye(2) * P
        ident_dev = max(abs(ident[i, j] - (1 if i == j else 0)) for i in range(2) for j in range(2))
        tol = mpmath.mpf(2) ** (-precision / 2)
        return {
            "n": n,
            "max_entry_deviation": float(max_dev),
            "identity_deviation": float(ident_dev),
            "tolerance": float(tol),
            "ok": bool(max_dev <= tol and ident_dev <= tol),
        }


def random_group_word(field: NumberField, rng, length: int) -> Mobius:
    """Random product over the generator alphabet {A, B, C and inverses}."""
    g = generators(field)
    alphabet = [g.A, g.B, g.C, g.A.inverse(), g.B.inverse(), g.C.inverse()]
    out = Mobius.identity(field)
    for _ in range(length):
        out = out * alphabet[rng.randrange(len(alphabet))]
    return out
