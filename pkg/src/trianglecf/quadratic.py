"""Real quadratic extensions K(sqrt(D)) over the trace field.

Fixed points of hyperbolic group elements live here; the arithmetic stays
exact so periodicity checks need no tolerance at all.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import DomainError, PrecisionExhausted
from .field import Enclosure, FieldElement, NumberField, get_precision_cap


def _sqrt_enclosure(x: Enclosure, precision: int) -> Enclosure:
    """Certified rational enclosure of sqrt of a nonnegative enclosure."""
    if x.lo < 0:
        raise DomainError("square root of a possibly-negative value")
    scale = 1 << (2 * precision)

    def lower(q: Fraction) -> Fraction:
        m = (q.numerator * scale) // q.denominator
        return Fraction(math.isqrt(m), 1 << precision)

    def upper(q: Fraction) -> Fraction:
        m = -((-q.numerator * scale) // q.denominator)  # ceil
        r = math.isqrt(m)
        if r * r < m:
            r += 1
        return Fraction(r, 1 << precision)

    return Enclosure(lower(x.lo), upper(x.hi))


class QuadExt:
    """Element u + v*sqrt(D) with u, v, D in K and D > 0 not a square."""

    __slots__ = ("field", "u", "v", "disc")

    def __init__(self, field: NumberField, u, v, disc):
        self.field = field
        self.u = field.coerce(u)
        self.v = field.coerce(v)
        self.disc = field.coerce(disc)

    @staticmethod
    def from_field(x: FieldElement, disc: FieldElement) -> "QuadExt":
        return QuadExt(x.field, x, x.field.zero, disc)

    def conjugate(self) -> "QuadExt":
        return QuadExt(self.field, self.u, -self.v, self.disc)

    def is_zero(self) -> bool:
        # D is not a square in K, so u + v sqrt(D) = 0 iff u = v = 0
        return self.u.is_zero() and self.v.is_zero()

    def _coerce(self, other):
        if isinstance(other, QuadExt):
            if not (other.disc - self.disc).is_zero():
                raise ValueError("mixing different quadratic extensions")
            return other
        if isinstance(other, (int, Fraction, FieldElement)):
            return QuadExt(self.field, other, 0, self.disc)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(self.field, self.u + o.u, self.v + o.v, self.disc)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(self.field, self.u - o.u, self.v - o.v, self.disc)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return QuadExt(self.field, -self.u, -self.v, self.disc)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(
            self.field,
            self.u * o.u + self.v * o.v * self.disc,
            self.u * o.v + self.v * o.u,
            self.disc,
        )

    __rmul__ = __mul__

    def inverse(self) -> "QuadExt":
        norm = self.u * self.u - self.v * self.v * self.disc
        if norm.is_zero():
            raise ZeroDivisionError("inverse of zero in quadratic extension")
        ninv = norm.inverse()
        return QuadExt(self.field, self.u * ninv, -self.v * ninv, self.disc)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def sign(self) -> int:
        """Exact sign, with sqrt(D) the positive square root."""
        su, sv = self.u.sign(), self.v.sign()
        if sv == 0:
            return su
        if su == 0:
            return sv
        if su == sv:
            return su
        # opposite signs: compare u^2 against v^2 D
        diff = self.u * self.u - self.v * self.v * self.disc
        s = diff.sign()
        # u + v sqrt(D) > 0 iff (v > 0 and v^2 D > u^2) or (u > 0 and u^2 > v^2 D)
        if s == 0:
            return 0  # cannot happen when D is not a square; kept for safety
        return sv if s < 0 else su

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).is_zero()

    def __lt__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() < 0

    def __le__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() <= 0

    def __gt__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() > 0

    def __ge__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() >= 0

    def __hash__(self):
        return hash((self.field.n, self.u.coeffs, self.v.coeffs, self.disc.coeffs))

    def embed(self, precision: int = 53) -> Enclosure:
        p = max(precision + 8, 64)
        cap = max(get_precision_cap(), p)
        while True:
            eu = self.u.embed_raw(p)
            ev = self.v.embed_raw(p)
            ed = self.disc.embed_raw(p)
            if ed.lo < 0:
                if ed.hi < 0:
                    raise DomainError("negative discriminant has no real embedding")
                p *= 2
                continue
            sq = _sqrt_enclosure(ed, p)
            lo = min(ev.lo * sq.lo, ev.lo * sq.hi, ev.hi * sq.lo, ev.hi * sq.hi)
            hi = max(ev.lo * sq.lo, ev.lo * sq.hi, ev.hi * sq.lo, ev.hi * sq.hi)
            enc = Enclosure(eu.lo + lo, eu.hi + hi)
            scale = max(Fraction(1), abs(enc.lo), abs(enc.hi))
            if enc.width() <= Fraction(2) ** (1 - precision) * scale:
                return enc
            if p >= cap:
                raise PrecisionExhausted("quadratic embedding did not converge")
            p *= 2

    def __float__(self):
        return float(self.embed(53))

    def floor(self) -> int:
        if self.v.is_zero():
            return self.u.floor()
        p = 64
        cap = get_precision_cap()
        while True:
            enc = self.embed(p)
            f_lo, f_hi = math.floor(enc.lo), math.floor(enc.hi)
            if f_lo == f_hi:
                return f_lo
            m = f_hi  # candidate integer inside the enclosure
            if (self - m).is_zero():
                return m
            if p >= cap:
                raise PrecisionExhausted("floor undecided", boundary=enc)
            p *= 2

    def ceil(self) -> int:
        return -((-self).floor())

    def __repr__(self):
        return (
            f"QuadExt(n={self.field.n}, u={self.u.to_json()}, "
            f"v={self.v.to_json()}, D={self.disc.to_json()})"
        )


def solve_fixed_points(M) -> tuple:
    """Both fixed points of a hyperbolic Moebius matrix as QuadExt values.

    Solves c x^2 + (d - a) x - b = 0; returns (root_plus, root_minus, disc)
    where root_plus carries +sqrt(disc) of the trace discriminant and
    disc = tr^2 - 4.
    """
    field = M.field
    a, b, c, d = M.entries()
    if c.is_zero():
        raise DomainError("fixed points at infinity are not represented")
    disc = (d - a) * (d - a) + 4 * b * c
    if disc.sign() <= 0:
        raise DomainError("matrix is not hyperbolic over the reals")
    inv2c = (c + c).inverse()
    u = (a - d) * inv2c
    v = inv2c
    return (
        QuadExt(field, u, v, disc),
        QuadExt(field, u, -v, disc),
        disc,
    )


def compare_numeric(a, b, start_bits: int = 80):
    """Order two real algebraic values living in different extensions.

    Returns -1/0/+1; refines enclosures and falls back to an exactness check
    when the values keep overlapping.
    """
    p = start_bits
    cap = get_precision_cap()
    while True:
        ea = a.embed(p) if hasattr(a, "embed") else Enclosure(Fraction(a), Fraction(a))
        eb = b.embed(p) if hasattr(b, "embed") else Enclosure(Fraction(b), Fraction(b))
        if ea.hi < eb.lo:
            return -1
        if eb.hi < ea.lo:
            return 1
        if p >= cap:
            raise PrecisionExhausted("comparison undecided", boundary=(ea, eb))
        p *= 2
