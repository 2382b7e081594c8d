"""Dual numbers, quaternions and dual quaternions.

Everything here is an immutable value type.  The dual unit ``eps`` satisfies
``eps**2 == 0`` and commutes with quaternions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .errors import Negative, NotAppreciable

Real = Union[int, float]

_SPLITTER = 134217729.0  # 2**27 + 1


def _split(a: float):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a: float, b: float):
    # error-free product: a*b == p + e exactly (barring over/underflow)
    p = a * b
    if not math.isfinite(p):
        return p, 0.0
    ah, al = _split(a)
    bh, bl = _split(b)
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def _dot2(a: float, b: float, c: float, d: float) -> float:
    """Correctly rounded a*b + c*d."""
    p, e = _two_prod(a, b)
    q, f = _two_prod(c, d)
    return math.fsum((p, e, q, f))


@dataclass(frozen=True)
class ToleranceConfig:
    """Thresholds used to classify floating point dual quantities."""

    appreciable_tol: float = 1e-12
    rank_tol: float = 1e-10
    residual_tol: float = 1e-9

    def __post_init__(self):
        for name in ("appreciable_tol", "rank_tol", "residual_tol"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be a finite positive number, got {v!r}")
        if self.rank_tol < 2.220446049250313e-16:
            raise ValueError("rank_tol must not be below machine epsilon")


DEFAULT_TOL = ToleranceConfig()


@dataclass(frozen=True)
class DualNumber:
    standard: float = 0.0
    infinitesimal: float = 0.0

    @classmethod
    def of(cls, x) -> "DualNumber":
        if isinstance(x, DualNumber):
            return x
        if isinstance(x, tuple):
            return cls(float(x[0]), float(x[1]))
        return cls(float(x), 0.0)

    def is_appreciable(self, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
        return abs(self.standard) > tol.appreciable_tol

    def __add__(self, other):
        o = DualNumber.of(other)
        return DualNumber(self.standard + o.standard, self.infinitesimal + o.infinitesimal)

    __radd__ = __add__

    def __neg__(self):
        return DualNumber(-self.standard, -self.infinitesimal)

    def __sub__(self, other):
        return self + (-DualNumber.of(other))

    def __rsub__(self, other):
        return DualNumber.of(other) - self

    def __mul__(self, other):
        return dn_mul(self, DualNumber.of(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return dn_mul(self, dn_inv(DualNumber.of(other)))

    def __rtruediv__(self, other):
        return dn_mul(DualNumber.of(other), dn_inv(self))

    def __abs__(self):
        return dn_abs(self)

    def __lt__(self, other):
        return dn_cmp(self, DualNumber.of(other)) < 0

    def __le__(self, other):
        return dn_cmp(self, DualNumber.of(other)) <= 0

    def __gt__(self, other):
        return dn_cmp(self, DualNumber.of(other)) > 0

    def __ge__(self, other):
        return dn_cmp(self, DualNumber.of(other)) >= 0

    def __iter__(self):
        yield self.standard
        yield self.infinitesimal

    def __str__(self):
        return f"{self.standard:.17g}{self.infinitesimal:+.17g}eps"


def dn_mul(p: DualNumber, q: DualNumber) -> DualNumber:
    return DualNumber(p.standard * q.standard,
                      _dot2(p.standard, q.infinitesimal, p.infinitesimal, q.standard))


def dn_inv(q: DualNumber, tol: ToleranceConfig = DEFAULT_TOL) -> DualNumber:
    a, b = q.standard, q.infinitesimal
    if abs(a) <= tol.appreciable_tol:
        raise NotAppreciable(f"dual number {q} has no inverse")
    return DualNumber(1.0 / a, -(b / a) / a)


def dn_sqrt(q: DualNumber, tol: ToleranceConfig = DEFAULT_TOL) -> DualNumber:
    a, b = q.standard, q.infinitesimal
    if a < 0 or (a == 0 and b < 0):
        raise Negative(f"square root of negative dual number {q}")
    if a <= tol.appreciable_tol:
        raise NotAppreciable(f"square root of infinitesimal dual number {q}")
    s = math.sqrt(a)
    return DualNumber(s, b / (2.0 * s))


def _sgn(x: float) -> int:
    return (x > 0) - (x < 0)


def dn_abs(q: DualNumber) -> DualNumber:
    a, b = q.standard, q.infinitesimal
    if a != 0:
        return DualNumber(abs(a), _sgn(a) * b)
    return DualNumber(0.0, abs(b))


def dn_cmp(p: DualNumber, q: DualNumber) -> int:
    """Lexicographic total order; returns -1, 0 or 1."""
    if p.standard != q.standard:
        return -1 if p.standard < q.standard else 1
    if p.infinitesimal != q.infinitesimal:
        return -1 if p.infinitesimal < q.infinitesimal else 1
    return 0


def dn_close(p: DualNumber, q: DualNumber, tol: float) -> bool:
    return abs(p.standard - q.standard) <= tol and abs(p.infinitesimal - q.infinitesimal) <= tol


@dataclass(frozen=True)
class Quaternion:
    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __mul__(self, o):
        if isinstance(o, (int, float)):
            return Quaternion(self.w * o, self.x * o, self.y * o, self.z * o)
        a1, b1, c1, d1 = self.w, self.x, self.y, self.z
        a2, b2, c2, d2 = o.w, o.x, o.y, o.z
        return Quaternion(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )

    def __rmul__(self, s):
        return self * s

    def __add__(self, o):
        return Quaternion(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)

    def __sub__(self, o):
        return Quaternion(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)

    def __neg__(self):
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def conj(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm2(self) -> float:
        return self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z

    def norm(self) -> float:
        return math.sqrt(self.norm2())

    def as_tuple(self):
        return (self.w, self.x, self.y, self.z)


Q_ONE = Quaternion(1.0)
Q_I = Quaternion(0.0, 1.0)
Q_J = Quaternion(0.0, 0.0, 1.0)
Q_K = Quaternion(0.0, 0.0, 0.0, 1.0)


@dataclass(frozen=True)
class DualQuaternion:
    standard: Quaternion = Quaternion()
    infinitesimal: Quaternion = Quaternion()

    @classmethod
    def of(cls, x) -> "DualQuaternion":
        if isinstance(x, DualQuaternion):
            return x
        if isinstance(x, Quaternion):
            return cls(x, Quaternion())
        if isinstance(x, DualNumber):
            return cls(Quaternion(x.standard), Quaternion(x.infinitesimal))
        return cls(Quaternion(float(x)), Quaternion())

    def __mul__(self, o):
        return dq_mul(self, DualQuaternion.of(o))

    def __rmul__(self, o):
        return dq_mul(DualQuaternion.of(o), self)

    def __add__(self, o):
        o = DualQuaternion.of(o)
        return DualQuaternion(self.standard + o.standard, self.infinitesimal + o.infinitesimal)

    def __sub__(self, o):
        o = DualQuaternion.of(o)
        return DualQuaternion(self.standard - o.standard, self.infinitesimal - o.infinitesimal)

    def __neg__(self):
        return DualQuaternion(-self.standard, -self.infinitesimal)

    def conj(self) -> "DualQuaternion":
        return dq_conj(self)

    def is_appreciable(self, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
        return self.standard.norm() > tol.appreciable_tol

    def magnitude(self) -> DualNumber:
        """|q| as a dual number."""
        s = self.standard.norm()
        if s > 0:
            st, it = self.standard.as_tuple(), self.infinitesimal.as_tuple()
            return DualNumber(s, sum(a * b for a, b in zip(st, it)) / s)
        return DualNumber(0.0, self.infinitesimal.norm())

    def as_tuple(self):
        return self.standard.as_tuple() + self.infinitesimal.as_tuple()


def dq_mul(p: DualQuaternion, q: DualQuaternion) -> DualQuaternion:
    return DualQuaternion(p.standard * q.standard,
                          p.standard * q.infinitesimal + p.infinitesimal * q.standard)


def dq_conj(q: DualQuaternion) -> DualQuaternion:
    return DualQuaternion(q.standard.conj(), q.infinitesimal.conj())
