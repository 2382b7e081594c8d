"""Quaternion matrices stored as a pair of complex arrays.

A quaternion ``w + x i + y j + z k`` is written ``a + b j`` with complex
``a = w + x i`` and ``b = y + z i``.  Multiplication then only needs complex
matrix products, and the complex adjoint ``[[a, b], [-conj(b), conj(a)]]`` is
a ring homomorphism that LAPACK routines can work on.
"""
from __future__ import annotations

import numpy as np


class QMat:
    __slots__ = ("a", "b")

    def __init__(self, a, b=None):
        a = np.asarray(a, dtype=complex)
        if a.ndim == 1:
            a = a.reshape(-1, 1)
        if b is None:
            b = np.zeros_like(a)
        else:
            b = np.asarray(b, dtype=complex).reshape(a.shape)
        self.a = a
        self.b = b

    # construction ---------------------------------------------------------
    @classmethod
    def zeros(cls, m: int, n: int) -> "QMat":
        return cls(np.zeros((m, n), complex), np.zeros((m, n), complex))

    @classmethod
    def eye(cls, n: int, m: int | None = None) -> "QMat":
        m = n if m is None else m
        return cls(np.eye(n, m, dtype=complex), np.zeros((n, m), complex))

    @classmethod
    def from_components(cls, arr) -> "QMat":
        arr = np.asarray(arr, dtype=float)
        return cls(arr[..., 0] + 1j * arr[..., 1], arr[..., 2] + 1j * arr[..., 3])

    @classmethod
    def real(cls, m) -> "QMat":
        m = np.atleast_2d(np.asarray(m, dtype=float))
        return cls(m.astype(complex), np.zeros(m.shape, complex))

    @classmethod
    def block(cls, rows) -> "QMat":
        a = np.block([[blk.a for blk in row] for row in rows])
        b = np.block([[blk.b for blk in row] for row in rows])
        return cls(a, b)

    @classmethod
    def hstack(cls, mats) -> "QMat":
        return cls(np.hstack([m.a for m in mats]), np.hstack([m.b for m in mats]))

    @classmethod
    def vstack(cls, mats) -> "QMat":
        return cls(np.vstack([m.a for m in mats]), np.vstack([m.b for m in mats]))

    @classmethod
    def blkdiag(cls, *mats) -> "QMat":
        m = sum(x.shape[0] for x in mats)
        n = sum(x.shape[1] for x in mats)
        out = cls.zeros(m, n)
        i = j = 0
        for x in mats:
            p, q = x.shape
            out.a[i:i + p, j:j + q] = x.a
            out.b[i:i + p, j:j + q] = x.b
            i += p
            j += q
        return out

    # basic protocol --------------------------------------------------------
    @property
    def shape(self):
        return self.a.shape

    def copy(self) -> "QMat":
        return QMat(self.a.copy(), self.b.copy())

    def components(self) -> np.ndarray:
        return np.stack([self.a.real, self.a.imag, self.b.real, self.b.imag], axis=-1)

    def __getitem__(self, idx) -> "QMat":
        a = self.a[idx]
        b = self.b[idx]
        if a.ndim == 1:
            # keep 2-d: a single row or column index was given
            if isinstance(idx, tuple) and isinstance(idx[0], (int, np.integer)):
                a, b = a.reshape(1, -1), b.reshape(1, -1)
            else:
                a, b = a.reshape(-1, 1), b.reshape(-1, 1)
        elif a.ndim == 0:
            a, b = a.reshape(1, 1), b.reshape(1, 1)
        return QMat(a, b)

    def __setitem__(self, idx, val: "QMat"):
        self.a[idx] = val.a.reshape(self.a[idx].shape)
        self.b[idx] = val.b.reshape(self.b[idx].shape)

    def __add__(self, o: "QMat") -> "QMat":
        return QMat(self.a + o.a, self.b + o.b)

    def __sub__(self, o: "QMat") -> "QMat":
        return QMat(self.a - o.a, self.b - o.b)

    def __neg__(self) -> "QMat":
        return QMat(-self.a, -self.b)

    def scale(self, s) -> "QMat":
        """Multiply by a real scalar or real array broadcastable to the shape."""
        return QMat(self.a * s, self.b * s)

    def __matmul__(self, o: "QMat") -> "QMat":
        a = self.a @ o.a - self.b @ o.b.conj()
        b = self.a @ o.b + self.b @ o.a.conj()
        return QMat(a, b)

    @property
    def H(self) -> "QMat":
        return QMat(self.a.conj().T, -self.b.T)

    def abs2(self) -> np.ndarray:
        return self.a.real ** 2 + self.a.imag ** 2 + self.b.real ** 2 + self.b.imag ** 2

    def absmax(self) -> float:
        if self.a.size == 0:
            return 0.0
        return float(np.sqrt(self.abs2().max()))

    def fro(self) -> float:
        return float(np.sqrt(self.abs2().sum()))

    def col_norms(self) -> np.ndarray:
        return np.sqrt(self.abs2().sum(axis=0))

    def real_part(self) -> np.ndarray:
        return self.a.real

    def adjoint(self) -> np.ndarray:
        return np.block([[self.a, self.b], [-self.b.conj(), self.a.conj()]])

    @classmethod
    def from_adjoint_columns(cls, w: np.ndarray, m: int) -> "QMat":
        # first-block column [a; -conj(b)] of the adjoint of a quaternion vector
        return cls(w[:m], -w[m:].conj())

    def __repr__(self):
        return f"QMat(shape={self.shape})"


def qscalar(w=0.0, x=0.0, y=0.0, z=0.0) -> QMat:
    return QMat(np.array([[w + 1j * x]]), np.array([[y + 1j * z]]))


def unit_phase_of(a: complex, b: complex):
    """Unit quaternion (as complex pair) with the phase of a + b j, or None."""
    n = np.sqrt(abs(a) ** 2 + abs(b) ** 2)
    if n == 0:
        return None
    return a / n, b / n


def right_mul_cols(M: QMat, pa: np.ndarray, pb: np.ndarray) -> QMat:
    """Multiply column j of M on the right by the quaternion pa[j] + pb[j] j."""
    a = M.a * pa[None, :] - M.b * pb.conj()[None, :]
    b = M.a * pb[None, :] + M.b * pa.conj()[None, :]
    return QMat(a, b)
