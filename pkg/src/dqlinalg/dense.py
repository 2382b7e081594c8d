"""Dense dual quaternion matrices.

A ``DQMatrix`` holds its standard and infinitesimal parts as two quaternion
matrices, ``A = A_st + A_in eps``.  Values are treated as immutable: every
operation returns a new matrix.
"""
from __future__ import annotations

import numpy as np

from ._qkernels import quat_complement
from ._qmatrix import QMat
from .errors import DimensionMismatch, NotSquare
from .scalar import DEFAULT_TOL, DualNumber, DualQuaternion, Quaternion, ToleranceConfig


class DQMatrix:
    __slots__ = ("st", "inn")

    def __init__(self, st: QMat, inn: QMat | None = None):
        if inn is None:
            inn = QMat.zeros(*st.shape)
        if st.shape != inn.shape:
            raise DimensionMismatch(f"part shapes differ: {st.shape} vs {inn.shape}")
        self.st = st
        self.inn = inn

    # construction ---------------------------------------------------------
    @classmethod
    def zeros(cls, m: int, n: int) -> "DQMatrix":
        return cls(QMat.zeros(m, n), QMat.zeros(m, n))

    @classmethod
    def eye(cls, n: int, m: int | None = None) -> "DQMatrix":
        m = n if m is None else m
        return cls(QMat.eye(n, m), QMat.zeros(n, m))

    @classmethod
    def from_array(cls, arr) -> "DQMatrix":
        """Build from an (m, n, 8) real array: (w x y z) standard then infinitesimal."""
        arr = np.asarray(arr, dtype=float)
        if arr.ndim != 3 or arr.shape[2] != 8:
            raise DimensionMismatch(f"expected an (m, n, 8) array, got {arr.shape}")
        return cls(QMat.from_components(arr[..., :4]), QMat.from_components(arr[..., 4:]))

    @classmethod
    def from_entries(cls, rows) -> "DQMatrix":
        """Build from nested lists of DualQuaternion / Quaternion / real entries."""
        m = len(rows)
        n = len(rows[0]) if m else 0
        arr = np.zeros((m, n, 8))
        for i, row in enumerate(rows):
            if len(row) != n:
                raise DimensionMismatch("ragged rows")
            for j, x in enumerate(row):
                arr[i, j] = DualQuaternion.of(x).as_tuple()
        return cls.from_array(arr)

    @classmethod
    def real(cls, st, inn=None) -> "DQMatrix":
        st = QMat.real(st)
        return cls(st, QMat.real(inn) if inn is not None else QMat.zeros(*st.shape))

    @classmethod
    def block(cls, rows) -> "DQMatrix":
        return cls(QMat.block([[b.st for b in r] for r in rows]),
                   QMat.block([[b.inn for b in r] for r in rows]))

    @classmethod
    def hstack(cls, mats) -> "DQMatrix":
        return cls(QMat.hstack([m.st for m in mats]), QMat.hstack([m.inn for m in mats]))

    @classmethod
    def vstack(cls, mats) -> "DQMatrix":
        return cls(QMat.vstack([m.st for m in mats]), QMat.vstack([m.inn for m in mats]))

    @classmethod
    def blkdiag(cls, *mats) -> "DQMatrix":
        return cls(QMat.blkdiag(*[m.st for m in mats]), QMat.blkdiag(*[m.inn for m in mats]))

    @classmethod
    def diag(cls, values, m: int | None = None, n: int | None = None) -> "DQMatrix":
        """Real dual diagonal matrix padded with zeros to m×n."""
        values = [DualNumber.of(v) for v in values]
        k = len(values)
        m = k if m is None else m
        n = k if n is None else n
        st = np.zeros((m, n))
        inn = np.zeros((m, n))
        for i, v in enumerate(values):
            st[i, i] = v.standard
            inn[i, i] = v.infinitesimal
        return cls.real(st, inn)

    # views ------------------------------------------------------------------
    @property
    def shape(self):
        return self.st.shape

    @property
    def rows(self) -> int:
        return self.st.shape[0]

    @property
    def cols(self) -> int:
        return self.st.shape[1]

    def standard_part(self) -> QMat:
        return self.st.copy()

    def infinitesimal_part(self) -> QMat:
        return self.inn.copy()

    def to_array(self) -> np.ndarray:
        return np.concatenate([self.st.components(), self.inn.components()], axis=-1)

    def entry(self, i: int, j: int) -> DualQuaternion:
        c = self.to_array()[i, j]
        return DualQuaternion(Quaternion(*c[:4]), Quaternion(*c[4:]))

    def __getitem__(self, idx) -> "DQMatrix":
        return DQMatrix(self.st[idx], self.inn[idx])

    def copy(self) -> "DQMatrix":
        return DQMatrix(self.st.copy(), self.inn.copy())

    # arithmetic -------------------------------------------------------------
    def __add__(self, o: "DQMatrix") -> "DQMatrix":
        _same_shape(self, o)
        return DQMatrix(self.st + o.st, self.inn + o.inn)

    def __sub__(self, o: "DQMatrix") -> "DQMatrix":
        _same_shape(self, o)
        return DQMatrix(self.st - o.st, self.inn - o.inn)

    def __neg__(self) -> "DQMatrix":
        return DQMatrix(-self.st, -self.inn)

    def __matmul__(self, o: "DQMatrix") -> "DQMatrix":
        return matmul(self, o)

    @property
    def H(self) -> "DQMatrix":
        return DQMatrix(self.st.H, self.inn.H)

    def scale_cols(self, values) -> "DQMatrix":
        """Right-multiply by a real dual diagonal matrix."""
        s = np.array([DualNumber.of(v).standard for v in values])
        t = np.array([DualNumber.of(v).infinitesimal for v in values])
        return DQMatrix(self.st.scale(s[None, :]), self.inn.scale(s[None, :]) + self.st.scale(t[None, :]))

    def scale_rows(self, values) -> "DQMatrix":
        """Left-multiply by a real dual diagonal matrix."""
        s = np.array([DualNumber.of(v).standard for v in values])
        t = np.array([DualNumber.of(v).infinitesimal for v in values])
        return DQMatrix(self.st.scale(s[:, None]), self.inn.scale(s[:, None]) + self.st.scale(t[:, None]))

    def is_infinitesimal(self, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
        return self.st.absmax() <= tol.appreciable_tol

    def __repr__(self):
        return f"DQMatrix(shape={self.shape})"


def _same_shape(A: DQMatrix, B: DQMatrix):
    if A.shape != B.shape:
        raise DimensionMismatch(f"shapes differ: {A.shape} vs {B.shape}")


def matmul(A: DQMatrix, B: DQMatrix) -> DQMatrix:
    if A.cols != B.rows:
        raise DimensionMismatch(f"cannot multiply {A.shape} by {B.shape}")
    return DQMatrix(A.st @ B.st, A.st @ B.inn + A.inn @ B.st)


def conj_transpose(A: DQMatrix) -> DQMatrix:
    return A.H


def inner_product(u: DQMatrix, v: DQMatrix) -> DualQuaternion:
    """<u, v> = v* u."""
    if u.rows != v.rows or u.cols != 1 or v.cols != 1:
        raise DimensionMismatch("inner product needs two column vectors of equal length")
    return matmul(v.H, u).entry(0, 0)


def vec_norm2(u: DQMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> DualNumber:
    """Dual 2-norm; an infinitesimal vector gets ``||u_in|| eps``."""
    if u.cols != 1:
        raise DimensionMismatch("vec_norm2 expects a column vector")
    return col_norms(u, tol)[0]


def col_norms(A: DQMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> list:
    ns = A.st.col_norms()
    ni = A.inn.col_norms()
    # Re(a_st* a_in) per column
    re = (A.st.a.conj() * A.inn.a).real.sum(axis=0) + (A.st.b.conj() * A.inn.b).real.sum(axis=0)
    out = []
    for j in range(A.cols):
        if ns[j] > tol.appreciable_tol:
            out.append(DualNumber(float(ns[j]), float(re[j] / ns[j])))
        else:
            out.append(DualNumber(0.0, float(ni[j])))
    return out


def max_residual(A: DQMatrix, B: DQMatrix):
    """Max entry magnitude of A - B, separately for both parts."""
    _same_shape(A, B)
    D = A - B
    return D.st.absmax(), D.inn.absmax()


def unitarity_residual(A: DQMatrix) -> float:
    m, n = A.shape
    r1 = max(max_residual(matmul(A.H, A), DQMatrix.eye(n)))
    if m != n:
        return r1
    return max(r1, max(max_residual(matmul(A, A.H), DQMatrix.eye(m))))


def is_unitary(A: DQMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    if A.rows != A.cols:
        raise NotSquare(f"unitarity needs a square matrix, got {A.shape}")
    return unitarity_residual(A) <= tol.residual_tol


def rank_and_arank(A: DQMatrix, tol: ToleranceConfig = DEFAULT_TOL):
    """(rank, arank) read off the dual singular values."""
    from .factor_svd import dqsvd

    f = dqsvd(A, tol)
    return f.rank, f.arank


def complete_unitary(Q1: DQMatrix) -> DQMatrix:
    """Extra columns Y so that [Q1, Y] is unitary (Q1 must have orthonormal columns)."""
    m, k = Q1.shape
    Y0 = quat_complement(Q1.st)
    Y1 = Q1.st @ (Q1.inn.H @ Y0)
    return DQMatrix(Y0, -Y1)
