"""Weak-orthogonal triangularization and CS decompositions of unitary blocks."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._qkernels import quat_svd_raw
from ._qmatrix import QMat
from .dense import DQMatrix, col_norms, complete_unitary, matmul, max_residual, unitarity_residual
from .errors import DimensionMismatch, NotIsometry, NotUnitary, PreconditionViolated
from .factor_svd import dqsvd
from .scalar import DEFAULT_TOL, DualNumber, ToleranceConfig, dn_inv, dn_mul, dn_sqrt


@dataclass
class PreCSResult:
    U1: DQMatrix
    T: QMat
    Theta: list
    s: int
    t: int

    def middle(self) -> DQMatrix:
        m = self.U1.rows
        top = DQMatrix(QMat.zeros(m - self.t, self.s), self.T)
        return DQMatrix.block([
            [top, DQMatrix.zeros(m - self.t, self.t)],
            [DQMatrix.zeros(self.t, self.s), DQMatrix.diag(self.Theta)],
        ])


def weak_orth_triangularize(A: DQMatrix, s: int, tol: ToleranceConfig = DEFAULT_TOL,
                            check: bool = True) -> PreCSResult:
    """Unitary U1 with ``U1* A = [[T eps, 0], [0, diag(Theta)]]``.

    Requires ``A* A = diag(0_s, Delta)`` with Delta appreciable, i.e. the
    first s columns are infinitesimal and the trailing ones are mutually
    orthogonal with appreciable norms.
    """
    m, k = A.shape
    if not 0 <= s <= k:
        raise DimensionMismatch(f"s={s} out of range for {k} columns")
    t = k - s
    if t > m:
        raise PreconditionViolated("more appreciable columns than rows")
    At = A[:, s:]
    h = col_norms(At, tol)
    if check:
        G = matmul(A.H, A)
        target = DQMatrix.diag([DualNumber(0.0)] * s + [dn_mul(x, x) for x in h])
        res = max(max_residual(G, target))
        if res > tol.residual_tol or A[:, :s].st.absmax() > tol.residual_tol:
            raise PreconditionViolated(f"A*A is not of the form diag(0, Delta) (residual {res:.3g})")
        if any(x.standard <= tol.appreciable_tol for x in h):
            raise PreconditionViolated("trailing columns must be appreciable")
    U2hat = At.scale_cols([dn_inv(x, tol) for x in h]) if t else DQMatrix.zeros(m, 0)
    Y = complete_unitary(U2hat)
    U1 = DQMatrix.hstack([Y, U2hat])
    T = Y.st.H @ A.inn[:, :s]
    return PreCSResult(U1, T, list(h), s, t)


@dataclass
class CSFactorization:
    U1: DQMatrix
    U2: DQMatrix
    V1: DQMatrix
    V2: DQMatrix | None
    middle: DQMatrix
    r1: int
    t1: int
    blocks: dict = field(default_factory=dict)
    C: list = field(default_factory=list)
    S: list = field(default_factory=list)
    Sigma: np.ndarray = field(default_factory=lambda: np.zeros(0))
    D: np.ndarray = field(default_factory=lambda: np.zeros(0))
    D11: list = field(default_factory=list)

    def left(self) -> DQMatrix:
        return DQMatrix.blkdiag(self.U1, self.U2)

    def right(self) -> DQMatrix:
        return self.V1 if self.V2 is None else DQMatrix.blkdiag(self.V1, self.V2)

    def reconstruct(self) -> DQMatrix:
        return matmul(matmul(self.left(), self.middle), self.right().H)

    def residual(self, W: DQMatrix):
        """Max residual of diag(U1, U2)* W diag(V1, V2) against the middle."""
        return max_residual(matmul(matmul(self.left().H, W), self.right()), self.middle)

    def pythagoras_residual(self) -> float:
        worst = 0.0
        for c, s in zip(self.C, self.S):
            v = dn_mul(c, c) + dn_mul(s, s) - DualNumber(1.0)
            worst = max(worst, abs(v.standard), abs(v.infinitesimal))
        return worst


def _classify(sigma, tol: ToleranceConfig):
    """Counts of the classes {1, appreciable < 1, infinitesimal, zero} (in order)."""
    p = l = d = 0
    for x in sigma:
        if x.standard >= 1.0 - tol.rank_tol:
            p += 1
        elif x.standard > tol.rank_tol:
            l += 1
        elif x.infinitesimal > tol.rank_tol:
            d += 1
    return p, l, d, len(sigma) - p - l - d


def cs_decompose_2x1(W: DQMatrix, r1: int, tol: ToleranceConfig = DEFAULT_TOL,
                     check: bool = True) -> CSFactorization:
    """CS decomposition of a matrix with orthonormal columns split after row r1.

    ``W = diag(U1, U2) [D11; D21] V1*`` where D11 carries (I, C, D eps, 0)
    and D21 carries (Sigma eps, S, I) on matching columns.
    """
    n, t1 = W.shape
    if not 0 <= r1 <= n:
        raise DimensionMismatch(f"row split {r1} out of range for {n} rows")
    r2 = n - r1
    if check:
        res = max(max_residual(matmul(W.H, W), DQMatrix.eye(t1)))
        if res > tol.residual_tol:
            raise NotIsometry(f"columns are not orthonormal (residual {res:.3g})")
    W11, W21 = W[:r1, :], W[r1:, :]
    f = dqsvd(W11, tol)
    sig = list(f.sigma) + [DualNumber(0.0)] * (t1 - len(f.sigma))
    p, l, d, z = _classify(sig, tol)
    # exact structural values for the middle
    d11 = [DualNumber(1.0)] * p + sig[p:p + l + d] + [DualNumber(0.0)] * z
    theta = [dn_sqrt(DualNumber(1.0) - dn_mul(c, c), tol) for c in sig[p:p + l]]
    theta += [DualNumber(1.0)] * (d + z)

    W21v = matmul(W21, f.V)
    pre = weak_orth_triangularize(W21v, p, tol, check=False)
    a = r2 - (t1 - p)
    P, sv, Qm = quat_svd_raw(pre.T)
    sv = np.where(sv > tol.rank_tol, sv, 0.0)
    r = int(np.sum(sv > 0))

    Qd = DQMatrix(Qm) if p else DQMatrix.zeros(0, 0)
    Pd = DQMatrix(P) if a else DQMatrix.zeros(0, 0)
    U1 = matmul(f.U, DQMatrix.blkdiag(Qd, DQMatrix.eye(r1 - p)))
    V1 = matmul(f.V, DQMatrix.blkdiag(Qd, DQMatrix.eye(t1 - p)))
    U2 = matmul(pre.U1, DQMatrix.blkdiag(Pd, DQMatrix.eye(t1 - p)))

    D11 = DQMatrix.diag(d11[:min(r1, t1)], r1, t1)
    sig_blk = np.zeros((a, p))
    sig_blk[:r, :r] = np.diag(sv[:r])
    D21 = DQMatrix.block([
        [DQMatrix(QMat.zeros(a, p), QMat.real(sig_blk)), DQMatrix.zeros(a, t1 - p)],
        [DQMatrix.zeros(t1 - p, p), DQMatrix.diag(theta)],
    ])
    middle = DQMatrix.vstack([D11, D21])
    blocks = dict(p=p, r=r, l=l, t=d, z=z, a=a, r2=r2)
    return CSFactorization(
        U1=U1, U2=U2, V1=V1, V2=None, middle=middle, r1=r1, t1=t1, blocks=blocks,
        C=sig[p:p + l], S=theta[:l], Sigma=sv[:r],
        D=np.array([x.infinitesimal for x in sig[p + l:p + l + d]]), D11=d11,
    )


def _complement_middle(cs: CSFactorization) -> DQMatrix:
    """Structured columns completing the 2x1 middle to a unitary matrix."""
    b = cs.blocks
    r1, t1 = cs.r1, cs.t1
    p, r, l, d, z, a, r2 = b["p"], b["r"], b["l"], b["t"], b["z"], b["a"], b["r2"]
    n = r1 + r2
    cols = []

    def col():
        return np.zeros(n), np.zeros(n)

    for i in range(a):
        st, inn = col()
        st[r1 + i] = -1.0
        if i < r:
            inn[i] = cs.Sigma[i]
        cols.append((st, inn))
    base = r1 + a
    for j in range(p, p + l):
        c, s = cs.D11[j], cs.S[j - p]
        st, inn = col()
        st[j], inn[j] = s.standard, s.infinitesimal
        st[base + j - p], inn[base + j - p] = -c.standard, -c.infinitesimal
        cols.append((st, inn))
    for j in range(p + l, p + l + d):
        st, inn = col()
        st[j] = 1.0
        inn[base + j - p] = -cs.D11[j].infinitesimal
        cols.append((st, inn))
    for j in range(p + l + d, min(r1, t1)):
        st, inn = col()
        st[j] = 1.0
        cols.append((st, inn))
    for j in range(t1, r1):
        st, inn = col()
        st[j] = 1.0
        cols.append((st, inn))
    if not cols:
        return DQMatrix.zeros(n, 0)
    return DQMatrix.real(np.array([c[0] for c in cols]).T, np.array([c[1] for c in cols]).T)


def cs_decompose_2x2(W: DQMatrix, r1: int, t1: int, tol: ToleranceConfig = DEFAULT_TOL) -> CSFactorization:
    """CS decomposition of a unitary matrix split r1|r2 by rows and t1|t2 by columns."""
    n = W.rows
    if W.cols != n:
        raise NotUnitary(f"expected a square matrix, got {W.shape}")
    if not (0 <= r1 <= n and 0 <= t1 <= n):
        raise DimensionMismatch("split out of range")
    res = unitarity_residual(W)
    if res > tol.residual_tol:
        raise NotUnitary(f"matrix is not unitary (residual {res:.3g})")
    cs = cs_decompose_2x1(W[:, :t1], r1, tol, check=False)
    target = _complement_middle(cs)
    Y = matmul(cs.left().H, W[:, t1:])
    cs.V2 = matmul(Y.H, target)
    cs.middle = DQMatrix.hstack([cs.middle, target])
    return cs
