"""Quotient-type generalized SVDs of a dual quaternion matrix pair (A, B)."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._qkernels import quat_svd_raw
from ._qmatrix import QMat
from .dense import DQMatrix, matmul, max_residual
from .errors import DimensionMismatch, ZeroPencil
from .factor_cs import _classify, cs_decompose_2x1, weak_orth_triangularize
from .factor_svd import dqsvd
from .scalar import DEFAULT_TOL, DualNumber, ToleranceConfig, dn_inv, dn_mul, dn_sqrt


def _stack_pair(A: DQMatrix, B: DQMatrix, tol: ToleranceConfig):
    if A.cols != B.cols:
        raise DimensionMismatch(f"A has {A.cols} columns, B has {B.cols}")
    C = DQMatrix.vstack([A, B])
    if max(C.st.absmax(), C.inn.absmax()) <= tol.rank_tol:
        raise ZeroPencil("both matrices are zero")
    return C, dqsvd(C, tol)


def _pad_cols(M: DQMatrix, n: int) -> DQMatrix:
    return DQMatrix.hstack([M, DQMatrix.zeros(M.rows, n - M.cols)])


def _rename_q(cs_blocks: dict) -> dict:
    # the CS count of unit cosines is called q here; p is the row count of B
    out = dict(cs_blocks)
    out["q"] = out.pop("p")
    return out


def _pairing_residual(C, S) -> float:
    worst = 0.0
    for c, s in zip(C, S):
        v = dn_mul(c, c) + dn_mul(s, s) - DualNumber(1.0)
        worst = max(worst, abs(v.standard), abs(v.infinitesimal))
    return worst


@dataclass
class GSVD1Factorization:
    U: DQMatrix
    V: DQMatrix
    X: DQMatrix
    SigmaA: DQMatrix
    SigmaB: DQMatrix
    SA: list
    SB: list
    sigma_C: list
    blocks: dict = field(default_factory=dict)
    form: int = 1
    X_singular: bool = False
    NA: DQMatrix | None = None
    NB: DQMatrix | None = None
    X_inv: DQMatrix | None = None

    def middle_A(self) -> DQMatrix:
        if self.form == 1:
            return self.SigmaA
        t, s = self.blocks["t"], self.blocks["s"]
        eps_NA = DQMatrix(self.NA.st.scale(0.0), self.NA.st)
        n = self.X.cols
        return _pad_cols(DQMatrix.hstack([self.SigmaA[:, :t], eps_NA]), n)

    def middle_B(self) -> DQMatrix:
        if self.form == 1:
            return self.SigmaB
        t = self.blocks["t"]
        eps_NB = DQMatrix(self.NB.st.scale(0.0), self.NB.st)
        return _pad_cols(DQMatrix.hstack([self.SigmaB[:, :t], eps_NB]), self.X.cols)

    def reconstruct(self):
        return (matmul(matmul(self.U, self.middle_A()), self.X),
                matmul(matmul(self.V, self.middle_B()), self.X))

    def residuals(self, A: DQMatrix, B: DQMatrix):
        RA, RB = self.reconstruct()
        return max_residual(RA, A), max_residual(RB, B)

    def pairing_residual(self) -> float:
        return _pairing_residual(self.SA, self.SB)


def dqgsvd1_cs(A: DQMatrix, B: DQMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> GSVD1Factorization:
    """``A = U (SigmaA, 0) X``, ``B = V (SigmaB, 0) X`` with unitary U, V.

    X may be singular when [A; B] has infinitesimal singular values; this is
    reported through ``X_singular`` rather than raised.
    """
    m, n = A.shape
    C, f = _stack_pair(A, B, tol)
    k = f.rank
    cs = cs_decompose_2x1(f.U[:, :k], m, tol, check=False)
    sig = f.sigma[:k]
    WS = cs.V1.H.scale_cols(sig)
    X = matmul(DQMatrix.blkdiag(WS, DQMatrix.eye(n - k)), f.V.H)
    SA = _pad_cols(cs.middle[:m, :], n)
    SB = _pad_cols(cs.middle[m:, :], n)
    blocks = _rename_q(cs.blocks)
    blocks.update(k=k, arank=f.arank, m=m, p=B.rows, n=n)
    return GSVD1Factorization(
        U=cs.U1, V=cs.U2, X=X, SigmaA=SA, SigmaB=SB, SA=list(cs.C), SB=list(cs.S),
        sigma_C=list(f.sigma), blocks=blocks, form=1, X_singular=f.arank < k,
    )


def dqgsvd1_regular(A: DQMatrix, B: DQMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> GSVD1Factorization:
    """``A = U (SigmaA, NA eps, 0) Xhat``, ``B = V (SigmaB, NB eps, 0) Xhat`` with Xhat nonsingular.

    The infinitesimal singular values of [A; B] are kept out of the CS step;
    their left vectors give the coupling blocks NA, NB, whose stack has
    orthonormal columns.
    """
    m, n = A.shape
    C, f = _stack_pair(A, B, tol)
    k, t = f.rank, f.arank
    s = k - t
    P = f.U
    cs = cs_decompose_2x1(P[:, :t], m, tol, check=False)
    sig_t = f.sigma[:t]
    sig_s = [x.infinitesimal for x in f.sigma[t:k]]
    WS = cs.V1.H.scale_cols(sig_t)
    Xhat = matmul(DQMatrix.blkdiag(WS, DQMatrix.diag(sig_s), DQMatrix.eye(n - k)), f.V.H)
    Winv = cs.V1.scale_rows([dn_inv(x, tol) for x in sig_t])
    Xinv = matmul(f.V, DQMatrix.blkdiag(Winv, DQMatrix.diag([1.0 / x for x in sig_s]),
                                        DQMatrix.eye(n - k)))
    NA = matmul(cs.U1.H, P[:m, t:k])
    NB = matmul(cs.U2.H, P[m:, t:k])
    # only the standard parts of NA, NB matter (they are multiplied by eps)
    NA, NB = DQMatrix(NA.st), DQMatrix(NB.st)
    SA = _pad_cols(cs.middle[:m, :], n)
    SB = _pad_cols(cs.middle[m:, :], n)
    blocks = _rename_q(cs.blocks)
    blocks["t_inf"] = blocks.pop("t")
    blocks.update(k=k, t=t, s=s, m=m, p=B.rows, n=n)
    return GSVD1Factorization(
        U=cs.U1, V=cs.U2, X=Xhat, SigmaA=SA, SigmaB=SB, SA=list(cs.C), SB=list(cs.S),
        sigma_C=list(f.sigma), blocks=blocks, form=2, NA=NA, NB=NB, X_inv=Xinv,
    )


def structured_solve_residual(g: GSVD1Factorization) -> float:
    """max |Xhat Xhat^-1 - I| over both parts, using the factored inverse."""
    n = g.X.rows
    return max(max(max_residual(matmul(g.X, g.X_inv), DQMatrix.eye(n))),
               max(max_residual(matmul(g.X_inv, g.X), DQMatrix.eye(n))))


@dataclass
class GSVD2Factorization:
    U: DQMatrix
    V: DQMatrix
    X: DQMatrix
    SigmaA: DQMatrix
    SigmaB: DQMatrix
    SA: list
    SB: list
    blocks: dict = field(default_factory=dict)

    def residuals(self, A: DQMatrix, B: DQMatrix):
        ra = max_residual(matmul(matmul(self.U.H, A), self.X), self.SigmaA)
        rb = max_residual(matmul(matmul(self.V.H, B), self.X), self.SigmaB)
        return ra, rb

    def pairing_residual(self) -> float:
        return _pairing_residual(self.SA, self.SB)


def dqgsvd2(A: DQMatrix, B: DQMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> GSVD2Factorization:
    """``U* A X = (SigmaA, 0)``, ``V* B X = (SigmaB, 0)``.

    The infinitesimal part of the common column space is dropped from X (its
    columns are zero), so the pairs come only from the appreciable part.
    """
    m, n = A.shape
    p = B.rows
    C, f = _stack_pair(A, B, tol)
    k, t = f.rank, f.arank
    Q1 = f.V[:, :t]
    inv_t = [dn_inv(x, tol) for x in f.sigma[:t]]
    Q1S = Q1.scale_cols(inv_t)
    A1 = matmul(A, Q1S)
    B1 = matmul(B, Q1S)

    fa = dqsvd(A1, tol)
    sa = list(fa.sigma) + [DualNumber(0.0)] * (t - len(fa.sigma))
    q1, l, d, z = _classify(sa, tol)
    d11 = [DualNumber(1.0)] * q1 + sa[q1:q1 + l + d] + [DualNumber(0.0)] * z
    theta = [dn_sqrt(DualNumber(1.0) - dn_mul(c, c), tol) for c in sa[q1:q1 + l]]
    theta += [DualNumber(1.0)] * (d + z)

    pre = weak_orth_triangularize(matmul(B1, fa.V), q1, tol, check=False)
    a = p - (t - q1)
    Ph, sv, Qh = quat_svd_raw(pre.T)
    sv = np.where(sv > tol.rank_tol, sv, 0.0)
    r = int(np.sum(sv > 0))
    Qd = DQMatrix(Qh) if q1 else DQMatrix.zeros(0, 0)
    Pd = DQMatrix(Ph) if a else DQMatrix.zeros(0, 0)
    U = matmul(fa.U, DQMatrix.blkdiag(Qd, DQMatrix.eye(m - q1)))
    V = matmul(pre.U1, DQMatrix.blkdiag(Pd, DQMatrix.eye(t - q1)))
    Wq = matmul(fa.V, DQMatrix.blkdiag(Qd, DQMatrix.eye(t - q1)))

    X = DQMatrix.hstack([matmul(Q1S, Wq), DQMatrix.zeros(n, k - t), f.V[:, k:]])

    SigA = _pad_cols(DQMatrix.diag(d11[:min(m, t)], m, t), n)
    sig_blk = np.zeros((a, q1))
    sig_blk[:r, :r] = np.diag(sv[:r])
    SigB = _pad_cols(DQMatrix.block([
        [DQMatrix(QMat.zeros(a, q1), QMat.real(sig_blk)), DQMatrix.zeros(a, t - q1)],
        [DQMatrix.zeros(t - q1, q1), DQMatrix.diag(theta)],
    ]), n)
    blocks = dict(r=q1, r1=r, l=l, t_inf=d, z=z, a=a, k=k, t=t, s=k - t, m=m, p=p, n=n)
    return GSVD2Factorization(U=U, V=V, X=X, SigmaA=SigA, SigmaB=SigB,
                              SA=sa[q1:q1 + l], SB=theta[:l], blocks=blocks)
