"""Product-type SVD, SVD of a product, and canonical correlation decomposition."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._qkernels import quat_svd_raw
from ._qmatrix import QMat
from .dense import DQMatrix, complete_unitary, matmul, max_residual
from .errors import DimensionMismatch, ZeroPencil
from .factor_cs import cs_decompose_2x1
from .factor_gsvd import dqgsvd1_regular
from .factor_qr import qr_pivoted, _unpermute
from .factor_svd import DQSVDFactorization, dqsvd
from .scalar import DEFAULT_TOL, DualNumber, ToleranceConfig, dn_inv


@dataclass
class PrePSVDResult:
    T: DQMatrix
    SigmaB: DQMatrix
    Y: DQMatrix
    T_inv: DQMatrix
    Y_inv: DQMatrix
    blocks: dict
    sigma1: list
    F: QMat  # standard parts of the rows that get multiplied by eps in a product
    W: DQMatrix  # right singular vectors of the first row block

    def reconstruct(self) -> DQMatrix:
        return matmul(matmul(self.T, self.SigmaB), self.Y)


def _block_lower_inverse(T1, T21, T31, U1, U2) -> DQMatrix:
    """Inverse of [[T1, 0, 0], [T21, U1, 0], [T31, 0, U2]] with unitary diagonal blocks."""
    T1i = T1.H
    return DQMatrix.block([
        [T1i, DQMatrix.zeros(T1.rows, U1.cols), DQMatrix.zeros(T1.rows, U2.cols)],
        [-matmul(matmul(U1.H, T21), T1i), U1.H, DQMatrix.zeros(U1.rows, U2.cols)],
        [-matmul(matmul(U2.H, T31), T1i), DQMatrix.zeros(U2.rows, U1.cols), U2.H],
    ])


def pre_psvd(B: DQMatrix, r1: int, r2: int, tol: ToleranceConfig = DEFAULT_TOL) -> PrePSVDResult:
    """``B = T SigmaB Y`` for a matrix whose rows are split r1 | r2 | rest.

    T is block lower triangular with unitary diagonal blocks; the first
    block row is the DQSVD of B1, and the remaining rows are handled by a
    regular quotient GSVD of the pair (B2, B3) restricted to the
    complement of the appreciable right singular vectors of B1.
    """
    n, p = B.shape
    r3 = n - r1 - r2
    if r1 < 0 or r2 < 0 or r3 < 0:
        raise DimensionMismatch(f"row split ({r1}, {r2}) does not fit {n} rows")
    B1, B2, B3 = B[:r1, :], B[r1:r1 + r2, :], B[r1 + r2:, :]
    f = dqsvd(B1, tol)
    r11, r12 = f.arank, f.rank - f.arank
    W = f.V
    W11, Wr = W[:, :r11], W[:, r11:]
    inv1 = [dn_inv(x, tol) for x in f.sigma[:r11]]
    T21 = DQMatrix.hstack([matmul(B2, W11).scale_cols(inv1), DQMatrix.zeros(r2, r1 - r11)])
    T31 = DQMatrix.hstack([matmul(B3, W11).scale_cols(inv1), DQMatrix.zeros(r3, r1 - r11)])

    pr = p - r11
    B2r, B3r = matmul(B2, Wr), matmul(B3, Wr)
    g = None
    if pr and (r2 + r3):
        try:
            g = dqgsvd1_regular(B2r, B3r, tol)
        except ZeroPencil:
            g = None
    if g is not None:
        U1, U2, G, Ginv = g.U, g.V, g.X, g.X_inv
        M2, M3 = g.middle_A(), g.middle_B()
        gblocks = g.blocks
    else:
        U1, U2, G, Ginv = DQMatrix.eye(r2), DQMatrix.eye(r3), DQMatrix.eye(pr), DQMatrix.eye(pr)
        M2, M3 = DQMatrix.zeros(r2, pr), DQMatrix.zeros(r3, pr)
        gblocks = {}

    # D1 = diag(Sigma1, Sigma_hat eps, 0); its trailing block absorbs G^-1
    D1 = f.middle()
    Dsub = D1[r11:, r11:]
    top = DQMatrix.block([
        [D1[:r11, :r11], DQMatrix.zeros(r11, pr)],
        [DQMatrix.zeros(r1 - r11, r11), matmul(Dsub, Ginv)],
    ])
    SigmaB = DQMatrix.vstack([
        top,
        DQMatrix.hstack([DQMatrix.zeros(r2, r11), M2]),
        DQMatrix.hstack([DQMatrix.zeros(r3, r11), M3]),
    ])
    T = DQMatrix.block([
        [f.U, DQMatrix.zeros(r1, r2), DQMatrix.zeros(r1, r3)],
        [T21, U1, DQMatrix.zeros(r2, r3)],
        [T31, DQMatrix.zeros(r3, r2), U2],
    ])
    T_inv = _block_lower_inverse(f.U, T21, T31, U1, U2)
    Y = matmul(DQMatrix.blkdiag(DQMatrix.eye(r11), G), W.H)
    Y_inv = matmul(W, DQMatrix.blkdiag(DQMatrix.eye(r11), Ginv))

    # eps-graded rows of the product: [diag(Sigma_hat, 0); (M2 G)_st]
    F_top = QMat.real(np.diag([x.infinitesimal for x in f.sigma[r11:r11 + r12]]))
    F_top = QMat.block([[F_top, QMat.zeros(r12, pr - r12)],
                        [QMat.zeros(r1 - r11 - r12, r12), QMat.zeros(r1 - r11 - r12, pr - r12)]])
    F = QMat.vstack([F_top, matmul(M2, G).st])
    blocks = dict(r1=r1, r2=r2, r3=r3, r11=r11, r12=r12, p=p, **{f"g_{k}": v for k, v in gblocks.items()})
    return PrePSVDResult(T, SigmaB, Y, T_inv, Y_inv, blocks, list(f.sigma[:r11]), F, W)


@dataclass
class PSVDFactorization:
    U: DQMatrix
    X: DQMatrix
    Y: DQMatrix
    DA: DQMatrix
    DB: DQMatrix
    X_inv: DQMatrix
    Y_inv: DQMatrix
    blocks: dict = field(default_factory=dict)
    pre: PrePSVDResult | None = field(default=None, repr=False)

    def residuals(self, A: DQMatrix, B: DQMatrix):
        RA = matmul(matmul(self.U, self.DA), self.X_inv)
        RB = matmul(matmul(self.X, self.DB), self.Y)
        return max_residual(RA, A), max_residual(RB, B)


def _split_A(A: DQMatrix, tol: ToleranceConfig):
    m, n = A.shape
    fa = dqsvd(A, tol)
    r1, r2 = fa.arank, fa.rank - fa.arank
    sig1 = fa.sigma[:r1]
    sig2 = [x.infinitesimal for x in fa.sigma[r1:r1 + r2]]
    Wt = fa.V
    Zd = DQMatrix.blkdiag(DQMatrix.diag(sig1), DQMatrix.diag(sig2), DQMatrix.eye(n - r1 - r2))
    Z = matmul(Zd, Wt.H)
    Zinv_d = DQMatrix.blkdiag(DQMatrix.diag([dn_inv(x, tol) for x in sig1]),
                              DQMatrix.diag([1.0 / x for x in sig2]), DQMatrix.eye(n - r1 - r2))
    Z_inv = matmul(Wt, Zinv_d)
    return fa, r1, r2, Z, Z_inv


def dqpsvd(A: DQMatrix, B: DQMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> PSVDFactorization:
    """``A = U DA X^-1`` and ``B = X DB Y`` with U unitary and X, Y nonsingular.

    ``DA = diag(I_r1, I_r2 eps, 0)``.  Writing ``A = U_A DA Z`` with Z
    nonsingular, the pre-decomposition ``Z B = T DB Y`` gives ``X = Z^-1 T``;
    the block lower triangular T is then pushed through DA by a unitary
    correction of U_A.
    """
    m, n = A.shape
    if B.rows != n:
        raise DimensionMismatch(f"A is {A.shape}, B is {B.shape}")
    fa, r1, r2, Z, Z_inv = _split_A(A, tol)
    pre = pre_psvd(matmul(Z, B), r1, r2, tol)
    T = pre.T
    X = matmul(Z_inv, T)
    X_inv = matmul(pre.T_inv, Z)

    T1 = T[:r1, :r1]
    T21 = T[r1:r1 + r2, :r1].st
    U1 = T[r1:r1 + r2, r1:r1 + r2].st
    top_mid = DQMatrix(QMat.zeros(r1, r2), -(T1.st @ (T21.H @ U1)))
    Qt = DQMatrix.block([
        [T1, top_mid, DQMatrix.zeros(r1, m - r1 - r2)],
        [DQMatrix(QMat.zeros(r2, r1), T21), DQMatrix(U1), DQMatrix.zeros(r2, m - r1 - r2)],
        [DQMatrix.zeros(m - r1 - r2, r1), DQMatrix.zeros(m - r1 - r2, r2), DQMatrix.eye(m - r1 - r2)],
    ])
    U = matmul(fa.U, Qt)
    DA = DQMatrix.diag([1.0] * r1 + [DualNumber(0.0, 1.0)] * r2, m, n)
    blocks = dict(pre.blocks, m=m, n=n, p=B.cols)
    return PSVDFactorization(U, X, pre.Y, DA, pre.SigmaB, X_inv, pre.Y_inv, blocks, pre)


def product_svd(A: DQMatrix, B: DQMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> DQSVDFactorization:
    """DQSVD of ``A B`` assembled from the product-type decomposition.

    The appreciable singular values are those of the top block of DB; the
    infinitesimal ones come from a quaternion SVD of the eps-graded rows.
    """
    m, n = A.shape
    p = B.cols
    ps = dqpsvd(A, B, tol)
    pre = ps.pre
    r11 = pre.blocks["r11"]
    Hh, s_ab, Nh = quat_svd_raw(pre.F)
    s_ab = np.where(s_ab > tol.rank_tol, s_ab, 0.0)
    nf = pre.F.shape[0]
    H = matmul(ps.U, DQMatrix.blkdiag(DQMatrix.eye(r11), DQMatrix(Hh), DQMatrix.eye(m - r11 - nf)))
    N = matmul(pre.W, DQMatrix.blkdiag(DQMatrix.eye(r11), DQMatrix(Nh)))
    sigma = list(pre.sigma1) + [DualNumber(0.0, float(x)) for x in s_ab]
    sigma = sigma[:min(m, p)] + [DualNumber(0.0)] * (min(m, p) - len(sigma))
    arank = r11
    rank = r11 + int(np.sum(s_ab > 0))
    return DQSVDFactorization(H, N, sigma, rank, arank)


@dataclass
class CCDFactorization:
    Q: DQMatrix
    XA: DQMatrix
    XB: DQMatrix
    SigmaA: DQMatrix
    SigmaB: DQMatrix
    regular: bool
    correlations: list
    blocks: dict = field(default_factory=dict)

    def residuals(self, A: DQMatrix, B: DQMatrix):
        RA = matmul(matmul(self.Q, self.SigmaA), self.XA)
        RB = matmul(matmul(self.Q, self.SigmaB), self.XB)
        return max_residual(RA, A), max_residual(RB, B)


def _square_R(f, n: int) -> DQMatrix:
    """[R; 0 I] with the column permutation undone (nonsingular when R is)."""
    r = f.rank
    ext = DQMatrix.zeros(n - r, n)
    for i in range(n - r):
        ext.st.a[i, r + i] = 1.0
    return _unpermute(DQMatrix.vstack([f.R, ext]), f.perm)


def dqccd(A: DQMatrix, B: DQMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> CCDFactorization:
    """``A = Q (SigmaA, 0) XA`` and ``B = Q (SigmaB, 0) XB`` with ``SigmaB = [I_q; 0]``.

    The cosine block of SigmaA holds the canonical correlations between the
    column spaces of A and B.  ``regular`` is False when either QR factor has
    rows with infinitesimal leading entries; the decomposition is still
    returned but the correlations lose their usual meaning.
    """
    m, n = A.shape
    l = B.cols
    if B.rows != m:
        raise DimensionMismatch(f"A has {m} rows, B has {B.rows}")
    fa = qr_pivoted(A, tol)
    fb = qr_pivoted(B, tol)
    pa, q = fa.rank, fb.rank
    QA = fa.Q[:, :pa]
    QB = fb.Q[:, :q]
    Q2 = DQMatrix.hstack([QB, complete_unitary(QB)])
    cs = cs_decompose_2x1(matmul(Q2.H, QA), q, tol, check=False)
    Q = matmul(Q2, cs.left())
    XA = matmul(DQMatrix.blkdiag(cs.V1.H, DQMatrix.eye(n - pa)), _square_R(fa, n))
    XB = matmul(DQMatrix.blkdiag(cs.U1.H, DQMatrix.eye(l - q)), _square_R(fb, l))
    SigmaA = DQMatrix.hstack([cs.middle, DQMatrix.zeros(m, n - pa)])
    SigmaB = DQMatrix.diag([1.0] * q, m, l)
    regular = fa.rank == fa.arank and fb.rank == fb.arank
    corr = cs.D11[:min(q, pa)]
    blocks = dict(cs.blocks, rank_A=pa, rank_B=q, arank_A=fa.arank, arank_B=fb.arank)
    return CCDFactorization(Q, XA, XB, SigmaA, SigmaB, regular, list(corr), blocks)
