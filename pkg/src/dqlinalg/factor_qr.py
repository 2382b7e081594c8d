"""Householder reflectors and the QR family for dual quaternion matrices."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._qmatrix import QMat
from .dense import DQMatrix, col_norms, matmul, max_residual
from .errors import DimensionMismatch, ZeroMatrix, ZeroVector
from .scalar import DEFAULT_TOL, DualNumber, DualQuaternion, Quaternion, ToleranceConfig, dn_cmp, dn_inv


@dataclass
class Householder:
    """Reflector ``H = I - 2 v v*`` with a unit dual quaternion vector v."""

    v: DQMatrix

    def as_matrix(self) -> DQMatrix:
        n = self.v.rows
        return DQMatrix.eye(n) - _scale2(matmul(self.v, self.v.H))

    def apply(self, M: DQMatrix) -> DQMatrix:
        """H @ M without forming H."""
        return M - _scale2(matmul(self.v, matmul(self.v.H, M)))


def _scale2(M: DQMatrix) -> DQMatrix:
    return DQMatrix(M.st.scale(2.0), M.inn.scale(2.0))


def _unit(a: complex, b: complex):
    n = np.sqrt(abs(a) ** 2 + abs(b) ** 2)
    return a / n, b / n


def _std_reflector(x: QMat):
    """Quaternion reflector vector for x (a nonzero column); returns (v, delta)."""
    a0, b0 = x.a[0, 0], x.b[0, 0]
    if abs(a0) ** 2 + abs(b0) ** 2 > 0:
        da, db = _unit(a0, b0)
    else:
        da, db = 1.0 + 0j, 0j
    nx = x.fro()
    w = x.copy()
    w.a[0, 0] += da * nx
    w.b[0, 0] += db * nx
    return w.scale(1.0 / w.fro()), (da, db)


def householder_annihilate(a: DQMatrix, tol: ToleranceConfig = DEFAULT_TOL):
    """Reflector H with ``H a = -delta ||a|| e1``.

    ``delta`` is the phase of the leading entry: of its standard part when
    that is appreciable, of its infinitesimal part when the leading entry is
    infinitesimal but nonzero, and 1 when it vanishes.  Returns
    ``(Householder, delta)``.
    """
    if a.cols != 1:
        raise DimensionMismatch("householder_annihilate expects a column vector")
    nst, nin = a.st.fro(), a.inn.fro()
    if nst == 0 and nin == 0:
        raise ZeroVector("cannot build a reflector for the zero vector")
    if nst <= tol.appreciable_tol:
        # infinitesimal vector: a quaternion reflector of the dual part does it
        v, (da, db) = _std_reflector(a.inn)
        delta = DualQuaternion(Quaternion(da.real, da.imag, db.real, db.imag))
        return Householder(DQMatrix(v, QMat.zeros(*v.shape))), delta

    norm = col_norms(a, tol)[0]
    a_st0 = (a.st.a[0, 0], a.st.b[0, 0])
    a_in0 = (a.inn.a[0, 0], a.inn.b[0, 0])
    m_st = np.sqrt(abs(a_st0[0]) ** 2 + abs(a_st0[1]) ** 2)
    m_in = np.sqrt(abs(a_in0[0]) ** 2 + abs(a_in0[1]) ** 2)
    if m_st > tol.appreciable_tol:
        # alpha/|alpha| as a dual quaternion
        st = np.array([a_st0[0], a_st0[1]])
        inn = np.array([a_in0[0], a_in0[1]])
        re = (np.conj(st) * inn).real.sum() / m_st  # infinitesimal part of |alpha|
        d_st = st / m_st
        d_in = inn / m_st - d_st * (re / m_st)
    elif m_in > 0:
        d_st = np.array([a_in0[0], a_in0[1]]) / m_in
        d_in = np.zeros(2, complex)
    else:
        d_st = np.array([1.0 + 0j, 0j])
        d_in = np.zeros(2, complex)
    delta_m = DQMatrix(QMat(d_st[:1], d_st[1:]), QMat(d_in[:1], d_in[1:]))
    shift = delta_m.scale_cols([norm])
    w = a.copy()
    w.st.a[0, 0] += shift.st.a[0, 0]
    w.st.b[0, 0] += shift.st.b[0, 0]
    w.inn.a[0, 0] += shift.inn.a[0, 0]
    w.inn.b[0, 0] += shift.inn.b[0, 0]
    wn = col_norms(w, tol)[0]
    v = w.scale_cols([dn_inv(wn, tol)])
    delta = DualQuaternion(Quaternion(d_st[0].real, d_st[0].imag, d_st[1].real, d_st[1].imag),
                           Quaternion(d_in[0].real, d_in[0].imag, d_in[1].real, d_in[1].imag))
    return Householder(v), delta


@dataclass
class QRFactorization:
    Q: DQMatrix
    R: DQMatrix
    perm: np.ndarray
    rank: int
    arank: int

    def permuted(self, A: DQMatrix) -> DQMatrix:
        return A[:, self.perm]

    def reconstruct(self) -> DQMatrix:
        """Q [R; 0] (equals A with permuted columns)."""
        m = self.Q.rows
        Rf = DQMatrix.vstack([self.R, DQMatrix.zeros(m - self.rank, self.R.cols)])
        return matmul(self.Q, Rf)

    def residual(self, A: DQMatrix):
        return max_residual(self.reconstruct(), self.permuted(A))


def _apply_step(Q: DQMatrix, R: DQMatrix, k: int, H: Householder):
    R = R.copy()
    sub = H.apply(R[k:, :])
    R.st[k:, :] = sub.st
    R.inn[k:, :] = sub.inn
    Qs = matmul(Q[:, k:], H.as_matrix())
    Q = Q.copy()
    Q.st[:, k:] = Qs.st
    Q.inn[:, k:] = Qs.inn
    return Q, R


def _set_leading(R: DQMatrix, k: int, delta: DualQuaternion, norm: DualNumber):
    # R[k, k] = -delta ||a||; entries below it are exactly zero
    s = delta.standard * (-norm.standard)
    t = delta.infinitesimal * (-norm.standard) + delta.standard * (-norm.infinitesimal)
    R.st.a[k, k], R.st.b[k, k] = s.w + 1j * s.x, s.y + 1j * s.z
    R.inn.a[k, k], R.inn.b[k, k] = t.w + 1j * t.x, t.y + 1j * t.z
    for P in (R.st, R.inn):
        P.a[k + 1:, k] = 0
        P.b[k + 1:, k] = 0


def _below_is_zero(R: DQMatrix, k: int) -> bool:
    # nothing to annihilate: keep the column (and Q) as they are
    sub = R[k + 1:, k]
    return sub.st.absmax() == 0 and sub.inn.absmax() == 0


def qr_pivoted(A: DQMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> QRFactorization:
    """Column-pivoted Householder QR: ``A[:, perm] = Q [R; 0]``.

    The pivot is the trailing column of largest dual norm in the total
    order, so rows with appreciable leading entries come first.
    """
    m, n = A.shape
    if A.st.absmax() <= tol.rank_tol and A.inn.absmax() <= tol.rank_tol:
        raise ZeroMatrix("qr_pivoted needs a nonzero matrix")
    R = A.copy()
    Q = DQMatrix.eye(m)
    perm = np.arange(n)
    r = 0
    for k in range(min(m, n)):
        norms = col_norms(R[k:, k:], tol)
        best = 0
        for j in range(1, len(norms)):
            if dn_cmp(norms[j], norms[best]) > 0:
                best = j
        nb = norms[best]
        if nb.standard <= tol.rank_tol and abs(nb.infinitesimal) <= tol.rank_tol:
            break
        j = k + best
        if j != k:
            idx = np.arange(n)
            idx[k], idx[j] = j, k
            R = R[:, idx]
            perm = perm[idx]
        if not _below_is_zero(R, k):
            H, delta = householder_annihilate(R[k:, k], tol)
            Q, R = _apply_step(Q, R, k, H)
            _set_leading(R, k, delta, nb)
        r = k + 1
    R = R[:r, :]
    lead_st = np.array([np.hypot(abs(R.st.a[i, i]), abs(R.st.b[i, i])) for i in range(r)])
    arank = int(np.sum(lead_st > tol.rank_tol))
    return QRFactorization(Q, R, perm, r, arank)


def qr(A: DQMatrix, tol: ToleranceConfig = DEFAULT_TOL):
    """Unpivoted Householder QR ``A = Q R`` with Q unitary, R upper trapezoidal."""
    m, n = A.shape
    R = A.copy()
    Q = DQMatrix.eye(m)
    for k in range(min(m - 1, n)):
        a = R[k:, k]
        if _below_is_zero(R, k):
            continue
        H, delta = householder_annihilate(a, tol)
        Q, R = _apply_step(Q, R, k, H)
        _set_leading(R, k, delta, col_norms(a, tol)[0])
    return Q, R


def _unpermute(R: DQMatrix, perm: np.ndarray) -> DQMatrix:
    G = DQMatrix.zeros(*R.shape)
    for P, S in ((G.st, R.st), (G.inn, R.inn)):
        P.a[:, perm] = S.a
        P.b[:, perm] = S.b
    return G


def full_rank_decomposition(A: DQMatrix, tol: ToleranceConfig = DEFAULT_TOL):
    """A = F G with F (m×r) having orthonormal columns and G (r×n) of full row rank."""
    f = qr_pivoted(A, tol)
    return f.Q[:, :f.rank], _unpermute(f.R, f.perm)


def unitary_decomposition(A: DQMatrix, tol: ToleranceConfig = DEFAULT_TOL):
    """A = Q1 Rt with Q1* Q1 = I_r (same factors as the full-rank decomposition)."""
    f = qr_pivoted(A, tol)
    return f.Q[:, :f.rank], _unpermute(f.R, f.perm)
