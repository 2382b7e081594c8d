"""Quaternion SVD kernel and the dual quaternion SVD.

The dual SVD is built by first-order perturbation around the SVD of the
standard part:

* ``A_st = U0 S0 V0*`` (quaternion SVD);
* ``B = U0* A_in V0`` carries the infinitesimal part in that basis;
* inside each cluster of equal standard singular values the Hermitian part
  of the matching diagonal block of ``B`` is diagonalized, giving the
  infinitesimal parts of those singular values;
* the zero cluster is handled by a quaternion SVD of the trailing block of
  ``B`` (these become the purely infinitesimal singular values);
* the remaining off-diagonal entries of ``B`` are removed by anti-Hermitian
  corrections ``U = U0 (I + K eps)``, ``V = V0 (I + L eps)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._qkernels import normalize_phases, quat_eigh, quat_svd_raw
from ._qmatrix import QMat
from .dense import DQMatrix, matmul, max_residual
from .scalar import DEFAULT_TOL, DualNumber, ToleranceConfig


@dataclass
class QSVD:
    U: QMat
    S: np.ndarray
    V: QMat

    def reconstruct(self) -> QMat:
        m, n = self.U.shape[0], self.V.shape[0]
        D = np.zeros((m, n))
        k = len(self.S)
        D[:k, :k] = np.diag(self.S)
        return self.U @ QMat.real(D) @ self.V.H


def quat_svd(Q: QMat) -> QSVD:
    """Full SVD of a quaternion matrix with nonincreasing singular values."""
    U, S, V = quat_svd_raw(Q)
    return QSVD(U, S, V)


@dataclass
class DQSVDFactorization:
    U: DQMatrix
    V: DQMatrix
    sigma: list
    rank: int
    arank: int
    groups: list = field(default_factory=list)

    @property
    def shape(self):
        return self.U.rows, self.V.rows

    def middle(self) -> DQMatrix:
        m, n = self.shape
        return DQMatrix.diag(self.sigma, m, n)

    def reconstruct(self) -> DQMatrix:
        return matmul(matmul(self.U, self.middle()), self.V.H)

    def residual(self, A: DQMatrix):
        return max_residual(self.reconstruct(), A)

    @property
    def sigma_array(self) -> np.ndarray:
        return np.array([[s.standard, s.infinitesimal] for s in self.sigma]).reshape(-1, 2)


def _group(sig: np.ndarray, tol: float):
    out = []
    start = 0
    for i in range(1, len(sig) + 1):
        if i == len(sig) or sig[i - 1] - sig[i] > tol:
            out.append((start, i))
            start = i
    return out


def dqsvd(A: DQMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> DQSVDFactorization:
    """Dual quaternion SVD ``A = U diag(sigma) V*``.

    ``sigma`` holds the appreciable values first (nonincreasing in the total
    order), then the positive infinitesimal ones, then zeros.
    """
    m, n = A.shape
    kmin = min(m, n)
    if m == 0 or n == 0:
        return DQSVDFactorization(DQMatrix.eye(m), DQMatrix.eye(n), [], 0, 0)
    U0, s0, V0 = quat_svd_raw(A.st)
    s0 = np.where(s0 > tol.rank_tol, s0, 0.0)
    nz = int(np.sum(s0 > 0))
    gtol = tol.rank_tol * max(1.0, float(s0[0]))
    groups = _group(s0[:nz], gtol)
    sig = s0.copy()
    for lo, hi in groups:
        sig[lo:hi] = s0[lo:hi].mean()

    B = U0.H @ A.inn @ V0
    for lo, hi in groups:
        if hi - lo == 1:
            continue
        _, G = quat_eigh(B[lo:hi, lo:hi])
        U0[:, lo:hi] = U0[:, lo:hi] @ G
        V0[:, lo:hi] = V0[:, lo:hi] @ G

    sz = np.zeros(0)
    if m > nz and n > nz:
        Pz, sz, Qz = quat_svd_raw(B[nz:, nz:])
        U0[:, nz:] = U0[:, nz:] @ Pz
        V0[:, nz:] = V0[:, nz:] @ Qz
    sz = np.where(sz > tol.rank_tol, sz, 0.0)

    # deterministic phases: first significant entry of each left vector real >= 0
    U0, V0 = normalize_phases(U0, V0, kmin)

    B = U0.H @ A.inn @ V0
    K = QMat.zeros(m, m)
    L = QMat.zeros(n, n)
    gid = np.full(max(m, n), -1)
    for g, (lo, hi) in enumerate(groups):
        gid[lo:hi] = g

    Ba, Bb = B.a, B.b
    BHa, BHb = B.H.a, B.H.b  # (B*)_{ij} = conj(B_{ji})
    for i in range(nz):
        si = sig[i]
        for j in range(nz):
            if i == j and gid[i] < 0:
                continue
            sj = sig[j]
            if gid[i] == gid[j]:
                # anti-Hermitian part of the group block
                aa = (Ba[i, j] - BHa[i, j]) / 2
                ab = (Bb[i, j] - BHb[i, j]) / 2
                L.a[i, j], L.b[i, j] = -aa / (2 * si), -ab / (2 * si)
                K.a[i, j], K.b[i, j] = aa / (2 * si), ab / (2 * si)
            else:
                d = si * si - sj * sj
                L.a[i, j] = -(si * Ba[i, j] + sj * BHa[i, j]) / d
                L.b[i, j] = -(si * Bb[i, j] + sj * BHb[i, j]) / d
                K.a[i, j] = -(sj * Ba[i, j] + si * BHa[i, j]) / d
                K.b[i, j] = -(sj * Bb[i, j] + si * BHb[i, j]) / d
        for j in range(nz, n):
            L.a[i, j], L.b[i, j] = -Ba[i, j] / si, -Bb[i, j] / si
            # L_ji = -conj(L_ij)
            L.a[j, i], L.b[j, i] = -np.conj(L.a[i, j]), L.b[i, j]
        for j in range(nz, m):
            K.a[j, i], K.b[j, i] = Ba[j, i] / si, Bb[j, i] / si
            K.a[i, j], K.b[i, j] = -np.conj(K.a[j, i]), K.b[j, i]

    U = DQMatrix(U0, U0 @ K)
    V = DQMatrix(V0, V0 @ L)

    lam = np.real(np.diag(B.a))
    sigma = [DualNumber(float(sig[i]), float(lam[i])) for i in range(nz)]
    sigma += [DualNumber(0.0, float(sz[i])) for i in range(kmin - nz)]
    rank = nz + int(np.sum(sz > 0))
    return DQSVDFactorization(U, V, sigma, rank, nz, groups)
