"""Quaternion SVD / Hermitian eigensolver built on the complex adjoint."""
from __future__ import annotations

import numpy as np

from ._qmatrix import QMat, right_mul_cols
from .errors import ConvergenceFailure

_EPS = np.finfo(float).eps


def greedy_orthonormal(cands: QMat, k: int, basis: QMat | None = None) -> QMat:
    """Pick k orthonormal quaternion vectors from span(cands) ⟂ span(basis).

    Candidates are processed greedily by largest remaining norm, which keeps
    the procedure stable even when cands is rank deficient over the
    quaternions (e.g. both halves of a complex-adjoint eigenpair).
    """
    m = cands.shape[0]
    out = QMat.zeros(m, k)
    if k == 0:
        return out
    R = cands.copy()
    B = basis if basis is not None and basis.shape[1] > 0 else None
    if B is not None:
        for _ in range(2):
            R = R - B @ (B.H @ R)
    chosen = []
    for j in range(k):
        norms = R.col_norms()
        idx = int(np.argmax(norms))
        if norms[idx] <= 1e-8:
            raise ConvergenceFailure("could not extract an orthonormal quaternion basis")
        q = R[:, idx].scale(1.0 / norms[idx])
        for _ in range(2):
            if B is not None:
                q = q - B @ (B.H @ q)
            for c in chosen:
                q = q - c @ (c.H @ q)
            q = q.scale(1.0 / q.fro())
        chosen.append(q)
        out[:, j:j + 1] = q
        R = R - q @ (q.H @ R)
    return out


def _orthonormalize_in_order(M: QMat) -> QMat:
    out = M.copy()
    for j in range(M.shape[1]):
        q = out[:, j]
        for _ in range(2):
            if j:
                P = out[:, :j]
                q = q - P @ (P.H @ q)
            q = q.scale(1.0 / q.fro())
        out[:, j:j + 1] = q
    return out


def _clusters(vals: np.ndarray, tol: float):
    """Split a sorted (descending) array into runs of near-equal values."""
    groups = []
    start = 0
    for i in range(1, len(vals) + 1):
        if i == len(vals) or abs(vals[i - 1] - vals[i]) > tol:
            groups.append((start, i))
            start = i
    return groups


def quat_svd_raw(A: QMat):
    """Full SVD of a quaternion matrix: A = U diag(S) V*.

    Returns (U m×m, S length min(m, n) nonincreasing, V n×n).
    """
    m, n = A.shape
    kmin = min(m, n)
    if m == 0 or n == 0:
        return QMat.eye(m), np.zeros(0), QMat.eye(n)
    X = A.adjoint()
    if not np.all(np.isfinite(X)):
        raise ConvergenceFailure("non-finite input to quaternion SVD")
    try:
        Uc, s, Vh = np.linalg.svd(X)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ConvergenceFailure(str(exc)) from exc
    Vc = Vh.conj().T
    smax = s[0] if s.size else 0.0
    ztol = max(m, n) * 16 * _EPS * smax
    ctol = 1e-11 * smax + 1e-300
    pair = s[0::2]
    r = int(np.sum(pair > ztol))

    cols = []
    for lo, hi in _clusters(s[:2 * r], ctol):
        k = (hi - lo + 1) // 2
        prev = QMat.hstack(cols) if cols else None
        cols.append(greedy_orthonormal(QMat.from_adjoint_columns(Uc[:, lo:hi], m), k, prev))
    U1 = QMat.hstack(cols) if cols else QMat.zeros(m, 0)
    U1 = U1[:, :r] if U1.shape[1] > r else U1
    r = U1.shape[1]
    W = A.H @ U1
    sig = W.col_norms()
    order = np.argsort(-sig, kind="stable")
    U1 = U1[:, order]
    sig = sig[order]
    V1 = W[:, order].scale(1.0 / np.where(sig > 0, sig, 1.0)[None, :])
    # re-orthonormalize in descending order: small sigma vectors carry
    # O(eps * smax / sigma) direction errors that this removes harmlessly
    V1 = _orthonormalize_in_order(V1)

    U2 = greedy_orthonormal(QMat.from_adjoint_columns(Uc[:, 2 * r:], m), m - r, U1)
    V2 = greedy_orthonormal(QMat.from_adjoint_columns(Vc[:, 2 * r:], n), n - r, V1)
    U = QMat.hstack([U1, U2])
    V = QMat.hstack([V1, V2])
    U, V = normalize_phases(U, V, kmin)
    S = np.zeros(kmin)
    S[:r] = sig
    return U, S, V


def first_phase(M: QMat, j: int, thresh: float = 1e-8):
    """Unit quaternion phi making the first significant entry of column j real positive."""
    mag = np.sqrt(np.abs(M.a[:, j]) ** 2 + np.abs(M.b[:, j]) ** 2)
    idx = np.nonzero(mag > thresh)[0]
    if idx.size == 0:
        return 1.0 + 0j, 0j
    k = idx[0]
    # conj(a + b j) = conj(a) - b j
    return np.conj(M.a[k, j]) / mag[k], -M.b[k, j] / mag[k]


def normalize_phases(U: QMat, V: QMat, paired: int):
    """Right-multiply matching columns of U and V by the same unit quaternion."""
    m, n = U.shape[1], V.shape[1]
    pa, pb = np.ones(m, complex), np.zeros(m, complex)
    qa, qb = np.ones(n, complex), np.zeros(n, complex)
    for i in range(m):
        pa[i], pb[i] = first_phase(U, i)
    qa[:paired], qb[:paired] = pa[:paired], pb[:paired]
    for j in range(paired, n):
        qa[j], qb[j] = first_phase(V, j)
    return right_mul_cols(U, pa, pb), right_mul_cols(V, qa, qb)


def quat_eigh(H: QMat):
    """Eigen-decomposition of a Hermitian quaternion matrix.

    Returns (lam, V) with lam nonincreasing and H = V diag(lam) V*.
    """
    n = H.shape[0]
    if n == 0:
        return np.zeros(0), QMat.eye(0)
    Hs = QMat((H.a + H.a.conj().T) / 2, (H.b - H.b.T) / 2)
    X = Hs.adjoint()
    w, Z = np.linalg.eigh(X)
    w = w[::-1]
    Z = Z[:, ::-1]
    scale = max(1.0, float(np.abs(w).max()))
    cols = []
    for lo, hi in _clusters(w, 1e-11 * scale):
        k = (hi - lo + 1) // 2
        prev = QMat.hstack(cols) if cols else None
        got = sum(c.shape[1] for c in cols)
        k = min(k, n - got)
        if k:
            cols.append(greedy_orthonormal(QMat.from_adjoint_columns(Z[:, lo:hi], n), k, prev))
    V = QMat.hstack(cols)
    if V.shape[1] < n:
        V = QMat.hstack([V, greedy_orthonormal(QMat.eye(n), n - V.shape[1], V)])
    lam = np.real(np.einsum("ij,ij->j", V.a.conj(), (Hs @ V).a) + np.einsum("ij,ij->j", V.b.conj(), (Hs @ V).b))
    order = np.argsort(-lam, kind="stable")
    return lam[order], V[:, order]


def quat_complement(Q1: QMat) -> QMat:
    """Orthonormal completion of a quaternion matrix with orthonormal columns."""
    m, k = Q1.shape
    return greedy_orthonormal(QMat.eye(m), m - k, Q1)
