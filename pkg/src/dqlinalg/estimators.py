"""scikit-learn style wrappers around the functional decompositions.

Each estimator keeps its tolerances as constructor parameters (so
``get_params``/``set_params``/``clone`` work) and stores the factors as
attributes ending in ``_`` after ``fit``.  The full factorization object is
available as ``factorization_``.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .dense import DQMatrix
from .factor_cs import cs_decompose_2x1, cs_decompose_2x2
from .factor_gsvd import dqgsvd1_cs, dqgsvd1_regular, dqgsvd2
from .factor_psvd_ccd import dqccd, dqpsvd, product_svd
from .factor_qr import qr_pivoted
from .factor_svd import dqsvd
from .scalar import ToleranceConfig


def as_dqmatrix(X) -> DQMatrix:
    """Accept a DQMatrix or an (m, n, 8) float array."""
    if isinstance(X, DQMatrix):
        return X
    arr = np.asarray(X, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 8:
        raise ValueError(f"expected a DQMatrix or an (m, n, 8) array, got shape {arr.shape}")
    return DQMatrix.from_array(arr)


class _DQEstimator(BaseEstimator):
    def __init__(self, appreciable_tol=1e-12, rank_tol=1e-10, residual_tol=1e-9):
        self.appreciable_tol = appreciable_tol
        self.rank_tol = rank_tol
        self.residual_tol = residual_tol

    def _tol(self) -> ToleranceConfig:
        return ToleranceConfig(self.appreciable_tol, self.rank_tol, self.residual_tol)


class DQSVD(_DQEstimator):
    """Dual quaternion SVD ``A = U diag(sigma) V*``."""

    def fit(self, X, y=None):
        f = dqsvd(as_dqmatrix(X), self._tol())
        self.factorization_ = f
        self.U_, self.V_, self.sigma_ = f.U, f.V, list(f.sigma)
        self.rank_, self.arank_ = f.rank, f.arank
        return self


class PivotedQR(_DQEstimator):
    """Householder QR with column pivoting, ``A P = Q R``."""

    def fit(self, X, y=None):
        f = qr_pivoted(as_dqmatrix(X), self._tol())
        self.factorization_ = f
        self.Q_, self.R_, self.perm_ = f.Q, f.R, f.perm
        self.rank_, self.arank_ = f.rank, f.arank
        return self


class CSDecomposition(_DQEstimator):
    """CS decomposition of an isometry (``col_split=None``) or a unitary matrix."""

    def __init__(self, split=1, col_split=None, appreciable_tol=1e-12, rank_tol=1e-10,
                 residual_tol=1e-9):
        super().__init__(appreciable_tol, rank_tol, residual_tol)
        self.split = split
        self.col_split = col_split

    def fit(self, X, y=None):
        W = as_dqmatrix(X)
        if self.col_split is None:
            f = cs_decompose_2x1(W, self.split, self._tol())
        else:
            f = cs_decompose_2x2(W, self.split, self.col_split, self._tol())
        self.factorization_ = f
        self.U1_, self.U2_, self.V1_, self.V2_ = f.U1, f.U2, f.V1, f.V2
        self.middle_, self.blocks_ = f.middle, dict(f.blocks)
        self.cosines_, self.sines_ = list(f.C), list(f.S)
        return self


class _PairEstimator(_DQEstimator):
    def fit(self, X, y):
        f = self._decompose(as_dqmatrix(X), as_dqmatrix(y), self._tol())
        self.factorization_ = f
        self._store(f)
        return self


class GSVD1(_PairEstimator):
    """First quotient-type GSVD; ``regular=True`` gives the nonsingular-X form."""

    def __init__(self, regular=False, appreciable_tol=1e-12, rank_tol=1e-10, residual_tol=1e-9):
        super().__init__(appreciable_tol, rank_tol, residual_tol)
        self.regular = regular

    def _decompose(self, A, B, tol):
        return (dqgsvd1_regular if self.regular else dqgsvd1_cs)(A, B, tol)

    def _store(self, f):
        self.U_, self.V_, self.X_ = f.U, f.V, f.X
        self.SigmaA_, self.SigmaB_ = f.middle_A(), f.middle_B()
        self.sigma_C_, self.blocks_ = list(f.sigma_C), dict(f.blocks)
        self.X_singular_ = f.X_singular
        if self.regular:
            self.NA_, self.NB_, self.X_inv_ = f.NA, f.NB, f.X_inv


class GSVD2(_PairEstimator):
    """Second quotient-type GSVD ``U* A X = SigmaA``, ``V* B X = SigmaB``."""

    def _decompose(self, A, B, tol):
        return dqgsvd2(A, B, tol)

    def _store(self, f):
        self.U_, self.V_, self.X_ = f.U, f.V, f.X
        self.SigmaA_, self.SigmaB_, self.blocks_ = f.SigmaA, f.SigmaB, dict(f.blocks)


class PSVD(_PairEstimator):
    """Product-type SVD ``A = U DA X^-1``, ``B = X DB Y``."""

    def _decompose(self, A, B, tol):
        return dqpsvd(A, B, tol)

    def _store(self, f):
        self.U_, self.X_, self.Y_, self.X_inv_ = f.U, f.X, f.Y, f.X_inv
        self.DA_, self.DB_, self.blocks_ = f.DA, f.DB, dict(f.blocks)


class ProductSVD(_PairEstimator):
    """SVD of ``A B`` obtained through the PSVD, without forming the product."""

    def _decompose(self, A, B, tol):
        return product_svd(A, B, tol)

    def _store(self, f):
        self.U_, self.V_, self.sigma_ = f.U, f.V, list(f.sigma)
        self.rank_, self.arank_ = f.rank, f.arank


class CCD(_PairEstimator):
    """Canonical correlation decomposition ``A = Q SigmaA XA``, ``B = Q SigmaB XB``."""

    def _decompose(self, A, B, tol):
        return dqccd(A, B, tol)

    def _store(self, f):
        self.Q_, self.XA_, self.XB_ = f.Q, f.XA, f.XB
        self.SigmaA_, self.SigmaB_ = f.SigmaA, f.SigmaB
        self.correlations_, self.regular_ = list(f.correlations), f.regular
        self.blocks_ = dict(f.blocks)
