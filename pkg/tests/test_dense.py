import numpy as np
import pytest

from dqlinalg import (DimensionMismatch, DQMatrix, DualNumber, NotSquare, conj_transpose,
                      inner_product, is_unitary, matmul, max_residual, rank_and_arank, vec_norm2)
from dqlinalg.dense import complete_unitary, unitarity_residual
from gen import rand_dq, rand_unitary
from worked_examples import S2, dq, pair_one, pair_one_displayed_factors, pair_one_left_factor, pair_two, q


def test_matmul_identity_and_eps_squared():
    rng = np.random.default_rng(1)
    A = rand_dq(rng, 3, 4)
    assert max(max_residual(matmul(A, DQMatrix.eye(4)), A)) == 0
    Ae = DQMatrix(A.st.scale(0.0), A.inn)
    Be = DQMatrix(A.st.scale(0.0), A.inn).H
    P = matmul(Ae, Be)
    assert P.st.absmax() == 0 and P.inn.absmax() == 0


def test_matmul_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        matmul(DQMatrix.zeros(2, 3), DQMatrix.zeros(2, 3))


def test_pair_one_displayed_factors_reconstruct_pair():
    A, B = pair_one()
    U, V, X, SA, SB = pair_one_displayed_factors()
    assert max(max_residual(matmul(matmul(U, SA), X), A)) < 1e-15
    assert max(max_residual(matmul(matmul(V, SB), X), B)) < 1e-15


def test_conj_transpose():
    rng = np.random.default_rng(2)
    A = rand_dq(rng, 3, 5)
    assert max(max_residual(conj_transpose(conj_transpose(A)), A)) == 0
    assert max(max_residual(DQMatrix.eye(3).H, DQMatrix.eye(3))) == 0


def test_inner_product_examples():
    e1 = DQMatrix.real(np.array([[1.0], [0.0]]))
    e2 = DQMatrix.real(np.array([[0.0], [1.0]]))
    assert inner_product(e1, e2).as_tuple() == (0.0,) * 8
    u = dq([[1], [0]], [[0], [q(z=1)]])
    assert np.allclose(inner_product(u, u).as_tuple(), (1, 0, 0, 0, 0, 0, 0, 0))
    rng = np.random.default_rng(3)
    a, b = rand_dq(rng, 3, 1), rand_dq(rng, 3, 1)
    ia, ib = DQMatrix(a.st.scale(0.0), a.inn), DQMatrix(b.st.scale(0.0), b.inn)
    assert inner_product(ia, ib).as_tuple() == (0.0,) * 8


def test_vec_norm2_examples():
    e1 = DQMatrix.real(np.array([[1.0], [0.0]]))
    assert vec_norm2(e1) == DualNumber(1, 0)
    A, _ = pair_one()
    n = vec_norm2(A[:, 0])
    # <a, a> = (S2 + eps)^2 + (S2 k eps)*(S2 k eps) = 1/2 + sqrt(2) eps
    assert abs(n.standard - S2) < 1e-15 and abs(n.infinitesimal - 1.0) < 1e-15
    assert vec_norm2(DQMatrix.real(np.zeros((2, 1)), np.array([[1.0], [0.0]]))) == DualNumber(0, 1)


def test_is_unitary_examples():
    assert is_unitary(DQMatrix.eye(3))
    assert is_unitary(pair_one_left_factor())
    assert not is_unitary(DQMatrix.real(np.array([[2.0]])))
    with pytest.raises(NotSquare):
        is_unitary(DQMatrix.zeros(2, 3))


def test_rank_and_arank_examples():
    assert rank_and_arank(DQMatrix.zeros(3, 2)) == (0, 0)
    A, B = pair_two()
    assert rank_and_arank(DQMatrix.vstack([A, B])) == (5, 3)
    A, B = pair_one()
    assert rank_and_arank(DQMatrix.vstack([A, B])) == (3, 2)


def test_complete_unitary():
    rng = np.random.default_rng(4)
    U = rand_unitary(rng, 5)
    Q1 = U[:, :2]
    Y = complete_unitary(Q1)
    assert unitarity_residual(DQMatrix.hstack([Q1, Y])) < 1e-13


def test_array_roundtrip_and_entry():
    rng = np.random.default_rng(5)
    A = rand_dq(rng, 2, 3)
    B = DQMatrix.from_array(A.to_array())
    assert max(max_residual(A, B)) == 0
    e = A.entry(1, 2)
    assert np.allclose(e.as_tuple(), A.to_array()[1, 2])
