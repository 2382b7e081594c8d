"""Acceptance criteria 1-9.  Each test prints a one-line verdict; the
terminal summary (see conftest) lists PASS/FAIL per criterion."""
import math
import time
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from dqlinalg import (DQMatrix, DualNumber, Quaternion, cs_decompose_2x2, dn_abs, dn_cmp, dn_inv,
                      dn_mul, dn_sqrt, dqccd, dqgsvd1_cs, dqgsvd1_regular, dqgsvd2, dqpsvd, dqsvd,
                      householder_annihilate, matmul, max_residual, product_svd, qr_pivoted)
from dqlinalg.factor_gsvd import structured_solve_residual
from gen import (householder_unitary, planted, planted_cs_unitary, rand_dq, rand_unitary,
                 random_planted_sigma)
from worked_examples import S2, pair_one, pair_two

TOL = 1e-9


def diag_pairs(M: DQMatrix):
    a = M.to_array()
    return [(float(a[i, i, 0]), float(a[i, i, 4])) for i in range(min(M.shape))]


def multiset_gap(got, want):
    """Max componentwise gap after sorting both multisets the same way."""
    if len(got) != len(want):
        return math.inf
    g = sorted(got, key=lambda p: (round(p[0], 6), round(p[1], 6)))
    w = sorted(want, key=lambda p: (round(p[0], 6), round(p[1], 6)))
    return max((max(abs(x[0] - y[0]), abs(x[1] - y[1])) for x, y in zip(g, w)), default=0.0)


def verdict(n, ok, detail):
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, detail


def test_criterion_1_pair_one_first_form():
    A, B = pair_one()
    t0 = time.perf_counter()
    g = dqgsvd1_cs(A, B)
    dt = time.perf_counter() - t0
    gap_a = multiset_gap(diag_pairs(g.SigmaA), [(1, 0), (S2, 0), (0, 1)])
    gap_b = multiset_gap(diag_pairs(g.SigmaB), [(0, 1), (S2, 0), (1, 0)])
    (ra_s, ra_i), (rb_s, rb_i) = g.residuals(A, B)
    res = max(ra_s, ra_i, rb_s, rb_i)
    ok = gap_a <= TOL and gap_b <= TOL and res <= TOL and dt < 1.0
    verdict(1, ok, f"SigmaA gap {gap_a:.2e} got {diag_pairs(g.SigmaA)}, SigmaB gap {gap_b:.2e}, "
                   f"reconstruction {res:.2e}, {dt:.3f}s")


def test_criterion_2_pair_two_regular_form():
    A, B = pair_two()
    t0 = time.perf_counter()
    g = dqgsvd1_regular(A, B)
    dt = time.perf_counter() - t0
    solve = structured_solve_residual(g)
    N = DQMatrix.vstack([g.NA, g.NB])
    orth = max(max_residual(matmul(N.H, N), DQMatrix.eye(N.cols)))
    res = max(max(r) for r in g.residuals(A, B))
    want = [(S2, 1), (S2, 0), (S2, -1), (0, 1), (0, 1)]
    sig = [(x.standard, x.infinitesimal) for x in g.sigma_C]
    gap = max(max(abs(a[0] - b[0]), abs(a[1] - b[1])) for a, b in zip(sig, want))
    ok = (solve <= TOL and orth <= TOL and res <= TOL and gap <= 1e-10 and N.cols == 2
          and dt < 1.0)
    verdict(2, ok, f"solve {solve:.2e}, N orthonormal {orth:.2e}, reconstruction {res:.2e}, "
                   f"sigma gap {gap:.2e}, {dt:.3f}s")


def test_criterion_3_pair_two_second_gsvd():
    A, B = pair_two()
    t0 = time.perf_counter()
    g = dqgsvd2(A, B)
    dt = time.perf_counter() - t0
    gap_a = multiset_gap(diag_pairs(g.SigmaA), [(1, 0), (S2, 0), (0, 1)])
    gap_b = multiset_gap(diag_pairs(g.SigmaB), [(0, 1), (S2, 0), (1, 0)])
    res = max(max(r) for r in g.residuals(A, B))
    ok = gap_a <= TOL and gap_b <= TOL and res <= TOL and dt < 1.0
    verdict(3, ok, f"SigmaA gap {gap_a:.2e}, SigmaB gap {gap_b:.2e}, residual {res:.2e}, {dt:.3f}s")


def _ordered(sig, tol=TOL):
    for x, y in zip(sig, sig[1:]):
        if x.standard < y.standard - tol:
            return False
        if abs(x.standard - y.standard) <= tol and x.infinitesimal < y.infinitesimal - tol:
            return False
    return True


def test_criterion_4_dqsvd_suite():
    rng = np.random.default_rng(4)
    t0 = time.perf_counter()
    worst = {"reconstruction": 0.0, "unitarity": 0.0, "planted": 0.0}
    bad_order = 0
    for _ in range(200):
        m, n = rng.integers(1, 9, 2)
        want = random_planted_sigma(rng, min(m, n))
        A = planted(rng, m, n, want)
        f = dqsvd(A)
        worst["reconstruction"] = max(worst["reconstruction"], *f.residual(A))
        worst["unitarity"] = max(worst["unitarity"],
                                 max(max_residual(matmul(f.U.H, f.U), DQMatrix.eye(m))),
                                 max(max_residual(matmul(f.V.H, f.V), DQMatrix.eye(n))))
        got = [(x.standard, x.infinitesimal) for x in f.sigma]
        worst["planted"] = max(worst["planted"], multiset_gap(got, want))
        bad_order += not _ordered(f.sigma)
    dt = time.perf_counter() - t0
    ok = max(worst.values()) <= TOL and bad_order == 0 and dt < 30
    verdict(4, ok, ", ".join(f"{k} {v:.2e}" for k, v in worst.items())
            + f", misordered {bad_order}, {dt:.2f}s")


def test_criterion_5_cs_suite():
    rng = np.random.default_rng(5)
    t0 = time.perf_counter()
    rec = pyth = 0.0
    degenerate_ok = True
    for i in range(100):
        n = int(rng.integers(2, 7))
        W = householder_unitary(rng, n)
        if i % 4 == 0:
            W = DQMatrix(W.st)
        r1, t1 = (int(x) for x in rng.integers(0, n + 1, 2))
        cs = cs_decompose_2x2(W, r1, t1)
        rec = max(rec, *cs.residual(W))
        pyth = max(pyth, cs.pythagoras_residual())
        if i % 4 == 0:
            eps_parts = max(cs.middle.inn.absmax(), cs.left().inn.absmax(), cs.right().inn.absmax())
            degenerate_ok &= eps_parts <= TOL and cs.blocks["t"] == 0 and cs.blocks["r"] == 0
    for _ in range(20):
        W = planted_cs_unitary(rng, int(rng.integers(1, 4)))
        k = W.rows // 2
        cs = cs_decompose_2x2(W, k, k)
        rec = max(rec, *cs.residual(W))
        pyth = max(pyth, cs.pythagoras_residual())
    dt = time.perf_counter() - t0
    ok = rec <= TOL and pyth <= TOL and degenerate_ok and dt < 30
    verdict(5, ok, f"reconstruction {rec:.2e}, pythagoras {pyth:.2e}, "
                   f"degeneration {'ok' if degenerate_ok else 'broken'}, {dt:.2f}s")


def test_criterion_6_qr_suite():
    rng = np.random.default_rng(6)
    h = 0.0
    for _ in range(500):
        n = int(rng.integers(2, 9))
        a = rand_dq(rng, n, 1)
        if rng.random() < 0.2:
            a = DQMatrix(a.st.scale(0.0), a.inn)
        H, _ = householder_annihilate(a)
        M = H.as_matrix()
        h = max(h, *max_residual(matmul(M, M), DQMatrix.eye(n)), *max_residual(M, M.H))
    rec = 0.0
    agree = 0
    for _ in range(200):
        m, n = (int(x) for x in rng.integers(1, 8, 2))
        sig = random_planted_sigma(rng, min(m, n))
        if all(s == (0.0, 0.0) for s in sig):
            sig[0] = (1.0, 0.0)
        A = planted(rng, m, n, sig)
        f = qr_pivoted(A)
        rec = max(rec, *f.residual(A))
        s = dqsvd(A)
        agree += (f.rank, f.arank) == (s.rank, s.arank)
    ok = h <= 1e-11 and rec <= TOL and agree == 200
    verdict(6, ok, f"Householder {h:.2e}, QR reconstruction {rec:.2e}, rank agreement {agree}/200")


def test_criterion_7_product_svd_oracle():
    rng = np.random.default_rng(7)
    gap = rec = 0.0
    for _ in range(100):
        m, n, p = (int(x) for x in rng.integers(1, 6, 3))
        A = planted(rng, m, n, random_planted_sigma(rng, min(m, n)))
        B = planted(rng, n, p, random_planted_sigma(rng, min(n, p)))
        f = product_svd(A, B)
        g = dqsvd(matmul(A, B))
        gap = max(gap, multiset_gap([tuple(x) for x in f.sigma], [tuple(x) for x in g.sigma]))
        ps = dqpsvd(A, B)
        rec = max(rec, *(max(r) for r in ps.residuals(A, B)))
    ok = gap <= 1e-8 and rec <= 1e-8
    verdict(7, ok, f"singular value gap {gap:.2e}, PSVD reconstruction {rec:.2e}")


def _right_factor(rng, n):
    # well-conditioned nonsingular dual matrix
    return matmul(rand_unitary(rng, n),
                  DQMatrix.diag([DualNumber(float(x), float(y))
                                 for x, y in zip(rng.uniform(0.5, 2, n), rng.uniform(-1, 1, n))]))


def test_criterion_8_ccd_suite():
    rng = np.random.default_rng(8)
    rec = inv = 0.0
    exact = True
    regular = 0
    for _ in range(100):
        m = int(rng.integers(2, 7))
        n, l = (int(x) for x in rng.integers(1, m + 1, 2))
        A, B = rand_dq(rng, m, n), rand_dq(rng, m, l)
        c = dqccd(A, B)
        if not c.regular:
            continue
        regular += 1
        rec = max(rec, *(max(r) for r in c.residuals(A, B)))
        q = B.cols
        want = np.zeros((m, q, 8))
        want[np.arange(q), np.arange(q), 0] = 1.0
        exact &= bool(np.array_equal(c.SigmaB.to_array()[:, :q], want))
        c2 = dqccd(matmul(A, _right_factor(rng, n)), matmul(B, _right_factor(rng, l)))
        inv = max(inv, multiset_gap([tuple(x) for x in c.correlations],
                                    [tuple(x) for x in c2.correlations]))
    ok = rec <= TOL and inv <= 1e-8 and exact and regular > 0
    verdict(8, ok, f"{regular} regular cases, reconstruction {rec:.2e}, right invariance {inv:.2e}, "
                   f"SigmaB exact {exact}")


def _ulps(x: float, exact) -> float:
    e = float(exact)
    if e == 0.0:
        return 0.0 if x == 0.0 else math.inf
    return abs(x - e) / math.ulp(e)


def _rand_float(rng):
    return float(rng.choice([-1, 1]) * 10 ** rng.uniform(-3, 3))


def test_criterion_9_scalar_oracle():
    rng = np.random.default_rng(9)
    mpmath.mp.dps = 60
    worst = 0.0
    for _ in range(10_000):
        a, b, c, d = (_rand_float(rng) for _ in range(4))
        Fa, Fb, Fc, Fd = map(Fraction, (a, b, c, d))
        p, q = DualNumber(a, b), DualNumber(c, d)
        s, t, u = p + q, p - q, dn_mul(p, q)
        errs = [_ulps(s.standard, Fa + Fc), _ulps(s.infinitesimal, Fb + Fd),
                _ulps(t.standard, Fa - Fc), _ulps(t.infinitesimal, Fb - Fd),
                _ulps(u.standard, Fa * Fc), _ulps(u.infinitesimal, Fa * Fd + Fb * Fc)]
        v = dn_inv(p)
        errs += [_ulps(v.standard, 1 / Fa), _ulps(v.infinitesimal, -Fb / (Fa * Fa))]
        w = dn_sqrt(DualNumber(abs(a), b))
        r = mpmath.sqrt(mpmath.mpf(abs(a)))
        errs += [_ulps(w.standard, r), _ulps(w.infinitesimal, mpmath.mpf(b) / (2 * r))]
        z = dn_abs(p)
        sg = 1 if a > 0 else -1
        errs += [_ulps(z.standard, abs(Fa)), _ulps(z.infinitesimal, sg * Fb)]
        want_cmp = (Fa > Fc) - (Fa < Fc) or (Fb > Fd) - (Fb < Fd)
        errs.append(0.0 if dn_cmp(p, q) == want_cmp else math.inf)
        worst = max(worst, *errs)
    one, i, j, k = (Quaternion(*e) for e in np.eye(4))
    table = {(i, j): k, (j, k): i, (k, i): j, (j, i): -k, (k, j): -i, (i, k): -j,
             (i, i): -one, (j, j): -one, (k, k): -one}
    table_ok = all(x * y == z for (x, y), z in table.items()) and i * j * k == -one
    ok = worst <= 2 and table_ok
    verdict(9, ok, f"worst {worst:.2f} ulp over 10^4 cases, quaternion table {'exact' if table_ok else 'wrong'}")
