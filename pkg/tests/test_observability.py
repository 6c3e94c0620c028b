import numpy as np
import pytest
import scipy.linalg

from obsequiv import ObservedSystem, ToleranceConfig, spectral_split
from obsequiv.errors import AdditivityViolation
from obsequiv.observability import (
    kalman_decompose,
    kalman_rank,
    observability_matrix,
    sub_ranks,
)

from generators import block_system, conjugate, jordan, random_system, well_conditioned
from oracles import exact_rank


def _naive_obs(A, C):
    rows = []
    for k in range(A.shape[0]):
        M = C.copy()
        for _ in range(k):
            M = M @ A
        rows.append(M)
    return np.vstack(rows)


def _jordan4():
    return ObservedSystem(jordan(2.0, 4), [[3.0, 4.0, 0.0, 0.0]])


def test_obs_matrix_identity():
    assert np.array_equal(observability_matrix(ObservedSystem(np.eye(2), [[1.0, 0.0]])), [[1, 0], [1, 0]])


def test_obs_matrix_jordan_rank_two():
    O = observability_matrix(_jordan4())
    assert O.shape == (4, 4)
    assert exact_rank(O) == 2


def test_obs_matrix_matches_repeated_multiplication():
    rng = np.random.default_rng(31)
    for _ in range(20):
        A = rng.standard_normal((3, 3))
        C = rng.standard_normal((2, 3))
        assert np.allclose(observability_matrix(ObservedSystem(A, C)), _naive_obs(A, C), rtol=1e-14, atol=1e-14)


def test_kalman_rank_examples():
    assert kalman_rank(ObservedSystem(np.diag([1.0, 2.0]), np.zeros((1, 2)))) == 0
    assert kalman_rank(_jordan4()) == 2
    for a in (-5.0, 0.0, 3.0, 7.5):
        assert kalman_rank(ObservedSystem(np.diag([3.0, a]), [[1.0, 0.0]])) == 1


def test_kalman_rank_matches_exact_on_integer_systems():
    rng = np.random.default_rng(32)
    for _ in range(200):
        S = block_system(rng)
        assert kalman_rank(S) == exact_rank(observability_matrix(S))


def test_kalman_rank_similarity_invariant():
    rng = np.random.default_rng(33)
    for _ in range(300):
        S = block_system(rng)
        R = well_conditioned(rng, S.n)
        assert kalman_rank(conjugate(S, R)) == kalman_rank(S)


def test_rank_additive_over_disjoint_spectra():
    rng = np.random.default_rng(34)
    for _ in range(200):
        S1 = block_system(rng, n_max=3, p=2)
        S2 = block_system(rng, n_max=3, p=2)
        shifted = S2.A + 10.0 * np.eye(S2.n)
        big = ObservedSystem(scipy.linalg.block_diag(S1.A, shifted), np.hstack([S1.C, S2.C]))
        k1, k2 = kalman_rank(S1), kalman_rank(ObservedSystem(shifted, S2.C))
        assert kalman_rank(big) == k1 + k2


def test_sub_ranks_examples():
    cfg = ToleranceConfig()
    S = ObservedSystem(np.diag([1.0, 0.0, -1.0]), np.zeros((1, 3)))
    r = sub_ranks(S, spectral_split(S), cfg)
    assert (r.k0, r.k_plus, r.k_minus) == (0, 0, 0)
    S = _jordan4()
    r = sub_ranks(S, spectral_split(S), cfg)
    assert (r.k0, r.k_plus, r.k_minus) == (0, 2, 0)


def test_sub_ranks_match_per_block_oracle():
    rng = np.random.default_rng(35)
    for _ in range(200):
        S = block_system(rng)
        d = np.diag(S.A)
        # block_system has real parts on the diagonal, classes read off directly
        parts = [np.abs(d) < 0.5, d > 0.5, d < -0.5]
        want = [exact_rank(observability_matrix(ObservedSystem(S.A[np.ix_(m, m)], S.C[:, m]))) if m.any() else 0
                for m in parts]
        split = spectral_split(S)
        r = sub_ranks(S, split)
        assert [r.k0, r.k_plus, r.k_minus] == want


def test_sub_ranks_report_violation():
    # with a coarse tolerance the whole system looks rank 1 but each part rank 1
    S = ObservedSystem(np.diag([1.0, -1.0]), [[1.0, 1e-3]])
    cfg = ToleranceConfig(tol_rank=0.9)
    with pytest.raises(AdditivityViolation):
        sub_ranks(S, spectral_split(S, cfg), cfg)


def _check_decomposition(S, dec, cfg):
    T = dec.T
    k = dec.k
    At = np.linalg.solve(T, S.A @ T)
    Ct = S.C @ T
    scale_a = max(1.0, np.linalg.norm(S.A))
    scale_c = max(1.0, np.linalg.norm(S.C))
    assert np.linalg.norm(At[:k, k:]) <= cfg.tol_residual * scale_a
    assert np.linalg.norm(Ct[:, k:]) <= cfg.tol_residual * scale_c
    assert np.allclose(At[:k, :k], dec.Ao) and np.allclose(At[k:, :k], dec.Am) and np.allclose(At[k:, k:], dec.Au)
    assert kalman_rank(dec.observable()) == k


def test_decompose_observable_system():
    S = ObservedSystem(np.array([[0.0, 1.0], [-2.0, -3.0]]), [[1.0, 0.0]])
    dec = kalman_decompose(S)
    assert dec.k == 2 and dec.Au.shape == (0, 0) and dec.Am.shape == (0, 2)
    assert np.allclose(np.sort(np.linalg.eigvals(dec.Ao)), [-2, -1])


def test_decompose_zero_output():
    A = np.array([[1.0, 2.0], [0.0, 3.0]])
    dec = kalman_decompose(ObservedSystem(A, np.zeros((1, 2))))
    assert dec.k == 0 and dec.Ao.shape == (0, 0)
    assert np.allclose(np.sort(np.linalg.eigvals(dec.Au)), [1, 3])


def test_decompose_diagonal():
    dec = kalman_decompose(ObservedSystem(np.diag([3.0, 7.0]), [[1.0, 0.0]]))
    assert dec.k == 1
    assert np.allclose(dec.Ao, [[3]]) and np.allclose(np.abs(dec.Co), [[1]])
    assert np.allclose(dec.Au, [[7]]) and np.allclose(dec.Am, [[0]])


def test_decompose_invariants_random():
    rng = np.random.default_rng(36)
    cfg = ToleranceConfig()
    for _ in range(200):
        S = random_system(rng)
        dec = kalman_decompose(S, cfg)
        assert np.allclose(dec.T.T @ dec.T, np.eye(S.n), atol=1e-12)
        _check_decomposition(S, dec, cfg)
