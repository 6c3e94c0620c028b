import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from obsequiv import ObservedSystem, ToleranceConfig, eigen_counts, spectral_split
from obsequiv.errors import BorderlineSpectrum

from generators import block_system, conjugate, jordan, random_system, well_conditioned
from oracles import charpoly_roots


def _counts_from_roots(A, tol=1e-9):
    roots = charpoly_roots(A)
    n0 = sum(1 for z in roots if abs(z.real) <= tol)
    npl = sum(1 for z in roots if z.real > tol)
    return n0, npl, len(roots) - n0 - npl


def test_split_already_split():
    S = ObservedSystem(np.diag([1.0, -1.0]), [[1.0, 1.0]])
    sp = spectral_split(S)
    assert sp.counts == (0, 1, 1)
    assert np.allclose(sp.Aplus, [[1]]) and np.allclose(sp.Aminus, [[-1]])
    assert np.allclose(np.abs(sp.Cplus), [[1]]) and np.allclose(np.abs(sp.Cminus), [[1]])
    assert np.allclose(np.abs(sp.P), np.eye(2))


def test_split_repeated_unstable():
    sp = spectral_split(ObservedSystem(np.diag([3.0, 3.0]), [[1.0, 0.0]]))
    assert sp.counts == (0, 2, 0)


def test_split_rotation_plus_unstable():
    D = scipy.linalg.block_diag([[0.0, 1.0], [-1.0, 0.0]], [[2.0]])
    R = np.array([[1.0, 2, 0], [0, 1, 1], [1, 0, 1]])  # det 3
    A = np.linalg.solve(R, D @ R)
    sp = spectral_split(ObservedSystem(A, [[1.0, -2.0, 4.0]]))
    assert sp.counts == (2, 1, 0)
    assert _counts_from_roots(A) == (2, 1, 0)
    lam = sorted(np.linalg.eigvals(sp.A0), key=lambda z: z.imag)
    assert np.allclose(lam, [-1j, 1j], atol=1e-10)
    assert np.allclose(sp.Aplus, [[2.0]])


def test_eigen_counts_examples():
    assert eigen_counts(np.zeros((3, 3))) == (3, 0, 0)
    assert eigen_counts(jordan(2.0, 4)) == (0, 4, 0)
    companion = np.array([[0.0, 1, 0], [0, 0, 1], [0, 1, 0]])  # l^3 - l
    assert _counts_from_roots(companion) == (1, 1, 1)
    assert eigen_counts(companion) == (1, 1, 1)


def test_eigen_counts_empty():
    assert eigen_counts(np.zeros((0, 0))) == (0, 0, 0)


def test_counts_similarity_invariant():
    rng = np.random.default_rng(21)
    for _ in range(300):
        S = block_system(rng)
        R = well_conditioned(rng, S.n)
        assert eigen_counts(np.linalg.solve(R, S.A @ R)) == eigen_counts(S.A)


def test_counts_match_root_oracle():
    rng = np.random.default_rng(22)
    for _ in range(40):
        S = block_system(rng, n_max=5)
        assert eigen_counts(S.A) == _counts_from_roots(S.A)


def test_reassembly():
    rng = np.random.default_rng(23)
    cfg = ToleranceConfig()
    for _ in range(200):
        S = random_system(rng)
        sp = spectral_split(S)
        back = sp.P @ sp.block_diagonal @ sp.P_inv
        assert np.linalg.norm(back - S.A) <= cfg.tol_residual * max(1, np.linalg.norm(S.A))
        assert np.allclose(sp.P @ sp.P_inv, np.eye(S.n), atol=1e-10)
        assert np.allclose(S.C @ sp.P, np.hstack([sp.C0, sp.Cplus, sp.Cminus]))


def test_idempotent_on_split_input():
    rng = np.random.default_rng(24)
    for _ in range(50):
        S = random_system(rng)
        sp = spectral_split(S)
        again = spectral_split(ObservedSystem(sp.block_diagonal, np.hstack([sp.C0, sp.Cplus, sp.Cminus])))
        assert again.counts == sp.counts
        D = again.P_inv @ sp.block_diagonal @ again.P
        a, b = sp.counts[0], sp.counts[0] + sp.counts[1]
        for r, c in [((0, a), (a, None)), ((a, b), (0, a)), ((a, b), (b, None)), ((b, None), (0, b))]:
            block = D[slice(*r), slice(*c)]
            assert np.all(np.abs(block) <= 1e-10)


def test_within_class_order_ascending():
    A = np.diag([-1.0, 3.0, -4.0, 1.0, 0.0])
    sp = spectral_split(ObservedSystem(A, np.ones((1, 5))))
    assert np.allclose(np.diag(sp.Aplus), [1, 3])
    assert np.allclose(np.diag(sp.Aminus), [-4, -1])


def test_defective_eigenvalue_stays_in_its_class():
    S = conjugate(ObservedSystem(jordan(0.0, 3), [[0.0, 0.0, 1.0]]), well_conditioned(np.random.default_rng(1), 3))
    assert spectral_split(S).counts == (3, 0, 0)


def test_borderline_raises():
    with pytest.raises(BorderlineSpectrum) as info:
        eigen_counts(np.diag([2e-9, 1.0]))
    assert info.value.threshold > 0


def test_empty_system():
    sp = spectral_split(ObservedSystem(np.zeros((0, 0)), np.zeros((1, 0))))
    assert sp.counts == (0, 0, 0)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_split_blocks_keep_their_sign(seed):
    S = random_system(np.random.default_rng(seed))
    sp = spectral_split(S)
    thr = 1e-6
    assert all(abs(z.real) <= thr for z in np.linalg.eigvals(sp.A0))
    assert all(z.real > thr for z in np.linalg.eigvals(sp.Aplus))
    assert all(z.real < -thr for z in np.linalg.eigvals(sp.Aminus))
