"""Dense real matrix engine.

Rank with tolerance, real Schur form with block reordering, Sylvester
solves, the matrix exponential and the solution space of the linear
matrix equations ``A1 X = X A2, C1 X = C2``.

LAPACK (through scipy) supplies the Hessenberg/QR Schur factorization,
the Bartels-Stewart Sylvester solver and the Pade matrix exponential.
Block reordering is done here by direct swapping of adjacent blocks.
"""

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.linalg

from .config import DEFAULT_CONFIG, ToleranceConfig
from .errors import NonConvergence, SpectraOverlap, SwapIllConditioned

__all__ = [
    "SchurBlock",
    "RealSchurForm",
    "AffineSolution",
    "as_matrix",
    "norm",
    "rank_with_tolerance",
    "balanced_norm",
    "real_schur",
    "reorder_schur",
    "solve_sylvester",
    "expm",
    "solve_affine_matrix_equation",
    "nonsingularity_ratio",
    "is_nonsingular",
]

EPS = np.finfo(float).eps
SWAP_COND_CAP = 1.0 / np.sqrt(EPS)
DET_THRESHOLD = 1e-10


def as_matrix(M, rows=None, cols=None) -> np.ndarray:
    """Return ``M`` as a 2-D float64 array, checking finiteness and shape."""
    out = np.array(M, dtype=float)
    if out.ndim == 1 and rows is not None and cols is None:
        out = out.reshape(rows, -1) if out.size else np.zeros((rows, 0))
    if out.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {out.shape}")
    if rows is not None and out.shape[0] != rows:
        raise ValueError(f"expected {rows} rows, got {out.shape[0]}")
    if cols is not None and out.shape[1] != cols:
        raise ValueError(f"expected {cols} columns, got {out.shape[1]}")
    if not np.all(np.isfinite(out)):
        raise ValueError("matrix entries must be finite")
    return out


def norm(M) -> float:
    """Frobenius norm, 0 for empty matrices."""
    M = np.asarray(M)
    return float(np.linalg.norm(M)) if M.size else 0.0


def balanced_norm(A) -> float:
    """Frobenius norm of ``D^-1 A D`` after diagonal balancing.

    A similarity invariant proxy for the size of ``A`` that is not inflated
    by bad scaling, as in companion matrices with large coefficients.
    """
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return 0.0
    B, _ = scipy.linalg.matrix_balance(A, permute=False)
    return float(np.linalg.norm(B))


def rank_with_tolerance(M, cfg: ToleranceConfig = DEFAULT_CONFIG, scale: float = 0.0) -> int:
    """Number of singular values above ``tol_rank * max(sigma_max, scale) * max(rows, cols)``.

    ``scale`` is the size of the data ``M`` was derived from. Without it a
    matrix made only of roundoff would count as full rank.
    """
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    ref = max(float(s[0]), scale)
    if ref == 0.0:
        return 0
    cutoff = cfg.tol_rank * ref * max(M.shape)
    return int(np.count_nonzero(s > cutoff))


# --------------------------------------------------------------------------
# Real Schur form


@dataclass(frozen=True)
class SchurBlock:
    offset: int
    size: int
    real: float
    imag: float  # non-negative; 0 for 1x1 blocks

    @property
    def eigenvalues(self):
        if self.size == 1:
            return (complex(self.real, 0.0),)
        return (complex(self.real, self.imag), complex(self.real, -self.imag))


@dataclass(frozen=True)
class RealSchurForm:
    """``A = Q T Q^T`` with ``Q`` orthogonal and ``T`` quasi-upper-triangular."""

    Q: np.ndarray
    T: np.ndarray
    blocks: tuple

    @property
    def eigenvalues(self):
        return [lam for b in self.blocks for lam in b.eigenvalues]

    def reconstruct(self):
        return self.Q @ self.T @ self.Q.T


def _scan_blocks(T):
    n = T.shape[0]
    blocks = []
    i = 0
    while i < n:
        if i + 1 < n and T[i + 1, i] != 0.0:
            vals = np.linalg.eigvals(T[i:i + 2, i:i + 2])
            blocks.append(SchurBlock(i, 2, float(vals.real.mean()), float(abs(vals[0].imag))))
            i += 2
        else:
            blocks.append(SchurBlock(i, 1, float(T[i, i]), 0.0))
            i += 1
    return tuple(blocks)


def _standardize_2x2(T, Q, o):
    """Bring the 2x2 diagonal block at offset ``o`` to LAPACK standard form."""
    t2, u2 = scipy.linalg.schur(T[o:o + 2, o:o + 2], output="real")
    T[o:o + 2, :] = u2.T @ T[o:o + 2, :]
    T[:, o:o + 2] = T[:, o:o + 2] @ u2
    Q[:, o:o + 2] = Q[:, o:o + 2] @ u2
    T[o + 1, o] = t2[1, 0]
    T[o:o + 2, o:o + 2] = t2


def real_schur(A) -> RealSchurForm:
    """Real Schur factorization ``A = Q T Q^T``.

    Raises
    ------
    NonConvergence
        If LAPACK's shifted QR iteration fails.
    """
    A = as_matrix(A)
    n = A.shape[0]
    if A.shape[1] != n:
        raise ValueError(f"real_schur needs a square matrix, got {A.shape}")
    if n == 0:
        return RealSchurForm(np.zeros((0, 0)), np.zeros((0, 0)), ())
    try:
        T, Q = scipy.linalg.schur(A, output="real")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NonConvergence(f"QR iteration failed on {n}x{n} matrix: {exc}\n{A!r}") from exc
    T = np.array(T)
    T[np.tril_indices(n, -2)] = 0.0
    return RealSchurForm(np.array(Q), T, _scan_blocks(T))


def _swap_adjacent(T, Q, i, p, q):
    """Exchange the p x p block at ``i`` with the following q x q block in place."""
    j = i + p + q
    T11 = T[i:i + p, i:i + p]
    T12 = T[i:i + p, i + p:j]
    T22 = T[i + p:j, i + p:j]
    K = np.kron(np.eye(q), T11) - np.kron(T22.T, np.eye(p))
    sv = np.linalg.svd(K, compute_uv=False)
    if sv[-1] <= sv[0] / SWAP_COND_CAP:
        raise SwapIllConditioned(
            f"block swap at offset {i} has Sylvester condition {sv[0] / max(sv[-1], 1e-300):.3e} "
            f"above cap {SWAP_COND_CAP:.3e}"
        )
    X = np.linalg.solve(K, T12.reshape(-1, order="F")).reshape((p, q), order="F")
    local_norm = np.linalg.norm(T[i:j, i:j])
    basis = np.vstack([-X, np.eye(q)])
    U, _ = np.linalg.qr(basis, mode="complete")
    T[i:j, :] = U.T @ T[i:j, :]
    T[:, i:j] = T[:, i:j] @ U
    Q[:, i:j] = Q[:, i:j] @ U
    leak = np.linalg.norm(T[i + q:j, i:i + q])
    if leak > 100 * EPS * max(local_norm, 1.0) * (1.0 + np.linalg.norm(X)):
        raise SwapIllConditioned(f"block swap at offset {i} left a residual of {leak:.3e}")
    T[i + q:j, i:i + q] = 0.0
    for o, size in ((i, q), (i + q, p)):
        if size == 2:
            _standardize_2x2(T, Q, o)
    T[np.tril_indices(T.shape[0], -2)] = 0.0


def reorder_schur(S: RealSchurForm, key: Callable[[SchurBlock], object]) -> RealSchurForm:
    """Stably sort the diagonal blocks of ``S`` by ``key(block)``.

    Adjacent blocks are exchanged only when the left key is strictly larger,
    so blocks with equal keys keep their relative order and are never swapped
    with one another (important for clusters of nearly equal eigenvalues).
    """
    T = S.T.copy()
    Q = S.Q.copy()
    n = T.shape[0]
    blocks = _scan_blocks(T)
    max_swaps = 4 * n * n + 4
    for _ in range(max_swaps):
        keys = [key(b) for b in blocks]
        pos = next((k for k in range(len(blocks) - 1) if keys[k] > keys[k + 1]), None)
        if pos is None:
            return RealSchurForm(Q, T, blocks)
        _swap_adjacent(T, Q, blocks[pos].offset, blocks[pos].size, blocks[pos + 1].size)
        blocks = _scan_blocks(T)
    raise SwapIllConditioned(f"block ordering did not settle after {max_swaps} swaps")


# --------------------------------------------------------------------------
# Sylvester equation, matrix exponential


def _min_spectral_gap(S1, S2):
    if S1.size == 0 or S2.size == 0:
        return np.inf
    l1 = np.linalg.eigvals(S1)
    l2 = np.linalg.eigvals(S2)
    return float(np.min(np.abs(l1[:, None] - l2[None, :])))


def solve_sylvester(S1, S2, Q, cfg: ToleranceConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Solve ``S2 X - X S1 = Q`` for ``X`` (shape m2 x m1).

    The solution is unique iff the spectra of ``S1`` and ``S2`` are disjoint;
    a gap at or below ``tol_spec * max(1, ||S1||, ||S2||)`` raises
    :class:`SpectraOverlap`.
    """
    S1 = as_matrix(S1)
    S2 = as_matrix(S2)
    m1, m2 = S1.shape[0], S2.shape[0]
    Q = as_matrix(Q).reshape(m2, m1)
    if m1 == 0 or m2 == 0:
        return np.zeros((m2, m1))
    gap = _min_spectral_gap(S1, S2)
    if gap <= cfg.tol_spec * max(1.0, norm(S1), norm(S2)):
        raise SpectraOverlap(f"spectra of S1 and S2 are {gap:.3e} apart")
    return scipy.linalg.solve_sylvester(S2, -S1, Q)


def expm(A, t: float = 1.0) -> np.ndarray:
    """``exp(A t)`` by scaling and squaring with Pade approximants."""
    A = as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"expm needs a square matrix, got {A.shape}")
    if A.size == 0:
        return np.zeros((0, 0))
    return scipy.linalg.expm(A * float(t))


# --------------------------------------------------------------------------
# Affine matrix equations


@dataclass(frozen=True)
class AffineSolution:
    """Solutions ``P0 + sum(alpha_i * N_i)`` of ``A1 X = X A2, C1 X = C2``.

    ``particular`` is None when the system is inconsistent. ``null_basis``
    is Frobenius-orthonormal and spans ``{X : A1 X = X A2, C1 X = 0}``.
    """

    particular: Optional[np.ndarray]
    null_basis: tuple
    residual: float

    @property
    def dimension(self):
        return len(self.null_basis)

    def combine(self, coeffs: Sequence[float]) -> np.ndarray:
        P = self.particular.copy()
        for a, N in zip(coeffs, self.null_basis):
            P = P + a * N
        return P


def solve_affine_matrix_equation(A1, A2, C1=None, C2=None,
                                 cfg: ToleranceConfig = DEFAULT_CONFIG) -> AffineSolution:
    """Parameterize all ``X`` with ``A1 X = X A2`` and ``C1 X = C2``.

    With ``C1``/``C2`` omitted only the intertwining equation is imposed
    (then ``X = 0`` is the particular solution). The equations are
    vectorized column-major, each block scaled to unit size, and solved by
    one SVD: the minimum-norm least-squares solution is the particular
    solution, accepted when its residual is at most ``tol_residual``
    relative to the right-hand side.
    """
    A1 = as_matrix(A1)
    A2 = as_matrix(A2)
    n1, n2 = A1.shape[0], A2.shape[0]
    I1, I2 = np.eye(n1), np.eye(n2)
    a_scale = max(1.0, norm(A1) + norm(A2))
    blocks = [(np.kron(I2, A1) - np.kron(A2.T, I1)) / a_scale]
    rhs = [np.zeros(n1 * n2)]
    if C1 is not None:
        C1 = as_matrix(C1, cols=n1)
        C2 = as_matrix(C2, rows=C1.shape[0], cols=n2)
        c_scale = max(1.0, norm(C1), norm(C2))
        blocks.append(np.kron(I2, C1) / c_scale)
        rhs.append(C2.reshape(-1, order="F") / c_scale)
    K = np.vstack(blocks)
    b = np.concatenate(rhs)
    if n1 * n2 == 0:
        ok = not np.any(b)
        return AffineSolution(np.zeros((n1, n2)) if ok else None, (), 0.0 if ok else float(np.linalg.norm(b)))
    U, s, Vt = np.linalg.svd(K, full_matrices=True)
    # blocks of K are scaled to unit size
    r = rank_with_tolerance(K, cfg, scale=1.0)
    coeff = (U[:, :r].T @ b) / s[:r]
    x = Vt[:r].T @ coeff
    residual = float(np.linalg.norm(K @ x - b))
    null_basis = tuple(Vt[k].reshape((n1, n2), order="F") for k in range(r, n1 * n2))
    ok = residual <= cfg.tol_residual * max(1.0, float(np.linalg.norm(b)))
    particular = x.reshape((n1, n2), order="F") if ok else None
    return AffineSolution(particular, null_basis, residual)


def nonsingularity_ratio(P) -> float:
    """``|det P| / ||P||_2^n``, a scale-free measure in [0, 1]."""
    P = np.asarray(P, dtype=float)
    if P.size == 0:
        return 1.0
    s = np.linalg.svd(P, compute_uv=False)
    if s[0] == 0.0:
        return 0.0
    return float(np.prod(s / s[0]))


def is_nonsingular(P, threshold: float = DET_THRESHOLD) -> bool:
    return nonsingularity_ratio(P) > threshold
