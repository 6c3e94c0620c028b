"""Kalman observability matrix, its rank, sub-ranks and the observability decomposition."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import DEFAULT_CONFIG, ToleranceConfig
from .errors import AdditivityViolation
from .spectral import SpectralSplit
from .system import ObservedSystem

__all__ = [
    "ObservabilityInfo",
    "ObservabilityDecomposition",
    "SubRanks",
    "observability_matrix",
    "observability_info",
    "kalman_rank",
    "sub_ranks",
    "kalman_decompose",
    "observable_subspace",
    "reference_norms",
]


def observability_matrix(S: ObservedSystem) -> np.ndarray:
    """Stack ``C, CA, ..., CA^(n-1)`` into a ``(p n) x n`` matrix."""
    rows = []
    R = S.C
    for _ in range(S.n):
        rows.append(R)
        R = R @ S.A
    if not rows:
        return np.zeros((0, 0))
    return np.vstack(rows)


def reference_norms(S: ObservedSystem, reference: Optional[ObservedSystem] = None):
    """``(||A||_2, ||C||_2)``, each floored by the same norm of ``reference``.

    Subsystems split off a larger system pass the parent as ``reference``:
    a block made of roundoff then counts as zero instead of being judged
    against its own tiny size.
    """
    def size(M):
        return float(np.linalg.norm(M, 2)) if M.size else 0.0

    a, c = size(S.A), size(S.C)
    if reference is not None:
        a, c = max(a, size(reference.A)), max(c, size(reference.C))
    return a, c


def _project_out(W, Q):
    # twice is enough (Kahan-Parlett)
    for _ in range(2):
        W = W - Q @ (Q.T @ W)
    return W


def observable_subspace(S: ObservedSystem, cfg: ToleranceConfig = DEFAULT_CONFIG,
                        reference: Optional[ObservedSystem] = None) -> np.ndarray:
    """Orthonormal basis of the row space of the observability matrix.

    Orthogonal staircase: start from ``C^T``, then repeatedly apply ``A^T``
    to the directions found last and keep what is new. A direction counts
    as new when its component outside the basis exceeds
    ``tol_rank * max(n, p) * ||C||`` (first step) or
    ``tol_rank * n * ||A||`` (later steps, acting on unit vectors). This
    avoids forming powers of ``A``, whose rows lose rank information fast.
    """
    n, p = S.n, S.p
    a_ref, c_ref = reference_norms(S, reference)
    Q = np.zeros((n, 0))
    W = S.C.T
    cutoff = cfg.tol_rank * max(n, p) * c_ref
    while Q.shape[1] < n:
        W = _project_out(W, Q)
        if W.size == 0:
            break
        U, sv, _ = np.linalg.svd(W, full_matrices=False)
        r = int(np.count_nonzero(sv > cutoff))
        if r == 0:
            break
        new = U[:, :r]
        Q = np.hstack([Q, new])
        W = S.A.T @ new
        cutoff = cfg.tol_rank * n * a_ref
    return Q


@dataclass(frozen=True)
class ObservabilityInfo:
    obs_matrix: np.ndarray
    k_obs: int
    obs_basis: np.ndarray  # n x k_obs, orthonormal columns spanning the row space
    unobs_basis: np.ndarray  # n x (n - k_obs), orthonormal complement


def observability_info(S: ObservedSystem, cfg: ToleranceConfig = DEFAULT_CONFIG,
                       reference: Optional[ObservedSystem] = None) -> ObservabilityInfo:
    O = observability_matrix(S)
    n = S.n
    if n == 0:
        return ObservabilityInfo(O, 0, np.zeros((0, 0)), np.zeros((0, 0)))
    Q = observable_subspace(S, cfg, reference)
    k = Q.shape[1]
    if k == 0:
        return ObservabilityInfo(O, 0, Q, np.eye(n))
    full, _ = np.linalg.qr(Q, mode="complete")
    return ObservabilityInfo(O, k, Q, full[:, k:])


def kalman_rank(S: ObservedSystem, cfg: ToleranceConfig = DEFAULT_CONFIG,
                reference: Optional[ObservedSystem] = None) -> int:
    """Rank of the observability matrix, see :func:`observable_subspace`."""
    if S.n == 0:
        return 0
    return observable_subspace(S, cfg, reference).shape[1]


@dataclass(frozen=True)
class SubRanks:
    k0: int
    k_plus: int
    k_minus: int

    @property
    def total(self):
        return self.k0 + self.k_plus + self.k_minus


def sub_ranks(S: ObservedSystem, split: SpectralSplit, cfg: ToleranceConfig = DEFAULT_CONFIG) -> SubRanks:
    """Kalman ranks of the center, unstable and stable subsystems.

    Raises :class:`AdditivityViolation` if they do not add up to the Kalman
    rank of ``S``; that can only come from a rank decision going the wrong
    way at the chosen tolerance.
    """
    ranks = SubRanks(
        kalman_rank(split.center(), cfg, S),
        kalman_rank(split.unstable(), cfg, S),
        kalman_rank(split.stable(), cfg, S),
    )
    k = kalman_rank(S, cfg)
    if ranks.total != k:
        raise AdditivityViolation(
            f"k0 + k+ + k- = {ranks.k0} + {ranks.k_plus} + {ranks.k_minus} = {ranks.total} "
            f"but the Kalman rank of the whole system is {k}"
        )
    return ranks


@dataclass(frozen=True)
class ObservabilityDecomposition:
    """``T^-1 A T = [[Ao, 0], [Am, Au]]`` and ``C T = [Co, 0]``, with ``T`` orthogonal."""

    T: np.ndarray
    Ao: np.ndarray
    Am: np.ndarray
    Au: np.ndarray
    Co: np.ndarray
    k: int

    def observable(self) -> ObservedSystem:
        return ObservedSystem(self.Ao, self.Co)


def kalman_decompose(S: ObservedSystem, cfg: ToleranceConfig = DEFAULT_CONFIG,
                     reference: Optional[ObservedSystem] = None) -> ObservabilityDecomposition:
    """Split ``S`` into its observable and unobservable parts.

    The first ``k`` columns of ``T`` span the row space of the observability
    matrix; the remaining columns span its kernel, the largest
    ``A``-invariant subspace on which ``C`` vanishes.
    """
    info = observability_info(S, cfg, reference)
    k = info.k_obs
    T = np.hstack([info.obs_basis, info.unobs_basis]) if S.n else np.zeros((0, 0))
    At = T.T @ S.A @ T
    Ct = S.C @ T
    return ObservabilityDecomposition(
        T=T,
        Ao=At[:k, :k].copy(),
        Am=At[k:, :k].copy(),
        Au=At[k:, k:].copy(),
        Co=Ct[:, :k].copy(),
        k=k,
    )
