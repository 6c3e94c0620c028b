"""Splitting ``(A, C)`` by the sign of the real parts of the eigenvalues.

The real Schur form of ``A`` is reordered into center (zero real part),
unstable and stable classes, in that order, and the coupling blocks are
annihilated by Sylvester solves. The result is a similarity ``P`` with

    P^-1 A P = blockdiag(A0, A+, A-),    C P = [C0  C+  C-].
"""

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .config import DEFAULT_CONFIG, ToleranceConfig
from .errors import BorderlineSpectrum
from .linalg import RealSchurForm, SchurBlock, balanced_norm, norm, real_schur, reorder_schur, solve_sylvester
from .system import ObservedSystem

__all__ = [
    "CENTER",
    "UNSTABLE",
    "STABLE",
    "EigenCluster",
    "SpectrumClasses",
    "SpectralSplit",
    "classify_spectrum",
    "eigen_counts",
    "spectral_split",
]

CENTER, UNSTABLE, STABLE = "0", "+", "-"
_CLASS_ORDER = {CENTER: 0, UNSTABLE: 1, STABLE: 2}


@dataclass(frozen=True)
class EigenCluster:
    eigenvalues: tuple
    mean_real: float
    mean_abs_imag: float
    kind: str

    @property
    def size(self):
        return len(self.eigenvalues)


@dataclass(frozen=True)
class SpectrumClasses:
    """Eigenvalue clusters of one matrix together with their sign class."""

    clusters: tuple
    threshold: float
    schur: RealSchurForm
    radius: float = 0.0  # eigenvalues closer than this share a cluster

    @property
    def counts(self) -> Tuple[int, int, int]:
        tally = {CENTER: 0, UNSTABLE: 0, STABLE: 0}
        for c in self.clusters:
            tally[c.kind] += c.size
        return tally[CENTER], tally[UNSTABLE], tally[STABLE]

    def cluster_of(self, block: SchurBlock) -> int:
        point = np.array([block.real, block.imag])
        centers = np.array([[c.mean_real, c.mean_abs_imag] for c in self.clusters])
        return int(np.argmin(np.linalg.norm(centers - point, axis=1)))

    def order_key(self, block: SchurBlock):
        idx = self.cluster_of(block)
        c = self.clusters[idx]
        return (_CLASS_ORDER[c.kind], c.mean_real, c.mean_abs_imag, idx)

    def kind_of(self, block: SchurBlock) -> str:
        return self.clusters[self.cluster_of(block)].kind


def _cluster(points, radius):
    m = len(points)
    parent = list(range(m))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(m):
        for j in range(i + 1, m):
            if abs(points[i] - points[j]) <= radius:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(m):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


def classify_spectrum(A, cfg: ToleranceConfig = DEFAULT_CONFIG, schur: RealSchurForm = None) -> SpectrumClasses:
    """Cluster the eigenvalues of ``A`` and assign each cluster a sign class.

    Raises
    ------
    BorderlineSpectrum
        If a cluster's mean real part lies within a factor 10 of the
        threshold ``tol_spec * max(1, ||A||)``.
    """
    A = np.asarray(A, dtype=float)
    if schur is None:
        schur = real_schur(A)
    scale = max(1.0, norm(A))
    threshold = cfg.tol_spec * scale
    eigs = schur.eigenvalues
    folded = [complex(lam.real, abs(lam.imag)) for lam in eigs]
    clusters = []
    # the radius follows the balanced norm: bad scaling of A inflates ||A||
    # without making the eigenvalues any less accurate
    radius = cfg.tol_cluster * max(1.0, balanced_norm(A))
    for group in _cluster(folded, radius):
        members = tuple(eigs[i] for i in group)
        mean_re = float(np.mean([lam.real for lam in members]))
        mean_im = float(np.mean([abs(lam.imag) for lam in members]))
        if threshold / 10 <= abs(mean_re) <= 10 * threshold:
            raise BorderlineSpectrum(
                f"eigenvalue cluster at {mean_re:+.3e}{mean_im:+.3e}j is within a factor 10 "
                f"of the zero-real-part threshold {threshold:.3e}",
                eigenvalues=members,
                threshold=threshold,
            )
        if abs(mean_re) <= threshold:
            kind = CENTER
        else:
            kind = UNSTABLE if mean_re > 0 else STABLE
        clusters.append(EigenCluster(members, mean_re, mean_im, kind))
    return SpectrumClasses(tuple(clusters), threshold, schur, radius)


def eigen_counts(A, cfg: ToleranceConfig = DEFAULT_CONFIG) -> Tuple[int, int, int]:
    """``(n0, n+, n-)``: how many eigenvalues have zero, positive, negative real part."""
    return classify_spectrum(A, cfg).counts


@dataclass(frozen=True)
class SpectralSplit:
    P: np.ndarray
    P_inv: np.ndarray
    A0: np.ndarray
    Aplus: np.ndarray
    Aminus: np.ndarray
    C0: np.ndarray
    Cplus: np.ndarray
    Cminus: np.ndarray

    @property
    def counts(self) -> Tuple[int, int, int]:
        return self.A0.shape[0], self.Aplus.shape[0], self.Aminus.shape[0]

    @property
    def block_diagonal(self) -> np.ndarray:
        n0, npl, nmi = self.counts
        n = n0 + npl + nmi
        out = np.zeros((n, n))
        out[:n0, :n0] = self.A0
        out[n0:n0 + npl, n0:n0 + npl] = self.Aplus
        out[n0 + npl:, n0 + npl:] = self.Aminus
        return out

    @property
    def C_blocks(self) -> np.ndarray:
        return np.hstack([self.C0, self.Cplus, self.Cminus])

    def center(self) -> ObservedSystem:
        return ObservedSystem(self.A0, self.C0)

    def hyperbolic(self) -> ObservedSystem:
        """``(blockdiag(A+, A-), [C+ C-])``."""
        npl, nmi = self.Aplus.shape[0], self.Aminus.shape[0]
        A = np.zeros((npl + nmi, npl + nmi))
        A[:npl, :npl] = self.Aplus
        A[npl:, npl:] = self.Aminus
        return ObservedSystem(A, np.hstack([self.Cplus, self.Cminus]))

    def unstable(self) -> ObservedSystem:
        return ObservedSystem(self.Aplus, self.Cplus)

    def stable(self) -> ObservedSystem:
        return ObservedSystem(self.Aminus, self.Cminus)


def _unit_upper(n, i0, i1, j0, j1, Z):
    M = np.eye(n)
    M[i0:i1, j0:j1] = Z
    return M


def spectral_split(S: ObservedSystem, cfg: ToleranceConfig = DEFAULT_CONFIG) -> SpectralSplit:
    """Block-diagonalize ``S`` into center, unstable and stable parts.

    Within a class the blocks are ordered by ascending cluster real part,
    then imaginary part; blocks of one cluster keep their Schur order.
    """
    A, C = S.A, S.C
    n = S.n
    classes = classify_spectrum(A, cfg)
    ordered = reorder_schur(classes.schur, classes.order_key)
    T = ordered.T
    n0, npl, nmi = classes.counts
    a, b = n0, n0 + npl
    # decouple (+,-), then (0,+) and (0,-) against the block-diagonal remainder
    Y = solve_sylvester(T[b:, b:], T[a:b, a:b], -T[a:b, b:], cfg)
    M2 = _unit_upper(n, a, b, b, n, Y)
    M2_inv = _unit_upper(n, a, b, b, n, -Y)
    T2 = M2_inv @ T @ M2
    Zp = solve_sylvester(T2[a:b, a:b], T2[:a, :a], -T2[:a, a:b], cfg)
    Zm = solve_sylvester(T2[b:, b:], T2[:a, :a], -T2[:a, b:], cfg)
    M1 = np.eye(n)
    M1[:a, a:b] = Zp
    M1[:a, b:] = Zm
    M1_inv = np.eye(n)
    M1_inv[:a, a:b] = -Zp
    M1_inv[:a, b:] = -Zm
    P = ordered.Q @ M2 @ M1
    P_inv = M1_inv @ M2_inv @ ordered.Q.T
    CP = C @ P
    return SpectralSplit(
        P=P,
        P_inv=P_inv,
        A0=T[:a, :a].copy(),
        Aplus=T[a:b, a:b].copy(),
        Aminus=T[b:, b:].copy(),
        C0=CP[:, :a],
        Cplus=CP[:, a:b],
        Cminus=CP[:, b:],
    )
