"""Canonical forms under linear and topological equivalence.

The topological canonical form is assembled from three pieces:

* ``(Nhat, Khat)``: the center subsystem in observable canonical form
  (when it is completely observable; otherwise a flagged representative),
* ``(Bhat, Dhat)``: the observable part of the hyperbolic subsystem in
  observable canonical form,
* ``Ehat``: ``diag(+1, ..., +1, -1, ..., -1)`` standing in for the
  unobservable hyperbolic dynamics.
"""

from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

import numpy as np
import scipy.linalg

from .config import DEFAULT_CONFIG, ToleranceConfig
from .errors import AdditivityViolation, CenterNotObservable, NotObservable, NotSISO
from .observability import kalman_decompose, kalman_rank, reference_norms
from .signature import InvariantSignature, signature_from_split
from .spectral import spectral_split
from .system import ObservedSystem

__all__ = [
    "ObservableCanonicalForm",
    "CanonicalForm",
    "ehat",
    "observable_canonical_siso",
    "observable_canonical_mimo",
    "topological_canonical",
    "merged_observable_canonical",
]


def ehat(d_plus: int, d_minus: int) -> np.ndarray:
    """``diag(+1 * d_plus, -1 * d_minus)``."""
    if d_plus < 0 or d_minus < 0:
        raise ValueError(f"block sizes must be non-negative, got ({d_plus}, {d_minus})")
    return np.diag(np.concatenate([np.ones(d_plus), -np.ones(d_minus)]))


class ObservableCanonicalForm(NamedTuple):
    """``A = T A_orig T^-1``, ``C = C_orig T^-1``.

    ``indices[i]`` is the number of rows ``c_i A^j`` chosen for output ``i``
    (the observability indices).
    """

    A: np.ndarray
    C: np.ndarray
    T: np.ndarray
    indices: Tuple[int, ...]


def observable_canonical_mimo(S: ObservedSystem, cfg: ToleranceConfig = DEFAULT_CONFIG,
                              reference: Optional[ObservedSystem] = None) -> ObservableCanonicalForm:
    """Luenberger observable canonical form of a completely observable pair.

    Rows of the observability matrix are scanned in the order
    ``c_1, ..., c_p, c_1 A, ..., c_p A, ...`` and kept when independent of
    the rows kept so far. Kept rows, grouped by output, form ``T``. In the
    new coordinates every row of ``A`` is a unit shift except the last row
    of each output group, which holds the coefficients expressing
    ``c_i A^nu_i`` in the basis.

    Independence is judged like in
    :func:`obsequiv.observability.observable_subspace`: the part of
    ``c_i A^j`` outside the kept rows must exceed ``tol_rank * n`` times
    ``||c_i A^(j-1)|| ||A||`` (or ``tol_rank * max(n, p) * ||C||`` when
    ``j = 0``). ``reference`` floors both norms.
    """
    n, p = S.n, S.p
    if n == 0:
        return ObservableCanonicalForm(np.zeros((0, 0)), np.zeros((p, 0)), np.zeros((0, 0)), (0,) * p)
    k = kalman_rank(S, cfg, reference)
    if k < n:
        raise NotObservable(f"system has Kalman rank {k} < n = {n}")

    # rows are built from A / s to keep powers bounded; D undoes that below
    a_ref, c_ref = reference_norms(S, reference)
    s = max(1.0, float(np.linalg.norm(S.A, 2)))
    As = S.A / s
    kept = []  # (output, power, row) in scan order
    basis = np.zeros((0, n))  # orthonormal rows spanning the kept rows
    dead = set()
    row_of = [S.C[i].copy() for i in range(p)]
    bound = [cfg.tol_rank * max(n, p) * c_ref] * p
    for power in range(n):
        for i in range(p):
            if len(kept) == n or i in dead:
                continue
            r = row_of[i]
            resid = r - (r @ basis.T) @ basis
            resid = resid - (resid @ basis.T) @ basis
            size = float(np.linalg.norm(resid))
            if size > bound[i]:
                kept.append((i, power, r))
                basis = np.vstack([basis, resid / size])
                bound[i] = cfg.tol_rank * n * float(np.linalg.norm(r)) * a_ref / s
                row_of[i] = r @ As
            else:
                dead.add(i)
    if len(kept) < n:
        raise NotObservable(f"scan found only {len(kept)} independent rows, n = {n}")
    indices = tuple(sum(1 for o, _, _ in kept if o == i) for i in range(p))
    order = sorted(kept, key=lambda t: (t[0], t[1]))
    Ts = np.vstack([r for _, _, r in order])
    position = {(o, j): idx for idx, (o, j, _) in enumerate(order)}
    # D scales row c_i As^j back to c_i A^j
    d = np.array([s ** j for _, j, _ in order])

    Ahat = np.zeros((n, n))
    for idx, (o, j, r) in enumerate(order):
        if j + 1 < indices[o]:
            Ahat[idx, position[(o, j + 1)]] = 1.0
        else:
            coeff = np.linalg.solve(Ts.T, (r @ As).T)
            # unscale: Ahat = s * D Ahat_s D^-1
            Ahat[idx] = s * d[idx] * coeff / d
    Chat = np.zeros((p, n))
    for i in range(p):
        if indices[i] > 0:
            Chat[i, position[(i, 0)]] = 1.0
        else:
            Chat[i] = np.linalg.solve(Ts.T, S.C[i]) / d
    T = d[:, None] * Ts
    return ObservableCanonicalForm(Ahat, Chat, T, indices)


def observable_canonical_siso(S: ObservedSystem, cfg: ToleranceConfig = DEFAULT_CONFIG,
                              reference: Optional[ObservedSystem] = None) -> ObservableCanonicalForm:
    """Observable companion form of a single-output observable pair.

    Ones on the superdiagonal, last row ``[mu_n, ..., mu_1]`` where
    ``C A^n = mu_n C + ... + mu_1 C A^(n-1)``, and ``C = [1, 0, ..., 0]``.
    The transform ``T`` has rows ``C, CA, ..., CA^(n-1)``.
    """
    if S.p != 1:
        raise NotSISO(f"expected a single output, got p = {S.p}")
    return observable_canonical_mimo(S, cfg, reference)


@dataclass(frozen=True)
class CanonicalForm:
    Nhat: np.ndarray
    Khat: np.ndarray
    Bhat: np.ndarray
    Dhat: np.ndarray
    Ehat: np.ndarray
    assembled_A: np.ndarray
    assembled_C: np.ndarray
    center_is_canonical: bool
    signature: InvariantSignature
    Lhat: Optional[np.ndarray] = None
    That: Optional[np.ndarray] = None

    @property
    def merged(self) -> bool:
        return self.Lhat is not None

    def assembled(self) -> ObservedSystem:
        return ObservedSystem(self.assembled_A, self.assembled_C)


def _blockdiag(*blocks):
    blocks = [b for b in blocks if b.size or b.shape[0]]
    if not blocks:
        return np.zeros((0, 0))
    return scipy.linalg.block_diag(*blocks)


def _pieces(S: ObservedSystem, cfg: ToleranceConfig):
    split = spectral_split(S, cfg)
    sig = signature_from_split(S, split, cfg)
    dec = kalman_decompose(split.hyperbolic(), cfg, S)
    if dec.k != sig.k_plus + sig.k_minus:
        raise AdditivityViolation(
            f"observable hyperbolic part has dimension {dec.k}, expected k+ + k- = {sig.k_plus + sig.k_minus}"
        )
    return split, sig, dec


def topological_canonical(S: ObservedSystem, cfg: ToleranceConfig = DEFAULT_CONFIG) -> CanonicalForm:
    """Topological-equivalence canonical form of ``S``.

    1. split off the center part from the hyperbolic part,
    2. Kalman-decompose the hyperbolic part,
    3. replace its unobservable dynamics by ``Ehat``,
    4. put the center part and the observable hyperbolic part into
       observable canonical form.

    If the center part is not completely observable there is no canonical
    form to put it in; its real-Schur-ordered block is returned instead and
    ``center_is_canonical`` is False.
    """
    split, sig, dec = _pieces(S, cfg)
    p = S.p
    B = observable_canonical_mimo(dec.observable(), cfg, S)
    center = split.center()
    if sig.k0 == sig.n0:
        N = observable_canonical_mimo(center, cfg, S)
        Nhat, Khat, canonical = N.A, N.C, True
    else:
        Nhat, Khat, canonical = split.A0.copy(), split.C0.copy(), False
    E = ehat(sig.n_plus - sig.k_plus, sig.n_minus - sig.k_minus)
    A_big = _blockdiag(Nhat, B.A, E)
    C_big = np.hstack([Khat, B.C, np.zeros((p, E.shape[0]))])
    return CanonicalForm(Nhat, Khat, B.A, B.C, E, A_big, C_big, canonical, sig)


def merged_observable_canonical(S: ObservedSystem, cfg: ToleranceConfig = DEFAULT_CONFIG) -> CanonicalForm:
    """Canonical form with the center and observable hyperbolic blocks merged.

    Only defined when the center part is completely observable; the merged
    block ``(Lhat, That)`` is the observable canonical form of
    ``(blockdiag(A0, Ao), [C0, Co])``.
    """
    split, sig, dec = _pieces(S, cfg)
    if sig.k0 < sig.n0:
        raise CenterNotObservable(f"center part has Kalman rank {sig.k0} < n0 = {sig.n0}")
    base = topological_canonical(S, cfg)
    obs = dec.observable()
    combined = ObservedSystem(_blockdiag(split.A0, obs.A), np.hstack([split.C0, obs.C]))
    L = observable_canonical_mimo(combined, cfg, S)
    E = base.Ehat
    A_big = _blockdiag(L.A, E)
    C_big = np.hstack([L.C, np.zeros((S.p, E.shape[0]))])
    return CanonicalForm(base.Nhat, base.Khat, base.Bhat, base.Dhat, E, A_big, C_big,
                         True, sig, Lhat=L.A, That=L.C)
