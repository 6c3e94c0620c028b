"""Deciding linear and topological equivalence of observed systems.

Linear equivalence of ``(A1, C1)`` and ``(A2, C2)`` means a nonsingular
``P`` with ``A1 P = P A2`` and ``C1 P = C2``. All solutions of those linear
equations form an affine space ``P0 + span(N_i)``; a nonsingular element
is searched for by seeded random draws. A witness, once found, is checked
directly, so positive answers are certain. Negative answers on a
non-empty, positive-dimensional space are randomized, and the verdict
carries a Schwartz-Zippel bound on the chance of a missed witness.

Topological equivalence reduces to three checks: equal invariant
signatures, linearly equivalent center parts and linearly equivalent
observable hyperbolic parts.
"""

from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from .config import DEFAULT_CONFIG, ToleranceConfig
from .linalg import (
    DET_THRESHOLD,
    nonsingularity_ratio,
    norm,
    solve_affine_matrix_equation,
)
from .observability import kalman_decompose
from .signature import InvariantSignature, signature_from_split
from .spectral import spectral_split
from .system import ObservedSystem

__all__ = [
    "LINEAR",
    "TOPOLOGICAL",
    "Confidence",
    "Reason",
    "EquivalenceVerdict",
    "linear_equivalent",
    "topologically_equivalent",
    "witness_residuals",
]

LINEAR, TOPOLOGICAL = "linear", "topological"
# coefficient grid {-M, ..., M} for the random draws
_GRID_HALF_WIDTH = 2**20


@dataclass(frozen=True)
class Confidence:
    kind: str  # "deterministic" or "randomized"
    failure_bound: Optional[float] = None

    def to_dict(self):
        return {"kind": self.kind, "failure_bound": self.failure_bound}


DETERMINISTIC = Confidence("deterministic")


@dataclass(frozen=True)
class Reason:
    """Why a verdict came out the way it did.

    ``code`` is one of ``witness_found``, ``dimension_mismatch``,
    ``signature_mismatch``, ``not_similar``, ``output_mismatch``,
    ``no_nonsingular_solution``, ``center_not_equivalent``,
    ``observable_part_not_equivalent``, ``all_conditions_hold``.
    """

    code: str
    message: str
    index: Optional[str] = None

    def to_dict(self):
        return {"code": self.code, "message": self.message, "index": self.index}


@dataclass(frozen=True)
class EquivalenceVerdict:
    relation: str
    equivalent: bool
    reason: Reason
    confidence: Confidence = DETERMINISTIC
    witness: Optional[np.ndarray] = None
    parts: Dict[str, "EquivalenceVerdict"] = field(default_factory=dict)
    signatures: Optional[tuple] = None

    def __post_init__(self):
        if self.relation == LINEAR and self.equivalent and self.witness is None:
            raise ValueError("a positive linear verdict needs a witness")


def witness_residuals(S1: ObservedSystem, S2: ObservedSystem, P, a_ref: float = 0.0, c_ref: float = 0.0):
    """Relative residuals of ``A1 P - P A2`` and ``C1 P - C2``.

    ``a_ref`` and ``c_ref`` floor the sizes of ``A`` and ``C`` used in the
    denominators. Subsystems split off a larger system pass the parent
    norms, so blocks made of roundoff are not compared against each other.
    """
    P = np.asarray(P, dtype=float)
    tiny = np.finfo(float).tiny
    ra = norm(S1.A @ P - P @ S2.A) / max((max(norm(S1.A) + norm(S2.A), a_ref)) * norm(P), tiny)
    rc = norm(S1.C @ P - S2.C) / max(max(norm(S1.C), c_ref) * norm(P) + max(norm(S2.C), c_ref), tiny)
    return ra, rc


def _search(solution, n, cfg, rng, accept, try_identity=False):
    """Best-conditioned nonsingular element of the affine space that passes
    ``accept``, or None.

    Candidates are the identity (if asked), the particular solution and
    ``cfg.samples`` random points. The ratio test alone is scale-free, so a
    particular solution made of roundoff can look nonsingular; ``accept``
    (a residual check) rules it out.
    """
    if try_identity and accept(np.eye(n)):
        return np.eye(n)
    P0 = solution.particular
    candidates = [P0]
    if solution.dimension:
        scale = max(1.0, norm(P0))
        for _ in range(cfg.samples):
            k = rng.integers(-_GRID_HALF_WIDTH, _GRID_HALF_WIDTH + 1, size=solution.dimension)
            candidates.append(solution.combine(scale * k / _GRID_HALF_WIDTH))
    ratios = [nonsingularity_ratio(P) for P in candidates]
    for idx in np.argsort(ratios, kind="stable")[::-1]:
        if ratios[idx] <= DET_THRESHOLD:
            break
        if accept(candidates[idx]):
            return candidates[idx]
    return None


def _failure_bound(n):
    # det(P0 + sum a_i N_i) has degree <= n in the a_i; a polynomial that is
    # not identically zero vanishes at a uniform grid point with probability
    # <= n / |grid|. Reported per draw, so it holds whatever `samples` is.
    return n / (2 * _GRID_HALF_WIDTH + 1)


def _has_nonsingular_intertwiner(S1, S2, cfg, rng, refs):
    sol = solve_affine_matrix_equation(S1.A, S2.A, cfg=cfg)
    if sol.dimension == 0:
        return False

    def accept(P):
        return witness_residuals(S1, S2, P, *refs)[0] <= cfg.tol_residual

    return _search(sol, S1.n, cfg, rng, accept) is not None


def linear_equivalent(S1: ObservedSystem, S2: ObservedSystem, cfg: ToleranceConfig = DEFAULT_CONFIG,
                      stream: int = 0, reference: Optional[ObservedSystem] = None) -> EquivalenceVerdict:
    """Decide whether ``S1`` and ``S2`` are linearly equivalent.

    The witness ``P`` satisfies ``A1 P = P A2`` and ``C1 P = C2``, that is
    ``S2 = (P^-1 A1 P, C1 P)``. ``stream`` selects an independent random
    stream derived from ``cfg.seed``. ``reference``, when given, supplies
    the sizes of ``A`` and ``C`` that residuals are measured against (see
    :func:`witness_residuals`).
    """
    if (S1.n, S1.p) != (S2.n, S2.p):
        return EquivalenceVerdict(
            LINEAR, False,
            Reason("dimension_mismatch", f"(n, p) = {(S1.n, S1.p)} vs {(S2.n, S2.p)}"),
        )
    n = S1.n
    if n == 0:
        return EquivalenceVerdict(LINEAR, True, Reason("witness_found", "empty state space"),
                                  witness=np.zeros((0, 0)))
    refs = (norm(reference.A), norm(reference.C)) if reference is not None else (0.0, 0.0)
    rng = np.random.default_rng([cfg.seed, stream])
    sol = solve_affine_matrix_equation(S1.A, S2.A, S1.C, S2.C, cfg)
    if sol.particular is not None:

        def accept(P):
            ra, rc = witness_residuals(S1, S2, P, *refs)
            return ra <= cfg.tol_residual and rc <= cfg.tol_residual

        P = _search(sol, n, cfg, rng, accept, try_identity=True)
        if P is not None:
            ra, rc = witness_residuals(S1, S2, P, *refs)
            return EquivalenceVerdict(
                LINEAR, True,
                Reason("witness_found", f"nonsingular P found (residuals {ra:.1e}, {rc:.1e})"),
                witness=P,
            )
    confidence = DETERMINISTIC
    if sol.particular is not None and sol.dimension > 0:
        confidence = Confidence("randomized", _failure_bound(n))
    if not _has_nonsingular_intertwiner(S1, S2, cfg, rng, refs):
        reason = Reason("not_similar", "A matrices not similar")
    elif sol.particular is None:
        reason = Reason("output_mismatch", "no P with A1 P = P A2 maps C1 onto C2")
    else:
        reason = Reason("no_nonsingular_solution",
                        "every P with A1 P = P A2 and C1 P = C2 is singular")
    return EquivalenceVerdict(LINEAR, False, reason, confidence)


def topologically_equivalent(S1: ObservedSystem, S2: ObservedSystem,
                             cfg: ToleranceConfig = DEFAULT_CONFIG) -> EquivalenceVerdict:
    """Decide topological equivalence of ``S1`` and ``S2``.

    Equivalent iff (a) the invariant signatures agree, (b) the center
    subsystems are linearly equivalent and (c) the observable parts of the
    hyperbolic subsystems are linearly equivalent. Sub-verdicts for (b) and
    (c), with their witnesses, are returned in ``parts``.
    """
    if (S1.n, S1.p) != (S2.n, S2.p):
        return EquivalenceVerdict(
            TOPOLOGICAL, False,
            Reason("dimension_mismatch", f"(n, p) = {(S1.n, S1.p)} vs {(S2.n, S2.p)}"),
        )
    split1, split2 = spectral_split(S1, cfg), spectral_split(S2, cfg)
    sig1: InvariantSignature = signature_from_split(S1, split1, cfg)
    sig2: InvariantSignature = signature_from_split(S2, split2, cfg)
    sigs = (sig1, sig2)
    index = sig1.first_difference(sig2)
    if index is not None:
        return EquivalenceVerdict(
            TOPOLOGICAL, False,
            Reason("signature_mismatch",
                   f"invariant {index} differs: {getattr(sig1, index)} vs {getattr(sig2, index)}", index),
            signatures=sigs,
        )
    # parts are judged against the size of the larger whole system
    ref = S1 if norm(S1.A) + norm(S1.C) >= norm(S2.A) + norm(S2.C) else S2
    center = linear_equivalent(split1.center(), split2.center(), cfg, stream=1, reference=ref)
    obs1 = kalman_decompose(split1.hyperbolic(), cfg, S1).observable()
    obs2 = kalman_decompose(split2.hyperbolic(), cfg, S2).observable()
    observable = linear_equivalent(obs1, obs2, cfg, stream=2, reference=ref)
    parts = {"center": center, "observable": observable}
    if not center.equivalent:
        reason = Reason("center_not_equivalent", f"center parts not linearly equivalent: {center.reason.message}")
        return EquivalenceVerdict(TOPOLOGICAL, False, reason, center.confidence, parts=parts, signatures=sigs)
    if not observable.equivalent:
        reason = Reason("observable_part_not_equivalent",
                        f"observable hyperbolic parts not linearly equivalent: {observable.reason.message}")
        return EquivalenceVerdict(TOPOLOGICAL, False, reason, observable.confidence, parts=parts, signatures=sigs)
    return EquivalenceVerdict(
        TOPOLOGICAL, True,
        Reason("all_conditions_hold", "signatures equal, center and observable hyperbolic parts linearly equivalent"),
        parts=parts, signatures=sigs,
    )
