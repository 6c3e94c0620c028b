"""Simulating observations and checking that a linear witness preserves them."""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .config import DEFAULT_CONFIG, ToleranceConfig
from .errors import DimensionMismatch, SingularWitness
from .linalg import DET_THRESHOLD, expm, nonsingularity_ratio
from .system import ObservedSystem

__all__ = [
    "TrajectorySample",
    "WitnessCheck",
    "default_times",
    "default_initial_states",
    "simulate_observation",
    "check_linear_witness",
]


def default_times(t_max: float = 2.0, points: int = 33) -> np.ndarray:
    return np.linspace(0.0, t_max, points)


def default_initial_states(n: int, count: int = 4, seed: int = 0) -> np.ndarray:
    """``count`` seeded standard-normal initial states, one per row."""
    return np.random.default_rng([seed, n, count]).standard_normal((count, n))


@dataclass(frozen=True)
class TrajectorySample:
    times: np.ndarray
    states: np.ndarray  # len(times) x n
    outputs: np.ndarray  # len(times) x p


def simulate_observation(S: ObservedSystem, x0, times: Sequence[float]) -> TrajectorySample:
    """Evaluate ``x(t) = exp(A t) x0`` and ``w(t) = C x(t)`` at each time."""
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or not np.all(np.isfinite(times)):
        raise ValueError("times must be a finite 1-D sequence")
    if np.any(np.diff(times) < 0):
        raise ValueError("times must be ascending")
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if x0.shape[0] != S.n:
        raise DimensionMismatch(f"x0 has {x0.shape[0]} entries, system has n = {S.n}")
    states = np.array([expm(S.A, t) @ x0 for t in times]).reshape(len(times), S.n)
    outputs = states @ S.C.T
    return TrajectorySample(times, states, outputs)


@dataclass(frozen=True)
class WitnessCheck:
    passed: bool
    max_abs_discrepancy: float
    max_rel_discrepancy: float  # discrepancy / (1 + |w(t)|_inf), maximized over samples
    samples: int


def check_linear_witness(S1: ObservedSystem, S2: ObservedSystem, P, x0set=None, times=None,
                         cfg: ToleranceConfig = DEFAULT_CONFIG,
                         tolerance: Optional[float] = None) -> WitnessCheck:
    """Check ``C1 exp(A1 t) x0 == C2 exp(A2 t) P^-1 x0`` on a grid.

    Passes when at every sampled time the max-norm discrepancy is at most
    ``tolerance * (1 + |w(t)|_inf)``; ``tolerance`` defaults to
    ``cfg.tol_residual``.
    """
    P = np.asarray(P, dtype=float)
    if P.shape != (S1.n, S2.n) or S1.n != S2.n or S1.p != S2.p:
        raise DimensionMismatch(f"witness of shape {P.shape} does not fit systems {S1!r}, {S2!r}")
    if nonsingularity_ratio(P) <= DET_THRESHOLD:
        raise SingularWitness("witness matrix is numerically singular")
    tol = cfg.tol_residual if tolerance is None else tolerance
    if x0set is None:
        x0set = default_initial_states(S1.n, seed=cfg.seed)
    if times is None:
        times = default_times()
    x0set = np.atleast_2d(np.asarray(x0set, dtype=float))
    worst_abs = worst_rel = 0.0
    passed = True
    for x0 in x0set:
        w = simulate_observation(S1, x0, times).outputs
        z = simulate_observation(S2, np.linalg.solve(P, x0), times).outputs
        if w.size == 0:
            continue
        gap = np.max(np.abs(w - z), axis=1)
        rel = gap / (1.0 + np.max(np.abs(w), axis=1))
        worst_abs = max(worst_abs, float(gap.max()))
        worst_rel = max(worst_rel, float(rel.max()))
        passed = passed and bool(np.all(rel <= tol))
    return WitnessCheck(passed, worst_abs, worst_rel, len(x0set) * len(times))
