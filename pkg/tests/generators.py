"""Seeded generators of test systems with known block structure."""

import numpy as np
import scipy.linalg

from obsequiv import ObservedSystem


def jordan(lam, n):
    return lam * np.eye(n) + np.eye(n, k=-1)


def well_conditioned(rng, n, lo=0.5, hi=2.0):
    """Random R = Q1 diag(s) Q2 with singular values in [lo, hi]."""
    if n == 0:
        return np.zeros((0, 0))
    q1, _ = np.linalg.qr(rng.standard_normal((n, n)))
    q2, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return q1 @ np.diag(rng.uniform(lo, hi, n)) @ q2


def conjugate(S, R):
    """``(R^-1 A R, C R)``: linearly equivalent to ``S`` with witness ``R``."""
    return ObservedSystem(np.linalg.solve(R, S.A @ R), S.C @ R)


def _center_block(rng):
    kind = rng.integers(3)
    if kind == 0:
        return np.zeros((1, 1))
    if kind == 1:
        w = float(rng.integers(1, 4))
        return np.array([[0.0, w], [-w, 0.0]])
    return jordan(0.0, 2)


def _hyperbolic_block(rng, sign):
    kind = rng.integers(3)
    a = sign * float(rng.integers(1, 5))
    if kind == 0:
        return np.array([[a]])
    if kind == 1:
        return jordan(a, 2)
    b = float(rng.integers(1, 3))
    return np.array([[a, b], [-b, a]])


def block_system(rng, n_max=6, p=None, center=True, zero_prob=0.3):
    """Block-diagonal system with small-integer spectrum and integer ``C``.

    Columns of ``C`` are zeroed with probability ``zero_prob`` so that
    unobservable parts occur regularly.
    """
    blocks = []
    size = 0
    target = int(rng.integers(1, n_max + 1))
    while size < target:
        r = rng.random()
        if center and r < 0.25:
            b = _center_block(rng)
        else:
            b = _hyperbolic_block(rng, 1.0 if rng.random() < 0.5 else -1.0)
        if size + b.shape[0] > n_max:
            b = np.array([[float(rng.choice([-2.0, -1.0, 1.0, 2.0]))]])
        blocks.append(b)
        size += b.shape[0]
    A = scipy.linalg.block_diag(*blocks)
    if p is None:
        p = int(rng.integers(1, 3))
    C = rng.integers(-3, 4, size=(p, size)).astype(float)
    C[:, rng.random(size) < zero_prob] = 0.0
    return ObservedSystem(A, C)


def random_system(rng, n_max=6, **kw):
    """A block system hidden behind a random well-conditioned similarity."""
    S = block_system(rng, n_max, **kw)
    return conjugate(S, well_conditioned(rng, S.n))


def observable_system(rng, n_max=5, p=1):
    """Completely observable hyperbolic system, redrawn until observable."""
    from obsequiv import kalman_rank

    while True:
        S = block_system(rng, n_max, p=p, center=False, zero_prob=0.0)
        if kalman_rank(S) == S.n:
            return conjugate(S, well_conditioned(rng, S.n))
