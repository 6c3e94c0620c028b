"""Explicit canonical forms for 3-D systems with a single output.

Center systems (every eigenvalue on the imaginary axis) are classified up to
linear equivalence, which coincides with topological equivalence there.
Hyperbolic systems are labelled by how ``3`` splits into
``n0 + (k+ + k-) + (n+ + n- - k+ - k-)``.

Center families are named ``center:<shape>|C=<c1c2c3>`` where ``<shape>``
is the Jordan structure of the representative ``A``:

* ``zero``: the zero matrix,
* ``nil2``: ``[[0,0,0],[1,0,0],[0,0,0]]``,
* ``nil3``: ``[[0,0,0],[1,0,0],[0,1,0]]``,
* ``rot``:  ``[[0,1,0],[mu,0,0],[0,0,0]]`` with ``mu < 0``.

``center:nil2|C=100`` completes the list: ``(nil2, [1 0 0])`` has Kalman
rank 1 like ``(nil2, [0 0 1])`` but a zero unobservable block, so it is a
separate class.
"""

from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from .canonical import topological_canonical
from .config import DEFAULT_CONFIG, ToleranceConfig
from .errors import MixedSpectrum, NotSISO, ShapeError
from .linalg import rank_with_tolerance
from .observability import kalman_rank
from .spectral import classify_spectrum
from .system import ObservedSystem

__all__ = ["Catalog3DEntry", "CENTER_FAMILIES", "HYPERBOLIC_FAMILIES", "catalog_representative", "classify_3d_siso"]

_SHAPES = {
    "zero": np.zeros((3, 3)),
    "nil2": np.array([[0.0, 0, 0], [1, 0, 0], [0, 0, 0]]),
    "nil3": np.array([[0.0, 0, 0], [1, 0, 0], [0, 1, 0]]),
}

CENTER_FAMILIES = (
    "center:zero|C=000",
    "center:zero|C=001",
    "center:nil2|C=000",
    "center:nil2|C=010",
    "center:nil2|C=001",
    "center:nil3|C=000",
    "center:nil3|C=100",
    "center:nil3|C=010",
    "center:nil3|C=001",
    "center:rot|C=000",
    "center:rot|C=010",
    "center:rot|C=001",
    "center:rot|C=011",
    "center:nil2|C=100",
)

HYPERBOLIC_FAMILIES = ("3=0+3+0", "3=0+2+1", "3=0+1+2", "3=0+0+3")

# (shape, Kalman rank) -> C of the representative; nil2 with rank 1 is resolved separately
_CENTER_BY_RANK = {
    ("zero", 0): "000", ("zero", 1): "001",
    ("nil2", 0): "000", ("nil2", 2): "010",
    ("nil3", 0): "000", ("nil3", 1): "100", ("nil3", 2): "010", ("nil3", 3): "001",
    ("rot", 0): "000", ("rot", 1): "001", ("rot", 2): "010", ("rot", 3): "011",
}


@dataclass(frozen=True)
class Catalog3DEntry:
    """A family name with its parameters.

    ``params`` keys are ``mu`` (rotation center and ``3=0+1+2``),
    ``mu1``, ``mu2``, ``mu3`` (companion blocks) and ``iota``, ``iota1``,
    ``iota2``, ``iota3`` (the ``+-1`` entries).
    """

    family: str
    params: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in CENTER_FAMILIES + HYPERBOLIC_FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        iotas = [v for k, v in self.params.items() if k.startswith("iota")]
        if any(v not in (1, -1) for v in iotas):
            raise ValueError(f"iota parameters must be +1 or -1, got {iotas}")
        if iotas != sorted(iotas, reverse=True):
            raise ValueError(f"iota parameters must be non-increasing, got {iotas}")
        if self.family.startswith("center:rot") and not self.params.get("mu", 0.0) < 0:
            raise ValueError("rotation families need mu < 0")
        if self.family == "3=0+1+2" and self.params.get("mu", 0.0) == 0:
            raise ValueError("3=0+1+2 needs mu != 0")

    def representative(self) -> ObservedSystem:
        return catalog_representative(self)

    def to_dict(self):
        return {"family": self.family, "params": dict(self.params)}


def catalog_representative(entry: Catalog3DEntry) -> ObservedSystem:
    """The canonical ``(A, C)`` listed for ``entry``."""
    f, q = entry.family, entry.params
    if f.startswith("center:"):
        shape, code = f[len("center:"):].split("|C=")
        if shape == "rot":
            A = np.array([[0.0, 1, 0], [q["mu"], 0, 0], [0, 0, 0]])
        else:
            A = _SHAPES[shape].copy()
        return ObservedSystem(A, [[float(ch) for ch in code]], label=f)
    C = np.array([[1.0, 0, 0]])
    if f == "3=0+3+0":
        A = np.array([[0.0, 1, 0], [0, 0, 1], [q["mu3"], q["mu2"], q["mu1"]]])
    elif f == "3=0+2+1":
        A = np.array([[0.0, 1, 0], [q["mu2"], q["mu1"], 0], [0, 0, q["iota"]]])
    elif f == "3=0+1+2":
        A = np.diag([q["mu"], q["iota1"], q["iota2"]])
    else:
        A = np.diag([q["iota1"], q["iota2"], q["iota3"]])
        C = np.zeros((1, 3))
    return ObservedSystem(A, C, label=f)


def _classify_center(S: ObservedSystem, classes, cfg: ToleranceConfig) -> Catalog3DEntry:
    A = S.A
    # a defective zero eigenvalue spreads by ~eps^(1/3) and stays within one
    # cluster; a genuine rotation pair sits further out than the radius
    rotating = any(c.mean_abs_imag > classes.radius for c in classes.clusters)
    if rotating:
        shape = "rot"
        # A ~ blockdiag([[0,1],[mu,0]], 0) has characteristic polynomial l^3 - mu l
        mu = float((np.trace(A @ A) - np.trace(A) ** 2) / 2.0)
        params = {"mu": mu}
    else:
        shape = ("zero", "nil2", "nil3")[rank_with_tolerance(A, cfg)]
        params = {}
    k = kalman_rank(S, cfg)
    if shape == "nil2" and k == 1:
        # C in the row space of A  <=>  C ~ [1 0 0]
        in_row_space = rank_with_tolerance(np.vstack([A, S.C]), cfg) == rank_with_tolerance(A, cfg)
        code = "100" if in_row_space else "001"
    else:
        code = _CENTER_BY_RANK[(shape, k)]
    return Catalog3DEntry(f"center:{shape}|C={code}", params)


def classify_3d_siso(S: ObservedSystem, cfg: ToleranceConfig = DEFAULT_CONFIG) -> Catalog3DEntry:
    """Find the catalog family and parameters of a 3-D single-output system.

    Raises
    ------
    MixedSpectrum
        If ``0 < n0 < 3``; the catalog only covers all-center and
        all-hyperbolic spectra.
    """
    if S.n != 3:
        raise ShapeError(f"expected n = 3, got n = {S.n}")
    if S.p != 1:
        raise NotSISO(f"expected a single output, got p = {S.p}")
    classes = classify_spectrum(S.A, cfg)
    n0 = classes.counts[0]
    if n0 == 3:
        return _classify_center(S, classes, cfg)
    if n0 != 0:
        raise MixedSpectrum(f"n0 = {n0}: the 3-D catalog covers only n0 = 0 or n0 = 3")

    cf = topological_canonical(S, cfg)
    k = cf.Bhat.shape[0]
    B = cf.Bhat
    iotas = [int(round(v)) for v in np.diag(cf.Ehat)]
    if k == 3:
        return Catalog3DEntry("3=0+3+0", {"mu1": float(B[2, 2]), "mu2": float(B[2, 1]), "mu3": float(B[2, 0])})
    if k == 2:
        return Catalog3DEntry("3=0+2+1", {"mu1": float(B[1, 1]), "mu2": float(B[1, 0]), "iota": iotas[0]})
    if k == 1:
        return Catalog3DEntry("3=0+1+2", {"mu": float(B[0, 0]), "iota1": iotas[0], "iota2": iotas[1]})
    return Catalog3DEntry("3=0+0+3", {"iota1": iotas[0], "iota2": iotas[1], "iota3": iotas[2]})
