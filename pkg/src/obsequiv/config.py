from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical thresholds shared by every operation.

    Attributes
    ----------
    tol_spec : float
        An eigenvalue cluster counts as center when ``|Re| <= tol_spec * max(1, ||A||)``.
    tol_rank : float
        Relative singular value cutoff, see :func:`obsequiv.linalg.rank_with_tolerance`.
    tol_residual : float
        Acceptance level for residuals of matrix equations and witnesses.
    tol_cluster : float
        Eigenvalues closer than ``tol_cluster * max(1, ||A_bal||)`` are grouped into
        one cluster before their real parts are classified. Defective
        eigenvalues split into rings of radius ~eps**(1/k) under roundoff;
        the cluster mean stays accurate. ``A_bal`` is ``A`` after diagonal
        balancing.
    samples : int
        Random draws used when searching for a nonsingular witness.
    seed : int
        Seed for every random generator created from this config.
    """

    tol_spec: float = 1e-9
    tol_rank: float = 1e-10
    tol_residual: float = 1e-8
    tol_cluster: float = 1e-3
    samples: int = 64
    seed: int = 0

    def __post_init__(self):
        for name in ("tol_spec", "tol_rank", "tol_residual", "tol_cluster"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be strictly positive, got {value!r}")
        if int(self.samples) < 1:
            raise ValueError(f"samples must be >= 1, got {self.samples!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must fit in 64 unsigned bits, got {self.seed!r}")

    def to_dict(self):
        return asdict(self)


DEFAULT_CONFIG = ToleranceConfig()
