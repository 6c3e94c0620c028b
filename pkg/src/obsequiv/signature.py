from dataclasses import astuple, dataclass, fields

from .config import DEFAULT_CONFIG, ToleranceConfig
from .observability import kalman_rank, sub_ranks
from .spectral import SpectralSplit, spectral_split
from .system import ObservedSystem

__all__ = ["InvariantSignature", "invariant_signature", "signature_from_split"]


@dataclass(frozen=True)
class InvariantSignature:
    """The seven topological invariants ``(n0, n+, n-, k_obs, k0, k+, k-)``."""

    n0: int
    n_plus: int
    n_minus: int
    k_obs: int
    k0: int
    k_plus: int
    k_minus: int

    def __post_init__(self):
        if self.k0 + self.k_plus + self.k_minus != self.k_obs:
            raise ValueError(f"sub-ranks do not add up to k_obs in {self}")
        for k, m in ((self.k0, self.n0), (self.k_plus, self.n_plus), (self.k_minus, self.n_minus)):
            if not 0 <= k <= m:
                raise ValueError(f"sub-rank {k} outside [0, {m}] in {self}")

    @property
    def n(self) -> int:
        return self.n0 + self.n_plus + self.n_minus

    def as_tuple(self):
        return astuple(self)

    def first_difference(self, other: "InvariantSignature"):
        """Name of the first index on which the two signatures differ, else None."""
        for f in fields(self):
            if getattr(self, f.name) != getattr(other, f.name):
                return f.name
        return None

    def to_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


def signature_from_split(S: ObservedSystem, split: SpectralSplit,
                         cfg: ToleranceConfig = DEFAULT_CONFIG) -> InvariantSignature:
    ranks = sub_ranks(S, split, cfg)
    n0, npl, nmi = split.counts
    return InvariantSignature(n0, npl, nmi, kalman_rank(S, cfg), ranks.k0, ranks.k_plus, ranks.k_minus)


def invariant_signature(S: ObservedSystem, cfg: ToleranceConfig = DEFAULT_CONFIG) -> InvariantSignature:
    return signature_from_split(S, spectral_split(S, cfg), cfg)
