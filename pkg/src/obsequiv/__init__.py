"""Classification of linear systems with observation, x' = Ax, w = Cx.

Computes the invariant signature (n0, n+, n-, k_obs, k0, k+, k-), the
topological canonical form, and decides linear and topological
equivalence of system pairs.
"""

from .canonical import (
    CanonicalForm,
    ObservableCanonicalForm,
    ehat,
    merged_observable_canonical,
    observable_canonical_mimo,
    observable_canonical_siso,
    topological_canonical,
)
from .catalog import Catalog3DEntry, catalog_representative, classify_3d_siso
from .config import DEFAULT_CONFIG, ToleranceConfig
from .equivalence import EquivalenceVerdict, linear_equivalent, topologically_equivalent
from .errors import *  # noqa: F401,F403
from .linalg import (
    expm,
    rank_with_tolerance,
    real_schur,
    reorder_schur,
    solve_affine_matrix_equation,
    solve_sylvester,
)
from .observability import kalman_decompose, kalman_rank, observability_matrix, sub_ranks
from .signature import InvariantSignature, invariant_signature
from .spectral import SpectralSplit, eigen_counts, spectral_split
from .system import ObservedSystem
from .trajectory import check_linear_witness, simulate_observation

__version__ = "0.1.0"
