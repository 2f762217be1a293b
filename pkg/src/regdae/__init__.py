"""Regular matrix pencils ``z M0 + M1`` and the descriptor system ``M0 u' + M1 u = 0``.

The main entry points are re-exported here; see the submodules for details.
"""

from .asymptotics import classify, dunford_projection, split_subspaces, verify_decay
from .consistent_iv import compute_iv, iv_for, iv_membership, iv_structure_predicates
from .errors import (
    DaeError,
    InconsistentInitialValue,
    NotRegular,
    NumericalRefusal,
    ParseError,
    SpectrumHit,
)
from .laplace import LaplaceConfig, transform_residual, weighted_l2_norm
from .pencil import (
    Pencil,
    block_factorize,
    generate_regular,
    is_regular,
    resolvent,
    resolvent_bound_probe,
    reversed_pencil,
    spectrum,
)
from .solvers import (
    Trajectory,
    duality_check,
    expm,
    integrated_identity_residual,
    solve_backward,
    solve_mild,
    solve_strong,
)
from .subspaces import SubspaceBasis, fundamental_decomposition, orthonormalize

__version__ = "0.1.0"

__all__ = [
    "DaeError",
    "InconsistentInitialValue",
    "LaplaceConfig",
    "NotRegular",
    "NumericalRefusal",
    "ParseError",
    "Pencil",
    "SpectrumHit",
    "SubspaceBasis",
    "Trajectory",
    "block_factorize",
    "classify",
    "compute_iv",
    "dunford_projection",
    "duality_check",
    "expm",
    "fundamental_decomposition",
    "generate_regular",
    "integrated_identity_residual",
    "is_regular",
    "iv_for",
    "iv_membership",
    "iv_structure_predicates",
    "orthonormalize",
    "resolvent",
    "resolvent_bound_probe",
    "reversed_pencil",
    "solve_backward",
    "solve_mild",
    "solve_strong",
    "spectrum",
    "split_subspaces",
    "transform_residual",
    "verify_decay",
    "weighted_l2_norm",
]
