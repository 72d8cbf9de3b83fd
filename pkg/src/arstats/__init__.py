"""Generalized A_r quantum statistics: Fock representations, analytic realizations,
coherent states and measures, with numerical certification of their identities."""

__version__ = "0.1.0"

from .errors import (
    ArStatsError,
    BasisMismatch,
    CutoffTooSmall,
    DomainError,
    InvalidParamsError,
    PauliViolation,
    QuadratureError,
)
from .fock import (
    FockBasis,
    SectorParams,
    SparseOperator,
    bose_limit_deviation,
    enumerate_basis,
    hamiltonian_matrix,
    ladder_matrix,
    number_matrix,
    structure_function,
)
from .report import VerificationReport
from .algebra import (
    commutator,
    triple_bracket,
    verify_heisenberg,
    verify_lie_triple_axioms,
    verify_triple_relations,
)
from .bargmann import (
    MultiPoly,
    RealizationKind,
    apply_generator,
    basis_coefficient,
    state_to_polynomial,
    verify_realization_equivalence,
)
from .coherent import (
    CoherentPoint,
    CoherentState,
    Family,
    coherent_amplitudes,
    normalization_constant,
    overlap,
    overlap_kernel,
    verify_annihilation_eigenstate,
)
from .measures import (
    MomentCase,
    QuadratureSpec,
    bessel_k,
    moment_residual,
    verify_simplex_identity,
)

__all__ = [
    "__version__",
    "VerificationReport",
    "ArStatsError",
    "BasisMismatch",
    "CutoffTooSmall",
    "DomainError",
    "InvalidParamsError",
    "PauliViolation",
    "QuadratureError",
    "FockBasis",
    "SectorParams",
    "SparseOperator",
    "bose_limit_deviation",
    "enumerate_basis",
    "hamiltonian_matrix",
    "ladder_matrix",
    "number_matrix",
    "structure_function",
    "commutator",
    "triple_bracket",
    "verify_heisenberg",
    "verify_lie_triple_axioms",
    "verify_triple_relations",
    "MultiPoly",
    "RealizationKind",
    "apply_generator",
    "basis_coefficient",
    "state_to_polynomial",
    "verify_realization_equivalence",
    "CoherentPoint",
    "CoherentState",
    "Family",
    "coherent_amplitudes",
    "normalization_constant",
    "overlap",
    "overlap_kernel",
    "verify_annihilation_eigenstate",
    "MomentCase",
    "QuadratureSpec",
    "bessel_k",
    "moment_residual",
    "verify_simplex_identity",
]
