"""Linear quantum systems: physical realizability, singular-perturbation
reduction, and decomposition of reduced models into a realizable part in
series with a static Bogoliubov component."""

from .doubled import DoubledMatrix, contract, expand, is_doubled, structure_matrices
from .errors import (
    DimensionMismatch,
    InternalInconsistency,
    InvalidParameter,
    IoError,
    MalformedInput,
    NotRealizable,
    QsrError,
    SingularFastDynamics,
    SingularMatrix,
    StructureViolation,
)
from .system import (
    PhysicalParams,
    QuantumLinearSystem,
    check_physical_realizability,
    eigenvalue_pair_check,
    extract_canonical_params,
    jj_unitarity_check,
    minimality_check,
    realize,
    scattering_form_check,
    transfer_function,
)
from .perturbation import PerturbedSystem, assemble, convergence_probe, expansion_residual, first_order_term, reduce
from .special_class import (
    BogoliubovComponent,
    SpecialClassParams,
    decompose,
    is_bogoliubov,
    reduce_special,
    series_with_static,
    to_perturbed,
    validate_params,
    verify_decomposition,
)
from .cavity import CavitySqueezerParams, build_full, build_perturbed, reduced_reference, special_params

__version__ = "0.1.0"

__all__ = [
    "DoubledMatrix",
    "contract",
    "expand",
    "is_doubled",
    "structure_matrices",
    "DimensionMismatch",
    "InternalInconsistency",
    "InvalidParameter",
    "IoError",
    "MalformedInput",
    "NotRealizable",
    "QsrError",
    "SingularFastDynamics",
    "SingularMatrix",
    "StructureViolation",
    "PhysicalParams",
    "QuantumLinearSystem",
    "check_physical_realizability",
    "eigenvalue_pair_check",
    "extract_canonical_params",
    "jj_unitarity_check",
    "minimality_check",
    "realize",
    "scattering_form_check",
    "transfer_function",
    "PerturbedSystem",
    "assemble",
    "convergence_probe",
    "expansion_residual",
    "first_order_term",
    "reduce",
    "BogoliubovComponent",
    "SpecialClassParams",
    "decompose",
    "is_bogoliubov",
    "reduce_special",
    "series_with_static",
    "to_perturbed",
    "validate_params",
    "verify_decomposition",
    "CavitySqueezerParams",
    "build_full",
    "build_perturbed",
    "reduced_reference",
    "special_params",
]
