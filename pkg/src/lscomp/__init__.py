"""Toolkit for master/worker linearly separable computation with an arbitrary
heterogeneous data assignment: computable-dimension bounds, exact prime-field
code construction, and end-to-end recovery simulation."""

__version__ = "0.1.0"

from .assignment import Assignment, AssignmentError, Cost, bundled_path
from .linalg import (
    Matrix,
    SingularMatrixError,
    block_diag,
    cauchy_mds,
    hstack,
    invert,
    left_null_space,
    matmul,
    random_matrix,
    rank,
    rref,
    solve,
    vstack,
)
from .prime_field import (
    DEFAULT_MODULUS,
    MERSENNE_61,
    FieldElement,
    FieldMismatchError,
    FieldSpec,
    is_prime,
    make_rng,
)
from .scheme import (
    CertificateWitness,
    ConstructionError,
    HallInfeasibleError,
    Scheme,
    SingularSystemError,
    build,
    certificate_realization,
    column_solver,
    verify_decodability,
    verify_encodability,
)
from .simulate import (
    MessageSet,
    MonteCarloResult,
    ProtocolError,
    SimulationResult,
    generate_messages,
    master_decode,
    run_monte_carlo,
    run_trial,
    worker_encode,
)
from .structure import (
    StructureReport,
    TradeoffPoint,
    Transversal,
    analyze,
    bottleneck_family,
    brute_force_bottlenecks,
    common_zero_columns,
    hall_transversal,
    repetition_dimension,
    tradeoff_curve,
)

__all__ = [
    "Assignment",
    "AssignmentError",
    "CertificateWitness",
    "ConstructionError",
    "Cost",
    "DEFAULT_MODULUS",
    "FieldElement",
    "FieldMismatchError",
    "FieldSpec",
    "HallInfeasibleError",
    "MERSENNE_61",
    "Matrix",
    "MessageSet",
    "MonteCarloResult",
    "ProtocolError",
    "Scheme",
    "SimulationResult",
    "SingularMatrixError",
    "SingularSystemError",
    "StructureReport",
    "TradeoffPoint",
    "Transversal",
    "analyze",
    "block_diag",
    "bottleneck_family",
    "brute_force_bottlenecks",
    "build",
    "bundled_path",
    "cauchy_mds",
    "certificate_realization",
    "column_solver",
    "common_zero_columns",
    "generate_messages",
    "hall_transversal",
    "hstack",
    "invert",
    "is_prime",
    "left_null_space",
    "make_rng",
    "master_decode",
    "matmul",
    "random_matrix",
    "rank",
    "repetition_dimension",
    "rref",
    "run_monte_carlo",
    "run_trial",
    "solve",
    "tradeoff_curve",
    "verify_decodability",
    "verify_encodability",
    "vstack",
    "worker_encode",
]
